// Little-endian binary event log: header (magic "IPLG", u16 version, u32 N,
// f64 alpha, f64 T, u64 seed), initial configuration (u32 positions and u32
// colors of particles 1..N), u64 event count, then (f64 time, u8 kind,
// u32 site) records.

#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

#include "permuton_lab/interchange.hpp"

namespace permuton_lab {

namespace {

constexpr char kMagic[4] = {'I', 'P', 'L', 'G'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw Error("truncated event log");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

}  // namespace

void write_event_log(std::ostream& out, const EventLog& log) {
  out.write(kMagic, 4);
  put<std::uint16_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(log.n));
  put<double>(out, log.alpha);
  put<double>(out, log.horizon);
  put<std::uint64_t>(out, log.seed);
  for (int i = 1; i <= log.n; ++i)
    put<std::uint32_t>(out, static_cast<std::uint32_t>(log.initial.position[static_cast<std::size_t>(i)]));
  for (int i = 1; i <= log.n; ++i)
    put<std::uint32_t>(out, static_cast<std::uint32_t>(log.initial.color[static_cast<std::size_t>(i)]));
  put<std::uint64_t>(out, log.events.size());
  for (const Event& e : log.events) {
    put<double>(out, e.time);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(e.kind));
    put<std::uint32_t>(out, e.site);
  }
  if (!out) throw Error("failed writing event log");
}

EventLog read_event_log(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw Error("not an event log (bad magic)");
  if (get<std::uint16_t>(in) != kVersion) throw Error("unsupported event log version");
  EventLog log;
  log.n = static_cast<int>(get<std::uint32_t>(in));
  log.alpha = get<double>(in);
  log.horizon = get<double>(in);
  log.seed = get<std::uint64_t>(in);
  const auto n = static_cast<std::size_t>(log.n);
  Configuration c;
  c.n = log.n;
  c.position.assign(n + 1, 0);
  c.particle.assign(n + 1, 0);
  c.color.assign(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    c.position[i] = static_cast<int>(get<std::uint32_t>(in));
    if (c.position[i] < 1 || c.position[i] > log.n) throw Error("event log position out of range");
    c.particle[static_cast<std::size_t>(c.position[i])] = static_cast<int>(i);
  }
  for (std::size_t i = 1; i <= n; ++i) c.color[i] = static_cast<int>(get<std::uint32_t>(in));
  c.validate();
  log.initial = std::move(c);
  const auto count = get<std::uint64_t>(in);
  log.events.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    Event e{};
    e.time = get<double>(in);
    const auto kind = get<std::uint8_t>(in);
    if (kind > 2) throw Error("event log has an unknown event kind");
    e.kind = static_cast<EventKind>(kind);
    e.site = get<std::uint32_t>(in);
    if (e.kind == EventKind::kSwap) ++log.swap_count;
    log.events.push_back(e);
  }
  log.end_time = log.horizon;
  log.validate();
  return log;
}

void write_snapshot_csv(std::ostream& out, const EventLog& log, const std::vector<double>& times) {
  const auto snaps = snapshots(log, times);
  out << "time,particle,site,color\n";
  out.precision(17);
  for (std::size_t s = 0; s < snaps.size(); ++s)
    for (int i = 1; i <= log.n; ++i)
      out << times[s] << ',' << i << ',' << snaps[s].position[static_cast<std::size_t>(i)] << ','
          << snaps[s].color[static_cast<std::size_t>(i)] << '\n';
}

}  // namespace permuton_lab
