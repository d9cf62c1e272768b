#include "permuton_lab/io.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "permuton_lab/core.hpp"

#ifndef PERMUTON_LAB_GIT_DESCRIBE
#define PERMUTON_LAB_GIT_DESCRIBE "unknown"
#endif

namespace permuton_lab {

std::string git_describe() { return PERMUTON_LAB_GIT_DESCRIBE; }

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move output into place at " + path + ": " + ec.message());
  }
}

}  // namespace permuton_lab
