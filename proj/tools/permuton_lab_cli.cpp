// permuton-lab: runs the named experiments of the library from the command
// line or a JSON config file.  Flags override the file, which overrides the
// built-in defaults.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "permuton_lab/core.hpp"
#include "permuton_lab/estimators.hpp"
#include "permuton_lab/euler.hpp"
#include "permuton_lab/experiments.hpp"
#include "permuton_lab/interchange.hpp"
#include "permuton_lab/io.hpp"
#include "permuton_lab/networks.hpp"
#include "permuton_lab/transport.hpp"

namespace pl = permuton_lab;
using json = nlohmann::json;

namespace {

constexpr int kUsageError = 2;

const std::vector<std::string> kExperiments{"simulate",     "lln",    "rare-event",
                                            "martingale-check", "one-block", "stationarity-check",
                                            "energy",       "networks"};

struct ExperimentConfig {
  std::string experiment;
  int N = 64;
  double alpha = 1.5;
  double T = 1.0;
  double beta = 0.05;
  double delta = 0.05;
  double kappa = 0.5;
  double epsilon_ball = std::numeric_limits<double>::infinity();
  std::size_t replicas = 1000;
  std::uint64_t seed = 1;
  std::string field = "sine";
  std::vector<int> sizes{64, 128, 256};
  std::uint64_t max_events = 1'000'000'000ULL;
  std::string ot = "exact";
  double snap_dt = 0.0;
  std::string target = "reverse";
  bool unbiased = false;
  int depth = 8;
  int tilt_band = 2;
  double field_scale = 1.0;
  std::size_t snapshots = 64;
  std::vector<int> radii{1, 32};
  std::string count = "stanley";
  std::uint64_t M = 0;
  std::string length_mode = "fixed";
  std::string log_out;
  // Not part of the configuration identity: they do not change results.
  std::size_t threads = 0;
  std::string output;
  std::string format = "json";
};

// One configuration key: how to read it from JSON, write it back, and copy it
// between configs when the matching flag was given.
struct Key {
  std::string name;
  std::function<void(ExperimentConfig&, const json&)> read;
  std::function<void(const ExperimentConfig&, json&)> write;
  std::function<void(ExperimentConfig&, const ExperimentConfig&)> copy;
  bool identity = true;
};

template <typename T>
Key key(const std::string& name, T ExperimentConfig::*member, bool identity = true) {
  Key k;
  k.name = name;
  k.read = [member](ExperimentConfig& c, const json& j) {
    if constexpr (std::is_same_v<T, double>) {
      c.*member = j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
    } else {
      c.*member = j.get<T>();
    }
  };
  k.write = [member, name](const ExperimentConfig& c, json& j) {
    if constexpr (std::is_same_v<T, double>) {
      // JSON has no infinity; null stands for an unbounded value.
      if (std::isinf(c.*member)) {
        j[name] = nullptr;
        return;
      }
    }
    j[name] = c.*member;
  };
  k.copy = [member](ExperimentConfig& dst, const ExperimentConfig& src) { dst.*member = src.*member; };
  k.identity = identity;
  return k;
}

const std::vector<Key>& keys() {
  static const std::vector<Key> k{
      key("N", &ExperimentConfig::N),
      key("alpha", &ExperimentConfig::alpha),
      key("T", &ExperimentConfig::T),
      key("beta", &ExperimentConfig::beta),
      key("delta", &ExperimentConfig::delta),
      key("kappa", &ExperimentConfig::kappa),
      key("epsilon_ball", &ExperimentConfig::epsilon_ball),
      key("replicas", &ExperimentConfig::replicas),
      key("seed", &ExperimentConfig::seed),
      key("field", &ExperimentConfig::field),
      key("sizes", &ExperimentConfig::sizes),
      key("max_events", &ExperimentConfig::max_events),
      key("ot", &ExperimentConfig::ot),
      key("snap_dt", &ExperimentConfig::snap_dt),
      key("target", &ExperimentConfig::target),
      key("unbiased", &ExperimentConfig::unbiased),
      key("depth", &ExperimentConfig::depth),
      key("tilt_band", &ExperimentConfig::tilt_band),
      key("field_scale", &ExperimentConfig::field_scale),
      key("snapshots", &ExperimentConfig::snapshots),
      key("radii", &ExperimentConfig::radii),
      key("count", &ExperimentConfig::count),
      key("M", &ExperimentConfig::M),
      key("length_mode", &ExperimentConfig::length_mode),
      key("log_out", &ExperimentConfig::log_out),
      key("threads", &ExperimentConfig::threads, false),
      key("output", &ExperimentConfig::output, false),
      key("format", &ExperimentConfig::format, false),
  };
  return k;
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void load_config_file(const std::string& path, ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [name, value] : j.items()) {
    if (name == "experiment") continue;
    bool found = false;
    for (const Key& k : keys()) {
      if (k.name != name) continue;
      try {
        k.read(cfg, value);
      } catch (const json::exception& e) {
        throw UsageError("config key '" + name + "' has the wrong type");
      }
      found = true;
    }
    if (!found) throw UsageError("unknown config key '" + name + "'");
  }
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw UsageError("invalid configuration: " + what);
  };
  require(c.N >= 2, "N must be >= 2");
  require(c.alpha > 1.0 && c.alpha < 2.0, "alpha must lie in (1, 2)");
  require(c.T > 0.0, "T must be positive");
  require(c.beta > 0.0 && c.beta < 0.25, "beta must lie in (0, 1/4)");
  require(c.delta > 0.0 && c.delta <= c.T, "delta must lie in (0, T]");
  require(c.kappa > 0.0 && c.kappa < 1.0, "kappa must lie in (0, 1)");
  require(c.epsilon_ball >= 0.0, "epsilon_ball must be nonnegative");
  require(c.replicas >= 1, "replicas must be >= 1");
  require(!c.sizes.empty(), "sizes must be nonempty");
  for (int n : c.sizes) require(n >= 2, "every size must be >= 2");
  require(c.ot == "exact" || c.ot == "entropic", "ot must be exact or entropic");
  require(c.snap_dt >= 0.0, "snap_dt must be nonnegative");
  require(c.format == "json" || c.format == "csv", "format must be json or csv");
  require(c.depth >= 0 && c.depth <= 20, "depth must lie in [0, 20]");
  require(c.tilt_band >= 0, "tilt_band must be nonnegative");
  require(c.length_mode == "fixed" || c.length_mode == "poissonized", "length_mode must be fixed or poissonized");
  require(c.target == "reverse" || c.target == "identity", "target must be reverse or identity");
}

json config_identity(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  for (const Key& k : keys())
    if (k.identity) k.write(c, j);
  return j;
}

// Metadata embedded in every artifact.
struct Provenance {
  std::string hash;
  std::string git;
  std::uint64_t seed;
};

Provenance provenance(const ExperimentConfig& c) {
  return {pl::fnv1a_hex(config_identity(c).dump()), pl::git_describe(), c.seed};
}

void emit(const ExperimentConfig& c, const std::string& content) {
  if (c.output.empty()) {
    std::cout << content;
  } else {
    pl::write_file_atomic(c.output, content);
  }
}

void emit_json(const ExperimentConfig& c, json result) {
  const Provenance p = provenance(c);
  result["config_hash"] = p.hash;
  result["git_describe"] = p.git;
  result["seed"] = p.seed;
  result["config"] = config_identity(c);
  emit(c, result.dump(2) + "\n");
}

std::string csv_header(const ExperimentConfig& c) {
  const Provenance p = provenance(c);
  std::ostringstream out;
  out << "# experiment=" << c.experiment << "\n# config_hash=" << p.hash << "\n# git_describe=" << p.git
      << "\n# seed=" << p.seed << "\n";
  return out.str();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

// Table output in the configured format: rows of named numeric columns.
void emit_table(const ExperimentConfig& c, const std::vector<std::string>& columns,
                const std::vector<std::vector<double>>& rows, json extra = json::object()) {
  if (c.format == "csv") {
    std::ostringstream out;
    out << csv_header(c);
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << fmt(r[i]);
      out << "\n";
    }
    emit(c, out.str());
    return;
  }
  json table = json::array();
  for (const auto& r : rows) {
    json row;
    for (std::size_t i = 0; i < columns.size(); ++i) row[columns[i]] = r[i];
    table.push_back(row);
  }
  extra["rows"] = table;
  emit_json(c, extra);
}

pl::FieldPtr experiment_field(const ExperimentConfig& c) { return pl::lln_field(c.field, c.beta, c.delta, c.T); }

int run_simulate(const ExperimentConfig& c) {
  pl::EventLog log;
  pl::SimulationOptions so;
  so.max_events = c.max_events;
  if (c.unbiased) {
    log = pl::simulate_unbiased(c.N, c.alpha, c.T, c.seed, nullptr, so);
  } else {
    const pl::FieldPtr field = experiment_field(c);
    const pl::RateTable rates = pl::discrete_rates(*field, c.N, c.alpha, c.delta, c.T);
    log = pl::simulate_biased(rates, c.T, c.seed, nullptr, so);
  }
  if (!c.log_out.empty()) {
    std::ostringstream bin;
    pl::write_event_log(bin, log);
    pl::write_file_atomic(c.log_out, bin.str());
  }
  if (c.format == "csv") {
    const double dt = c.snap_dt > 0.0 ? c.snap_dt : c.T / 10.0;
    std::vector<double> times;
    for (int k = 0; static_cast<double>(k) * dt <= c.T * (1.0 + 1e-12); ++k) times.push_back(std::min(c.T, k * dt));
    std::ostringstream out;
    out << csv_header(c);
    pl::write_snapshot_csv(out, log, times);
    emit(c, out.str());
    return 0;
  }
  json r;
  r["events"] = log.events.size();
  r["swaps"] = log.swap_count;
  r["discarded_color_events"] = log.discarded_color_events;
  r["expected_swaps_unbiased"] = (c.N - 1) * 0.5 * std::pow(c.N, c.alpha) * c.T;
  emit_json(c, r);
  return 0;
}

int run_lln(const ExperimentConfig& c) {
  pl::LlnOptions o;
  o.sizes = c.sizes;
  o.field = c.field;
  o.alpha = c.alpha;
  o.horizon = c.T;
  o.beta = c.beta;
  o.delta = c.delta;
  o.replicas = c.replicas;
  o.seed = c.seed;
  o.threads = c.threads;
  o.max_events = c.max_events;
  std::vector<std::vector<double>> rows;
  for (const pl::LlnRow& r : pl::lln_experiment(o))
    rows.push_back({static_cast<double>(r.n), r.path_distance, r.permuton_distance, static_cast<double>(r.events)});
  emit_table(c, {"N", "path_distance", "permuton_distance", "events"}, rows);
  return 0;
}

int run_rare_event(const ExperimentConfig& c) {
  const pl::FieldPtr field = experiment_field(c);
  const pl::RateTable rates = pl::discrete_rates(*field, c.N, c.alpha, c.delta, c.T);
  const pl::Permutation target =
      c.target == "reverse" ? pl::Permutation::reverse(c.N) : pl::Permutation::identity(c.N);
  pl::PermutonBall ball{pl::empirical_permuton(target), c.epsilon_ball};
  if (c.ot == "entropic") ball.target = pl::Permuton2D::binned(ball.target, 128);
  pl::RareEventOptions o;
  o.n = c.N;
  o.alpha = c.alpha;
  o.horizon = c.T;
  o.replicas = c.replicas;
  o.seed = c.seed;
  o.threads = c.threads;
  o.max_events = c.max_events;
  const pl::RareEventEstimate e = pl::rare_event_log_probability(rates, ball, o);
  json r;
  r["estimate_log"] = e.log_probability;
  r["stderr_log"] = std::isfinite(e.std_error_log) ? json(e.std_error_log) : json(nullptr);
  r["n_hits"] = e.hits;
  r["rate"] = e.rate;
  r["gamma"] = e.gamma;
  emit_json(c, r);
  return 0;
}

int run_martingale_check(const ExperimentConfig& c) {
  pl::MeanOneOptions o;
  o.n = c.N;
  o.alpha = c.alpha;
  o.horizon = c.T;
  o.replicas = c.replicas;
  o.seed = c.seed;
  o.threads = c.threads;
  o.field_scale = c.field_scale;
  o.tilt_band = c.tilt_band;
  const pl::MeanOneResult rn = pl::radon_nikodym_mean_one(o);
  const pl::MeanOneResult mg = pl::martingale_mean_one(o);
  auto to_json = [](const pl::MeanOneResult& m) {
    return json{{"mean", m.mean}, {"stderr", m.std_error}, {"z", m.z}, {"replicas", m.replicas}};
  };
  json r;
  r["radon_nikodym"] = to_json(rn);
  r["martingale"] = to_json(mg);
  const bool ok = std::abs(rn.z) <= 3.0 && std::abs(mg.z) <= 3.0;
  r["within_3_stderr"] = ok;
  emit_json(c, r);
  return ok ? 0 : 1;
}

int run_one_block(const ExperimentConfig& c) {
  pl::OneBlockOptions o;
  o.n = c.N;
  o.alpha = c.alpha;
  o.horizon = c.T;
  o.snapshots = c.snapshots;
  o.radii = c.radii;
  o.seed = c.seed;
  o.max_events = c.max_events;
  const pl::OneBlockRun run = pl::one_block_experiment(o);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < run.radii.size(); ++i)
    rows.push_back({static_cast<double>(run.radii[i]), run.results[i].time_averaged, run.results[i].per_snapshot});
  emit_table(c, {"l", "time_averaged", "per_snapshot"}, rows, json{{"swaps", run.events}});
  return 0;
}

int run_stationarity(const ExperimentConfig& c) {
  const pl::FieldPtr field = experiment_field(c);
  const pl::RateTable rates = pl::discrete_rates(*field, c.N, c.alpha, c.delta, c.T, false);
  const double residual = pl::verify_stationarity(rates);
  json r;
  r["residual"] = residual;
  r["epochs"] = rates.epochs();
  r["max_abs_v"] = rates.max_abs_v();
  r["max_abs_r"] = rates.max_abs_r();
  r["positivity_margin"] = 1.0 - rates.epsilon() * rates.max_edge_bias();
  r["pass"] = residual <= 1e-12;
  emit_json(c, r);
  return residual <= 1e-12 ? 0 : 1;
}

int run_energy(const ExperimentConfig& c) {
  const pl::SineEnergyReport e = pl::sine_process_energy(c.replicas, c.depth, c.seed, c.threads);
  json r;
  r["sine_energy_symmetric_chart"] = e.symmetric;
  r["sine_energy_unit_chart"] = e.unit;
  r["reverse_permutation_energy"] = pl::permutation_energy(pl::Permutation::reverse(c.N));
  emit_json(c, r);
  return 0;
}

int run_networks(const ExperimentConfig& c) {
  json r;
  r["mode"] = c.count;
  if (c.count == "stanley") {
    r["count"] = pl::stanley_count(c.N).str();
  } else if (c.count == "exact") {
    r["count"] = pl::enumerate_sorting_networks(c.N).str();
    r["stanley"] = pl::stanley_count(c.N).str();
  } else if (c.count == "relaxed-exact") {
    const std::uint64_t m = c.M ? c.M : pl::relaxed_length(c.N, c.kappa);
    const pl::BigInt count = pl::relaxed_count_exact(c.N, m, c.epsilon_ball);
    r["M"] = m;
    r["count"] = count.str();
    r["log_count"] = count > 0 ? std::log(count.convert_to<double>()) : -std::numeric_limits<double>::infinity();
  } else if (c.count == "relaxed-mc") {
    pl::RelaxedEstimateOptions o;
    o.n = c.N;
    o.kappa = c.kappa;
    o.delta = c.epsilon_ball;
    o.replicas = c.replicas;
    o.seed = c.seed;
    o.threads = c.threads;
    o.length = c.M;
    o.field_scale = c.field_scale;
    o.mode = c.length_mode == "fixed" ? pl::LengthMode::kFixed : pl::LengthMode::kPoissonized;
    const pl::RelaxedEstimate e = pl::relaxed_count_estimate(o);
    const double ngamma = std::pow(static_cast<double>(c.N), 2.0 - c.kappa);
    r["M"] = e.length;
    r["log_count"] = e.log_count;
    r["stderr"] = std::isfinite(e.std_error) ? json(e.std_error) : json(nullptr);
    r["n_hits"] = e.hits;
    r["leading_order"] = e.log_probability / ngamma;
    r["sine_energy_symmetric_chart"] = std::acos(-1.0) * std::acos(-1.0) / 6.0;
    r["sine_energy_unit_chart"] = std::acos(-1.0) * std::acos(-1.0) / 24.0;
    r["length_law"] = c.length_mode == "fixed"
                          ? "walk stopped at its M-th swap; exact for the uniform M-letter word"
                          : "Poisson number of swaps on [0, 1]";
  } else {
    throw UsageError("networks mode must be stanley, exact, relaxed-exact or relaxed-mc");
  }
  emit_json(c, r);
  return 0;
}

std::string usage() {
  std::ostringstream out;
  out << "usage: permuton-lab <experiment> [options]\n\nexperiments:\n";
  for (const auto& e : kExperiments) out << "  " << e << "\n";
  out << "\nRun 'permuton-lab <experiment> --help' for the options of one experiment.\n";
  return out.str();
}

// Registers every config flag on a subcommand; `flags` receives the values
// and `given` records which were supplied.
struct FlagSet {
  ExperimentConfig values;
  std::vector<std::pair<CLI::Option*, const Key*>> options;
  std::string config_file;
};

const Key& find_key(const std::string& name) {
  for (const Key& k : keys())
    if (k.name == name) return k;
  throw std::logic_error("no config key " + name);
}

void add_flags(CLI::App* sub, FlagSet& f) {
  auto& v = f.values;
  auto reg = [&](CLI::Option* o, const std::string& name) { f.options.push_back({o, &find_key(name)}); };
  sub->add_option("--config", f.config_file, "JSON config file");
  reg(sub->add_option("--N", v.N, "number of particles"), "N");
  reg(sub->add_option("--alpha", v.alpha, "time speed-up exponent in (1,2)"), "alpha");
  reg(sub->add_option("--T", v.T, "time horizon"), "T");
  reg(sub->add_option("--beta", v.beta, "boundary smoothing width in (0,1/4)"), "beta");
  reg(sub->add_option("--delta", v.delta, "epoch length of the piecewise-time field"), "delta");
  reg(sub->add_option("--kappa", v.kappa, "relaxed-network exponent"), "kappa");
  reg(sub->add_option("--epsilon-ball", v.epsilon_ball, "ball radius (W1)"), "epsilon_ball");
  reg(sub->add_option("--replicas", v.replicas, "number of replicas or samples"), "replicas");
  reg(sub->add_option("--seed", v.seed, "RNG seed"), "seed");
  reg(sub->add_option("--field", v.field, "field name: zero, sine, sine-symmetric, csv:<path>"), "field");
  reg(sub->add_option("--sizes", v.sizes, "list of N values")->delimiter(','), "sizes");
  reg(sub->add_option("--max-events", v.max_events, "event budget per simulation"), "max_events");
  reg(sub->add_flag("--ot-exact{exact},--ot-entropic{entropic}", v.ot, "grid transport solver"), "ot");
  reg(sub->add_option("--snap-dt", v.snap_dt, "snapshot spacing"), "snap_dt");
  reg(sub->add_option("--target", v.target, "rare-event target: reverse or identity"), "target");
  reg(sub->add_flag("--unbiased", v.unbiased, "simulate the unbiased process"), "unbiased");
  reg(sub->add_option("--depth", v.depth, "dyadic partition depth"), "depth");
  reg(sub->add_option("--tilt-band", v.tilt_band, "martingale tilt lattice band"), "tilt_band");
  reg(sub->add_option("--field-scale", v.field_scale, "amplitude of the sine stream"), "field_scale");
  reg(sub->add_option("--snapshots", v.snapshots, "one-block snapshot count"), "snapshots");
  reg(sub->add_option("--radii", v.radii, "one-block box radii")->delimiter(','), "radii");
  reg(sub->add_flag("--stanley{stanley},--exact{exact},--relaxed-exact{relaxed-exact},--relaxed-mc{relaxed-mc}",
                    v.count, "network counting mode"),
      "count");
  reg(sub->add_option("--M", v.M, "relaxed network length (default from kappa)"), "M");
  reg(sub->add_option("--length-mode", v.length_mode, "fixed or poissonized"), "length_mode");
  reg(sub->add_option("--log-out", v.log_out, "binary event log path"), "log_out");
  reg(sub->add_option("--threads", v.threads, "worker threads (default $PERMUTON_LAB_THREADS)"), "threads");
  reg(sub->add_option("--output,-o", v.output, "output path (default stdout)"), "output");
  reg(sub->add_option("--format", v.format, "csv or json"), "format");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << usage();
    return kUsageError;
  }
  const std::string first = argv[1];
  if (first == "--help" || first == "-h") {
    std::cout << usage();
    return 0;
  }
  if (std::find(kExperiments.begin(), kExperiments.end(), first) == kExperiments.end()) {
    std::cerr << "unknown experiment '" << first << "'\n\n" << usage();
    return kUsageError;
  }

  CLI::App app{"permuton-lab: interchange-process large-deviation experiments"};
  app.require_subcommand(1);
  FlagSet flags;
  std::string action;
  for (const auto& name : kExperiments) {
    CLI::App* sub = app.add_subcommand(name);
    add_flags(sub, flags);
    if (name == "networks") sub->add_option("action", action, "optional action word 'count'");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }
  if (!action.empty() && action != "count") {
    std::cerr << "unknown networks action '" << action << "'\n";
    return kUsageError;
  }

  ExperimentConfig cfg;
  cfg.experiment = first;
  if (first == "lln") {
    const pl::LlnOptions lln;
    cfg.alpha = lln.alpha;
    cfg.beta = lln.beta;
    cfg.replicas = lln.replicas;
  }
  try {
    if (!flags.config_file.empty()) load_config_file(flags.config_file, cfg);
    for (const auto& [opt, k] : flags.options)
      if (opt->count() > 0) k->copy(cfg, flags.values);
    validate(cfg);
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (first == "simulate") return run_simulate(cfg);
    if (first == "lln") return run_lln(cfg);
    if (first == "rare-event") return run_rare_event(cfg);
    if (first == "martingale-check") return run_martingale_check(cfg);
    if (first == "one-block") return run_one_block(cfg);
    if (first == "stationarity-check") return run_stationarity(cfg);
    if (first == "energy") return run_energy(cfg);
    if (first == "networks") return run_networks(cfg);
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsageError;
}
