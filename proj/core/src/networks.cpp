#include "permuton_lab/networks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "permuton_lab/estimators.hpp"
#include "permuton_lab/euler.hpp"
#include "permuton_lab/interchange.hpp"
#include "permuton_lab/parallel.hpp"
#include "permuton_lab/transport.hpp"

namespace permuton_lab {

namespace {

constexpr std::size_t sz(int i) { return static_cast<std::size_t>(i); }
constexpr int kMaxExactN = 6;
constexpr double kDistanceSlack = 1e-12;

double distance_to_reverse(const Permutation& p) {
  return wasserstein_points(empirical_permuton(p), empirical_permuton(Permutation::reverse(p.size())));
}

}  // namespace

void TranspositionWord::validate() const {
  if (n < 2) throw Error("transposition word needs N >= 2");
  for (int l : letters)
    if (l < 1 || l > n - 1) throw Error("transposition letter out of range");
}

Permutation TranspositionWord::compose() const {
  validate();
  Configuration c = Configuration::identity(n, {});
  for (int l : letters) c.swap_sites(l);
  return c.positions_as_permutation();
}

BigInt stanley_count(int n) {
  if (n < 2) throw Error("stanley_count needs N >= 2");
  const int m = n * (n - 1) / 2;
  BigInt num = 1;
  for (int k = 2; k <= m; ++k) num *= k;
  BigInt den = 1;
  for (int j = 1; j <= n - 1; ++j)
    for (int e = 0; e < n - j; ++e) den *= 2 * j - 1;
  if (num % den != 0) throw Error("Stanley quotient is not integral");
  return num / den;
}

WalkVector::WalkVector(int n) : n_(n) {
  if (n < 2 || n > 8) throw Error("walk vectors are limited to 2 <= N <= 8");
  std::vector<int> m(sz(n));
  std::iota(m.begin(), m.end(), 1);
  do {
    perms_.emplace_back(m);
  } while (std::next_permutation(m.begin(), m.end()));
  next_.resize(perms_.size());
  for (std::size_t r = 0; r < perms_.size(); ++r) {
    next_[r].resize(sz(n - 1));
    for (int e = 1; e < n; ++e) {
      std::vector<int> q = perms_[r].mapping();
      // Swapping the particles on sites e and e + 1.
      for (int& site : q) {
        if (site == e) {
          site = e + 1;
        } else if (site == e + 1) {
          site = e;
        }
      }
      next_[r][sz(e - 1)] = rank(Permutation(std::move(q)));
    }
  }
  weights_.assign(perms_.size(), 0);
  weights_[0] = 1;
}

std::size_t WalkVector::rank(const Permutation& p) const {
  // Lexicographic rank via the Lehmer code.
  const auto& m = p.mapping();
  std::size_t r = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::size_t smaller = 0;
    for (std::size_t j = i + 1; j < m.size(); ++j) smaller += m[j] < m[i] ? 1 : 0;
    r = r * (m.size() - i) + smaller;
  }
  return r;
}

void WalkVector::step() {
  std::vector<BigInt> next(weights_.size(), 0);
  for (std::size_t r = 0; r < weights_.size(); ++r) {
    if (weights_[r] == 0) continue;
    for (std::size_t to : next_[r]) next[to] += weights_[r];
  }
  weights_ = std::move(next);
  ++steps_;
}

BigInt WalkVector::total() const {
  BigInt t = 0;
  for (const BigInt& w : weights_) t += w;
  return t;
}

BigInt enumerate_sorting_networks(int n) {
  if (n < 2 || n > kMaxExactN) throw Error("enumeration is limited to 2 <= N <= 6");
  WalkVector walks(n);
  const std::size_t order = walks.order();
  std::vector<long long> inv(order);
  for (std::size_t r = 0; r < order; ++r) inv[r] = walks.permutation(r).inversions();
  std::vector<std::size_t> by_length(order);
  std::iota(by_length.begin(), by_length.end(), std::size_t{0});
  std::stable_sort(by_length.begin(), by_length.end(), [&](std::size_t a, std::size_t b) { return inv[a] < inv[b]; });
  std::vector<BigInt> count(order, 0);
  count[walks.rank(Permutation::identity(n))] = 1;
  // Count length-increasing words, i.e. reduced words, reaching each element.
  for (std::size_t r : by_length) {
    if (count[r] == 0) continue;
    std::vector<int> m = walks.permutation(r).mapping();
    for (int e = 1; e < n; ++e) {
      std::vector<int> q = m;
      for (int& site : q) {
        if (site == e) {
          site = e + 1;
        } else if (site == e + 1) {
          site = e;
        }
      }
      const std::size_t to = walks.rank(Permutation(std::move(q)));
      if (inv[to] == inv[r] + 1) count[to] += count[r];
    }
  }
  return count[walks.rank(Permutation::reverse(n))];
}

std::uint64_t for_each_sorting_network(int n, const std::function<void(const std::vector<int>&)>& visit) {
  if (n < 2 || n > kMaxExactN) throw Error("enumeration is limited to 2 <= N <= 6");
  const int length = n * (n - 1) / 2;
  std::vector<int> at_site(sz(n) + 1);
  std::iota(at_site.begin(), at_site.end(), 0);
  std::vector<int> word;
  std::uint64_t count = 0;
  std::function<void()> dfs = [&] {
    if (static_cast<int>(word.size()) == length) {
      ++count;
      if (visit) visit(word);
      return;
    }
    for (int e = 1; e < n; ++e) {
      // Only letters that create an inversion keep the word reduced.
      if (at_site[sz(e)] > at_site[sz(e + 1)]) continue;
      std::swap(at_site[sz(e)], at_site[sz(e + 1)]);
      word.push_back(e);
      dfs();
      word.pop_back();
      std::swap(at_site[sz(e)], at_site[sz(e + 1)]);
    }
  };
  dfs();
  return count;
}

std::vector<double> distances_to_reverse(const WalkVector& walks) {
  std::vector<double> d(walks.order());
  for (std::size_t r = 0; r < walks.order(); ++r) d[r] = distance_to_reverse(walks.permutation(r));
  return d;
}

BigInt relaxed_count_exact(int n, std::size_t m, double delta) {
  if (n > kMaxExactN) throw Error("exact relaxed counting is limited to N <= 6");
  WalkVector walks(n);
  for (std::size_t k = 0; k < m; ++k) walks.step();
  const std::vector<double> d = distances_to_reverse(walks);
  BigInt total = 0;
  for (std::size_t r = 0; r < walks.order(); ++r)
    if (d[r] <= delta + kDistanceSlack) total += walks.weights()[r];
  return total;
}

bool is_delta_relaxed(const TranspositionWord& word, double delta) {
  return distance_to_reverse(word.compose()) <= delta + kDistanceSlack;
}

std::uint64_t relaxed_length(int n, double kappa) {
  const double nd = n;
  return static_cast<std::uint64_t>(std::floor(0.5 * std::pow(nd, 1.0 + kappa) * (nd - 1.0)));
}

RelaxedEstimate relaxed_count_estimate(const RelaxedEstimateOptions& opt) {
  if (opt.replicas < 100) throw Error("relaxed-count estimation needs at least 100 replicas");
  const int n = opt.n;
  const double alpha = 1.0 + opt.kappa;
  RelaxedEstimate out;
  out.length = opt.length ? opt.length : relaxed_length(n, opt.kappa);
  const double log_walks = static_cast<double>(out.length) * std::log(static_cast<double>(n - 1));
  if (std::isinf(opt.delta)) {
    out.log_count = log_walks;
    out.hits = opt.replicas;
    return out;
  }
  const FieldPtr sine = sine_field();
  const double scale = opt.field_scale;
  const RateTable rates = discrete_rates(
      [&](double t, double x, double phi) { return scale * sine->stream(t, x, phi); }, n, alpha, 1.0, 1.0, true);

  std::vector<double> table;
  std::optional<WalkVector> walks;
  if (n <= 8) {
    walks.emplace(n);
    table = distances_to_reverse(*walks);
  }
  std::vector<double> log_terms(opt.replicas, -std::numeric_limits<double>::infinity());
  std::vector<char> hit(opt.replicas, 0);
  parallel_for(opt.replicas, resolve_threads(opt.threads), [&](std::size_t r) {
    ReplicaStream init_rng(mix64(opt.seed) ^ 0x2545f4914f6cdd1dULL, r);
    const Configuration init = Configuration::identity_uniform_colors(n, init_rng);
    RadonNikodymAccumulator acc(rates);
    SimulationOptions so;
    so.replica = r;
    so.record = false;
    so.observer = &acc;
    if (opt.mode == LengthMode::kFixed) so.stop_after_swaps = out.length;
    const EventLog log = simulate_biased(rates, 1.0, opt.seed, &init, so);
    if (opt.mode == LengthMode::kFixed && log.swap_count != out.length) throw Error("walk stopped early");
    const Permutation p = acc.state().positions_as_permutation();
    const double d = walks ? table[walks->rank(p)] : distance_to_reverse(p);
    if (d <= opt.delta + kDistanceSlack) {
      hit[r] = 1;
      log_terms[r] = acc.weight().value;
    }
  });
  for (char h : hit) out.hits += h ? 1 : 0;
  const MeanEstimate m = log_mean_exp(log_terms);
  out.log_probability = m.mean;
  out.log_count = log_walks + m.mean;
  out.std_error = out.hits ? m.std_error : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace permuton_lab
