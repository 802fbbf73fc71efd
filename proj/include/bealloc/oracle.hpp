#pragma once

// Ground truth over the equiprobable configuration set
//   M = { (N_2..N_s) >= 0 : sum N_j = N, sum N_j lambda_j <= E }.
// Membership is always decided in exact scaled-integer arithmetic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <unordered_set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bealloc/error.hpp"
#include "bealloc/model.hpp"
#include "bealloc/solver.hpp"

namespace bealloc {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

inline constexpr std::uint64_t kDefaultVisitCap = 100'000'000;

struct Composition {
  std::vector<std::int64_t> parts;  // N_2..N_s
};

struct EnsembleStats {
  BigInt total_count;
  std::vector<BigRational> cumulative_mean;  // entry l-2 is the mean of S_l = sum_{j=2}^l N_j
  BigInt deviating_count;
  double deviation_fraction = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;
  double center = 0.0;
  std::size_t l = 0;
};

struct SampleResult {
  std::vector<Composition> samples;
  std::uint64_t trials = 0;
  double acceptance_rate = 0.0;
};

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

/// Number of compositions of N into s-1 parts, ignoring the budget.
inline BigInt unconstrained_count(const ProblemInstance& inst) {
  return binomial(static_cast<std::uint64_t>(inst.total_increments) + inst.modes() - 1, inst.modes() - 1);
}

inline Scaled composition_energy(const ProblemInstance& inst, std::span<const std::int64_t> parts) {
  Scaled e = 0;
  for (std::size_t m = 0; m < parts.size(); ++m) e += parts[m] * inst.mode_weight_scaled(m);
  return e;
}

namespace detail {

template <class Visitor>
struct Enumerator {
  const ProblemInstance& inst;
  Visitor& visit;
  std::uint64_t cap;
  std::vector<Scaled> weight;
  std::vector<std::int64_t> parts;
  Scaled budget = 0;
  Scaled cheapest = 0;
  std::uint64_t visits = 0;

  Enumerator(const ProblemInstance& i, Visitor& v, std::uint64_t c) : inst(i), visit(v), cap(c) {
    weight.resize(inst.modes());
    for (std::size_t m = 0; m < weight.size(); ++m) weight[m] = inst.mode_weight_scaled(m);
    parts.assign(weight.size(), 0);
    budget = inst.effective_budget;
    cheapest = weight.back();
  }

  void run() {
    if (inst.total_increments * cheapest > budget) return;
    descend(0, inst.total_increments, 0);
  }

  void descend(std::size_t m, std::int64_t remaining, Scaled energy) {
    if (m + 1 == weight.size()) {
      parts[m] = remaining;
      if (++visits > cap)
        throw Error(ErrorCode::CapExceeded, "more than " + std::to_string(cap) + " configurations; use sampling");
      visit(std::span<const std::int64_t>(parts), energy + remaining * weight[m]);
      return;
    }
    // The cheapest completion puts everything left on mode s; it grows with v.
    for (std::int64_t v = 0; v <= remaining; ++v) {
      const Scaled e = energy + v * weight[m];
      if (e + (remaining - v) * cheapest > budget) break;
      parts[m] = v;
      descend(m + 1, remaining - v, e);
    }
    parts[m] = 0;
  }
};

inline BigInt to_big(unsigned __int128 v) {
  BigInt r = static_cast<std::uint64_t>(v >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(v);
  return r;
}

}  // namespace detail

/// Calls visit(parts, energy) for every composition in M, in lexicographic
/// order of (N_2, ..., N_s). Branches whose cheapest completion already
/// exceeds E are pruned. Returns the number of visits.
template <class Visitor>
std::uint64_t enumerate(const ProblemInstance& inst, Visitor&& visit, std::uint64_t cap = kDefaultVisitCap) {
  detail::Enumerator<std::remove_reference_t<Visitor>> e(inst, visit, cap);
  e.run();
  return e.visits;
}

inline BigInt count_configurations(const ProblemInstance& inst, std::uint64_t cap = kDefaultVisitCap) {
  return enumerate(inst, [](std::span<const std::int64_t>, Scaled) {}, cap);
}

/// Exact histogram of S_l over M: entry k counts compositions with S_l = k.
inline std::vector<std::uint64_t> cumulative_distribution(const ProblemInstance& inst, std::size_t l,
                                                          std::uint64_t cap = kDefaultVisitCap) {
  if (l < 2 || l > inst.enterprises()) throw Error(ErrorCode::IndexRange, "l = " + std::to_string(l) + " out of range");
  std::vector<std::uint64_t> hist(static_cast<std::size_t>(inst.total_increments) + 1, 0);
  enumerate(
      inst,
      [&](std::span<const std::int64_t> parts, Scaled) {
        std::int64_t s = 0;
        for (std::size_t m = 0; m + 1 < l; ++m) s += parts[m];
        ++hist[static_cast<std::size_t>(s)];
      },
      cap);
  return hist;
}

namespace detail {

inline EnsembleStats ensemble_pass(const ProblemInstance& inst, std::size_t l, double center, double delta,
                                   std::uint64_t cap) {
  const std::size_t modes = inst.modes();
  std::vector<unsigned __int128> sums(modes, 0);
  std::uint64_t deviating = 0;
  const std::uint64_t total = enumerate(
      inst,
      [&](std::span<const std::int64_t> parts, Scaled) {
        std::int64_t running = 0;
        for (std::size_t m = 0; m < modes; ++m) {
          running += parts[m];
          sums[m] += static_cast<unsigned __int128>(running);
          if (m + 2 == l && std::abs(static_cast<double>(running) - center) >= delta) ++deviating;
        }
      },
      cap);

  EnsembleStats st;
  st.total_count = total;
  st.deviating_count = deviating;
  st.l = l;
  st.center = center;
  st.delta = delta;
  if (total > 0) {
    st.deviation_fraction = static_cast<double>(deviating) / static_cast<double>(total);
    for (std::size_t m = 0; m < modes; ++m) st.cumulative_mean.emplace_back(to_big(sums[m]), BigInt(total));
  }
  return st;
}

}  // namespace detail

/// Total count and per-l cumulative means over M, without a deviation band.
inline EnsembleStats ensemble_summary(const ProblemInstance& inst, std::uint64_t cap = kDefaultVisitCap) {
  return detail::ensemble_pass(inst, 0, 0.0, std::numeric_limits<double>::infinity(), cap);
}

/// Fraction of M whose S_l deviates from the occupancy prediction by at least
/// delta = N^{3/4 + epsilon}, together with the per-l means.
inline EnsembleStats cumulative_stats(const ProblemInstance& inst, const ThermoParams& params, std::size_t l,
                                      double epsilon, std::uint64_t cap = kDefaultVisitCap) {
  const double center = predicted_cumulative(params, inst, l);
  const double delta = std::pow(inst.n(), 0.75 + epsilon);
  EnsembleStats st = detail::ensemble_pass(inst, l, center, delta, cap);
  if (st.total_count == 0) throw Error(ErrorCode::BudgetInfeasible, "configuration set is empty (E < N*lambda_s)");
  st.epsilon = epsilon;
  return st;
}

/// (1/|M|) * sum over the low-energy shell (energy <= E - N^{1/2+epsilon})
/// of exp(-beta * energy).
inline double lemma3_quantity(const ProblemInstance& inst, double beta, double epsilon,
                              std::uint64_t cap = kDefaultVisitCap) {
  const long double threshold = static_cast<long double>(inst.effective_budget) -
                                std::pow(static_cast<long double>(inst.n()), 0.5L + epsilon) * inst.scale();
  const double inv_scale = 1.0 / static_cast<double>(inst.scale());
  double log_max = -std::numeric_limits<double>::infinity();
  double acc = 0.0;  // sum of exp(term - log_max)
  const std::uint64_t total = enumerate(
      inst,
      [&](std::span<const std::int64_t>, Scaled energy) {
        if (static_cast<long double>(energy) > threshold) return;
        const double term = -beta * (static_cast<double>(energy) * inv_scale);
        if (term > log_max) {
          acc = acc * std::exp(log_max - term) + 1.0;
          log_max = term;
        } else {
          acc += std::exp(term - log_max);
        }
      },
      cap);
  if (total == 0) throw Error(ErrorCode::BudgetInfeasible, "configuration set is empty (E < N*lambda_s)");
  if (acc == 0.0) return 0.0;
  return std::exp(log_max + std::log(acc) - std::log(static_cast<double>(total)));
}

namespace detail {

// Uniform composition of n into k parts: a uniform (k-1)-subset of the
// n+k-1 stars-and-bars positions (Floyd's algorithm), read off as gaps.
template <class Rng>
void draw_composition(std::int64_t n, std::size_t k, Rng& rng, std::vector<std::int64_t>& parts,
                      std::vector<std::uint64_t>& bars) {
  const std::uint64_t slots = static_cast<std::uint64_t>(n) + k - 1;
  const std::size_t nbars = k - 1;
  bars.clear();
  std::unordered_set<std::uint64_t> chosen;
  for (std::uint64_t j = slots - nbars; j < slots; ++j) {
    std::uniform_int_distribution<std::uint64_t> pick(0, j);
    const std::uint64_t t = pick(rng);
    const std::uint64_t v = chosen.insert(t).second ? t : j;
    if (v == j) chosen.insert(j);
    bars.push_back(v);
  }
  std::sort(bars.begin(), bars.end());
  parts.assign(k, 0);
  std::uint64_t prev = 0;
  for (std::size_t i = 0; i < nbars; ++i) {
    parts[i] = static_cast<std::int64_t>(bars[i] - prev);
    prev = bars[i] + 1;
  }
  parts[k - 1] = static_cast<std::int64_t>(slots - prev);
}

}  // namespace detail

inline constexpr std::uint64_t kPilotTrials = 100'000;
inline constexpr double kMinAcceptance = 1e-4;

/// Uniform draws from M by rejection from all compositions of N. A pilot of
/// up to 1e5 trials on its own stream rejects instances whose acceptance
/// rate is below 1e-4. Deterministic for a fixed seed.
inline SampleResult sample_uniform(const ProblemInstance& inst, std::uint64_t count, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::InvalidInput, "sample count must be at least 1");
  const std::size_t k = inst.modes();
  std::vector<std::int64_t> parts;
  std::vector<std::uint64_t> bars;
  auto accepted = [&] { return composition_energy(inst, parts) <= inst.effective_budget; };

  std::seed_seq pilot_seq{seed, std::uint64_t{0x70696c6f74}};
  std::mt19937_64 pilot(pilot_seq);
  std::uint64_t pilot_hits = 0;
  for (std::uint64_t t = 0; t < kPilotTrials && pilot_hits < 10; ++t) {
    detail::draw_composition(inst.total_increments, k, pilot, parts, bars);
    if (accepted()) ++pilot_hits;
  }
  if (static_cast<double>(pilot_hits) < kMinAcceptance * static_cast<double>(kPilotTrials))
    throw Error(ErrorCode::LowAcceptance, "acceptance rate below 1e-4 in pilot; budget too tight for rejection sampling");

  SampleResult out;
  out.samples.reserve(count);
  std::mt19937_64 rng(seed);
  while (out.samples.size() < count) {
    detail::draw_composition(inst.total_increments, k, rng, parts, bars);
    ++out.trials;
    if (accepted()) out.samples.push_back(Composition{parts});
  }
  out.acceptance_rate = static_cast<double>(count) / static_cast<double>(out.trials);
  return out;
}

struct SampledEnsemble {
  std::uint64_t samples = 0;
  double acceptance_rate = 0.0;
  double deviation_fraction = 0.0;
  double lemma3_quantity = 0.0;
  double delta = 0.0;
  double center = 0.0;
  double mean_cumulative = 0.0;
  std::size_t l = 0;
};

/// Monte Carlo counterparts of cumulative_stats and lemma3_quantity.
inline SampledEnsemble sampled_stats(const ProblemInstance& inst, const ThermoParams& params, std::size_t l,
                                     double epsilon, double lemma3_epsilon, std::uint64_t count, std::uint64_t seed) {
  SampledEnsemble out;
  out.l = l;
  out.center = predicted_cumulative(params, inst, l);
  out.delta = std::pow(inst.n(), 0.75 + epsilon);
  const SampleResult draws = sample_uniform(inst, count, seed);
  const double threshold = inst.energy() - std::pow(inst.n(), 0.5 + lemma3_epsilon);
  std::uint64_t deviating = 0;
  double shell = 0.0;
  double cumulative = 0.0;
  for (const auto& c : draws.samples) {
    std::int64_t s = 0;
    for (std::size_t m = 0; m + 1 < l; ++m) s += c.parts[m];
    cumulative += static_cast<double>(s);
    if (std::abs(static_cast<double>(s) - out.center) >= out.delta) ++deviating;
    const double e = inst.to_real(composition_energy(inst, c.parts));
    if (e <= threshold) shell += std::exp(-params.beta * e);
  }
  out.samples = count;
  out.acceptance_rate = draws.acceptance_rate;
  out.deviation_fraction = static_cast<double>(deviating) / static_cast<double>(count);
  out.lemma3_quantity = shell / static_cast<double>(count);
  out.mean_cumulative = cumulative / static_cast<double>(count);
  return out;
}

}  // namespace bealloc
