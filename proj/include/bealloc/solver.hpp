#pragma once

// Bose-Einstein occupancy system for the risk-minimizing allocation.
//
// The two multipliers (beta, sigma) are fixed by
//   sum_j q_j n_j = N            (count condition)
//   sum_j q_j lambda_j n_j = E   (budget condition)
// with n_j = 1 / (exp(beta*lambda_j - sigma) - 1), j = 2..s.
//
// Internally sigma is carried as its distance below the occupancy pole,
// pole_gap = min_j(beta*lambda_j) - sigma > 0, so the dominant occupancy keeps
// full relative precision even when beta*lambda is large.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "bealloc/error.hpp"
#include "bealloc/model.hpp"

namespace bealloc {

struct ThermoParams {
  double beta = 0.0;
  double sigma = 0.0;
  double residual_n = 0.0;
  double residual_e = 0.0;
  double pole_gap = 0.0;
};

struct SolverOptions {
  int max_outer_iterations = 200;
  int max_inner_iterations = 200;
  double relative_tolerance = 1e-9;
};

struct Allocation {
  std::vector<double> occupancies;       // expected increment per mode j = 2..s
  std::vector<std::int64_t> increments;  // rounded N_j, j = 2..s
  std::vector<std::int64_t> counts;      // C_1..C_s
  Scaled spend = 0;                      // sum C_i p_i, times scale
  Scaled budget_residual = 0;            // Phi - spend, times scale
  std::int64_t rounding_shift = 0;       // unit moves made by budget repair
  double deviation_budget = 0.0;         // N^{3/4}, reported only
};

inline double count_tolerance(const ProblemInstance& inst, const SolverOptions& opt = {}) {
  return opt.relative_tolerance * std::max(1.0, inst.n());
}

inline double energy_tolerance(const ProblemInstance& inst, const SolverOptions& opt = {}) {
  return opt.relative_tolerance * std::max(1.0, inst.energy());
}

/// 1 / (exp(beta*lambda - sigma) - 1). Throws DomainError at or past the pole.
inline double occupancy(double beta, double sigma, double lambda) {
  const double x = beta * lambda - sigma;
  if (!(x > 0.0))
    throw Error(ErrorCode::DomainError, "occupancy requires beta*lambda - sigma > 0, got " + std::to_string(x));
  return 1.0 / std::expm1(x);
}

namespace detail {

// Mode whose beta*lambda_j is smallest: lambda_s for beta >= 0, lambda_2 otherwise.
inline std::size_t pole_mode(const ProblemInstance& inst, double beta) { return beta >= 0.0 ? inst.modes() - 1 : 0; }

inline double mode_exponent(const ProblemInstance& inst, double beta, double gap, std::size_t mode) {
  const std::size_t ref = pole_mode(inst, beta);
  return beta * inst.to_real(inst.mode_weight_scaled(mode) - inst.mode_weight_scaled(ref)) + gap;
}

inline double mode_occupancy(const ProblemInstance& inst, double beta, double gap, std::size_t mode) {
  const double x = mode_exponent(inst, beta, gap, mode);
  if (!(x > 0.0)) throw Error(ErrorCode::DomainError, "occupancy pole reached (beta*lambda_j - sigma <= 0)");
  return 1.0 / std::expm1(x);
}

struct Sums {
  double count = 0.0;
  double energy = 0.0;
};

inline Sums mode_sums(const ProblemInstance& inst, double beta, double gap, std::size_t mode_end) {
  Sums s;
  for (std::size_t m = 0; m < mode_end; ++m) {
    const double n = inst.degeneracy[m] * mode_occupancy(inst, beta, gap, m);
    s.count += n;
    s.energy += n * inst.mode_weight(m);
  }
  return s;
}

}  // namespace detail

/// Builds params from a raw (beta, sigma) pair; residuals are left at zero.
inline ThermoParams make_params(const ProblemInstance& inst, double beta, double sigma) {
  ThermoParams p;
  p.beta = beta;
  p.sigma = sigma;
  p.pole_gap = beta * inst.mode_weight(detail::pole_mode(inst, beta)) - sigma;
  if (!(p.pole_gap > 0.0))
    throw Error(ErrorCode::DomainError, "sigma must lie below min_j beta*lambda_j");
  return p;
}

inline double count_sum(const ThermoParams& p, const ProblemInstance& inst) {
  return detail::mode_sums(inst, p.beta, p.pole_gap, inst.modes()).count;
}

inline double energy_sum(const ThermoParams& p, const ProblemInstance& inst) {
  return detail::mode_sums(inst, p.beta, p.pole_gap, inst.modes()).energy;
}

inline double count_sum(double beta, double sigma, const ProblemInstance& inst) {
  return count_sum(make_params(inst, beta, sigma), inst);
}

inline double energy_sum(double beta, double sigma, const ProblemInstance& inst) {
  return energy_sum(make_params(inst, beta, sigma), inst);
}

/// The budget condition in its nested form sum_{i=2}^s p_i sum_{j=2}^i q_j n_j.
/// Equal to energy_sum by exchanging the order of summation.
inline double nested_budget_sum(const ThermoParams& p, const ProblemInstance& inst) {
  double total = 0.0;
  double cumulative = 0.0;
  for (std::size_t m = 0; m < inst.modes(); ++m) {
    cumulative += inst.degeneracy[m] * detail::mode_occupancy(inst, p.beta, p.pole_gap, m);
    total += inst.schedule.price(m + 1) * cumulative;
  }
  return total;
}

/// Distance below the pole that makes the count condition hold for this beta.
/// Bisection on the strictly decreasing map gap -> count, after doubling the
/// upper end from 1 until the count drops below N.
inline double solve_pole_gap(double beta, const ProblemInstance& inst, const SolverOptions& opt = {}) {
  if (inst.total_increments < 1) throw Error(ErrorCode::InvalidInput, "count condition needs N >= 1");
  const double target = inst.n();
  auto count = [&](double gap) { return detail::mode_sums(inst, beta, gap, inst.modes()).count; };

  int iterations = 0;
  double lo = 0.0;  // count(0+) = +inf
  double hi = 1.0;
  constexpr double kMaxGap = 1152921504606846976.0;  // 2^60
  while (count(hi) >= target) {
    lo = hi;
    hi *= 2.0;
    if (++iterations > opt.max_inner_iterations || hi > kMaxGap)
      throw Error(ErrorCode::NoConvergence, "could not bracket sigma for beta = " + std::to_string(beta));
  }
  for (; iterations < opt.max_inner_iterations; ++iterations) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double c = count(mid);
    if (c == target) return mid;
    (c > target ? lo : hi) = mid;
  }
  if (lo == 0.0) return hi;
  return std::abs(count(lo) - target) < std::abs(count(hi) - target) ? lo : hi;
}

inline double solve_sigma(double beta, const ProblemInstance& inst, const SolverOptions& opt = {}) {
  const double gap = solve_pole_gap(beta, inst, opt);
  const double sigma = beta * inst.mode_weight(detail::pole_mode(inst, beta)) - gap;
  const double residual = detail::mode_sums(inst, beta, gap, inst.modes()).count - inst.n();
  if (!(std::abs(residual) <= count_tolerance(inst, opt)))
    throw Error(ErrorCode::NoConvergence, "count residual " + std::to_string(residual) + " above tolerance");
  return sigma;
}

namespace detail {

inline ThermoParams finish(const ProblemInstance& inst, double beta, double gap) {
  ThermoParams p;
  p.beta = beta;
  p.pole_gap = gap;
  p.sigma = beta * inst.mode_weight(pole_mode(inst, beta)) - gap;
  const Sums s = mode_sums(inst, beta, gap, inst.modes());
  p.residual_n = s.count - inst.n();
  p.residual_e = s.energy - inst.energy();
  return p;
}

// Sign of E - (mean energy at beta = 0), decided exactly: E*Q vs N*sum q_j lambda_j.
inline int compare_with_uniform_energy(const ProblemInstance& inst) {
  __int128 weighted = 0;
  for (std::size_t m = 0; m < inst.modes(); ++m)
    weighted += static_cast<__int128>(inst.degeneracy[m]) * inst.mode_weight_scaled(m);
  const __int128 lhs = static_cast<__int128>(inst.effective_budget) * inst.total_degeneracy();
  const __int128 rhs = static_cast<__int128>(inst.total_increments) * weighted;
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

}  // namespace detail

/// Solves both conditions for (beta, sigma). Requires N*lambda_s < E < N*lambda_2;
/// otherwise throws DegenerateBoundary. beta < 0 when E exceeds the beta = 0
/// mean energy.
inline ThermoParams solve_params(const ProblemInstance& inst, const SolverOptions& opt = {}) {
  if (!has_interior_solution(inst)) {
    const EnergyRange r = energy_range(inst);
    throw Error(ErrorCode::DegenerateBoundary,
                "E = " + format_scaled(inst.effective_budget, inst.scale()) + " is not strictly inside (N*lambda_s, N*lambda_2) = (" +
                    format_scaled(r.lower, inst.scale()) + ", " + format_scaled(r.upper, inst.scale()) + ")");
  }

  ThermoParams result;
  const int side = detail::compare_with_uniform_energy(inst);
  if (side == 0) {
    // Uniform occupancy u = N/Q at beta = 0, so sigma = -ln(1 + 1/u).
    const double u = inst.n() / static_cast<double>(inst.total_degeneracy());
    result = detail::finish(inst, 0.0, std::log1p(1.0 / u));
  } else {
    const double target = inst.energy();
    auto excess = [&](double beta) {
      const double gap = solve_pole_gap(beta, inst, opt);
      return detail::mode_sums(inst, beta, gap, inst.modes()).energy - target;
    };

    // excess is strictly decreasing in beta; E below the uniform mean means beta > 0.
    const double step = 1.0 / inst.to_real(inst.weights.lambda[1] - inst.weights.lambda.back());
    double lo = 0.0;
    double hi = 0.0;
    int iterations = 0;
    if (side < 0) {
      hi = step;
      while (excess(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++iterations >= opt.max_outer_iterations) throw Error(ErrorCode::NoConvergence, "could not bracket beta");
      }
    } else {
      lo = -step;
      while (excess(lo) < 0.0) {
        hi = lo;
        lo *= 2.0;
        if (++iterations >= opt.max_outer_iterations) throw Error(ErrorCode::NoConvergence, "could not bracket beta");
      }
    }
    double best = std::abs(lo) > std::abs(hi) ? hi : lo;
    double best_excess = std::numeric_limits<double>::infinity();
    for (; iterations < opt.max_outer_iterations; ++iterations) {
      const double mid = lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) break;
      const double e = excess(mid);
      if (std::abs(e) < best_excess) {
        best_excess = std::abs(e);
        best = mid;
      }
      if (e == 0.0) break;
      (e > 0.0 ? lo : hi) = mid;
    }
    result = detail::finish(inst, best, solve_pole_gap(best, inst, opt));
  }

  if (!(std::abs(result.residual_n) <= count_tolerance(inst, opt)) ||
      !(std::abs(result.residual_e) <= energy_tolerance(inst, opt))) {
    throw Error(ErrorCode::NoConvergence, "residuals (" + std::to_string(result.residual_n) + ", " +
                                              std::to_string(result.residual_e) + ") above tolerance");
  }
  return result;
}

/// sum_{j=2}^{l} q_j n_j for 2 <= l <= s: the expected cumulative increment C_l - C_1.
inline double predicted_cumulative(const ThermoParams& p, const ProblemInstance& inst, std::size_t l) {
  if (l < 2 || l > inst.enterprises())
    throw Error(ErrorCode::IndexRange, "l = " + std::to_string(l) + " outside [2, " + std::to_string(inst.enterprises()) + "]");
  return detail::mode_sums(inst, p.beta, p.pole_gap, l - 1).count;
}

/// Floors every value and hands the remaining units to the largest fractional
/// parts, ties to the larger index. The result sums to total exactly.
inline std::vector<std::int64_t> largest_remainder(const std::vector<double>& values, std::int64_t total) {
  std::vector<std::int64_t> out(values.size());
  std::vector<double> frac(values.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = std::floor(values[i]);
    out[i] = static_cast<std::int64_t>(f);
    frac[i] = values[i] - f;
    assigned += out[i];
  }
  const std::int64_t remaining = total - assigned;
  if (remaining < 0 || remaining > static_cast<std::int64_t>(values.size()))
    throw Error(ErrorCode::DomainError, "values do not sum to the requested total");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (frac[a] != frac[b]) return frac[a] > frac[b];
    return a > b;
  });
  for (std::int64_t k = 0; k < remaining; ++k) ++out[order[static_cast<std::size_t>(k)]];
  return out;
}

namespace detail {

inline Scaled increments_spend(const ProblemInstance& inst, const std::vector<std::int64_t>& increments) {
  Scaled spend = checked_mul(inst.bounds.min_shares, inst.weights.lambda.front());
  for (std::size_t m = 0; m < increments.size(); ++m)
    spend = checked_add(spend, checked_mul(increments[m], inst.mode_weight_scaled(m)));
  return spend;
}

inline Allocation assemble(const ProblemInstance& inst, std::vector<double> occupancies,
                           std::vector<std::int64_t> increments, std::int64_t shift) {
  Allocation a;
  a.occupancies = std::move(occupancies);
  a.increments = std::move(increments);
  a.counts.assign(inst.enterprises(), inst.bounds.min_shares);
  for (std::size_t m = 0; m < a.increments.size(); ++m) a.counts[m + 1] = a.counts[m] + a.increments[m];
  a.spend = increments_spend(inst, a.increments);
  a.budget_residual = inst.bounds.budget - a.spend;
  a.rounding_shift = shift;
  a.deviation_budget = std::pow(inst.n(), 0.75);
  return a;
}

}  // namespace detail

/// Integer share counts from solved parameters: largest-remainder rounding of
/// the occupancies, then unit moves toward cheaper modes until spend <= Phi.
inline Allocation build_allocation(const ProblemInstance& inst, const ThermoParams& p) {
  const std::size_t modes = inst.modes();
  std::vector<double> occ(modes, 0.0);
  std::vector<std::int64_t> inc(modes, 0);
  if (inst.total_increments > 0) {
    for (std::size_t m = 0; m < modes; ++m)
      occ[m] = inst.degeneracy[m] * detail::mode_occupancy(inst, p.beta, p.pole_gap, m);
    inc = largest_remainder(occ, inst.total_increments);
  }

  Scaled spend = detail::increments_spend(inst, inc);
  std::int64_t shift = 0;
  std::size_t first = 0;
  while (spend > inst.bounds.budget) {
    while (first < modes && inc[first] == 0) ++first;
    if (first + 1 >= modes) throw Error(ErrorCode::RepairFailed, "no unit move brings spend within budget");
    --inc[first];
    ++inc[first + 1];
    spend -= inst.schedule.prices[first + 1];  // lambda_j - lambda_{j+1} = p_j
    ++shift;
  }
  return detail::assemble(inst, std::move(occ), std::move(inc), shift);
}

/// Allocation for instances without an interior solution: all increments on
/// the cheapest mode when E = N*lambda_s, on mode 2 when E >= N*lambda_2.
inline Allocation boundary_allocation(const ProblemInstance& inst) {
  const EnergyRange r = energy_range(inst);
  if (inst.effective_budget < r.lower)
    throw Error(ErrorCode::BudgetInfeasible, "E < N*lambda_s: no monotone allocation fits the budget");
  std::vector<std::int64_t> inc(inst.modes(), 0);
  if (inst.total_increments > 0) {
    if (inst.effective_budget >= r.upper)
      inc.front() = inst.total_increments;
    else if (inst.effective_budget == r.lower)
      inc.back() = inst.total_increments;
    else
      throw Error(ErrorCode::InvalidInput, "instance has an interior solution; use solve_params");
  }
  std::vector<double> occ(inc.begin(), inc.end());
  return detail::assemble(inst, std::move(occ), std::move(inc), 0);
}

}  // namespace bealloc
