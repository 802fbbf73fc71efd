#pragma once

// Partition function Z(beta, N) = sum over compositions of N into the modes
// j = 2..s of exp(-beta * sum N_j lambda_j), computed three ways: an exact
// dynamic program, the Fourier integral of the grand partition function, and
// the saddle-point approximation around the stationary nu.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>

#include "bealloc/error.hpp"
#include "bealloc/model.hpp"
#include "bealloc/solver.hpp"

namespace bealloc {

/// value = mantissa * e^exponent, mantissa in [1, e) for positive values.
struct ScaledReal {
  double mantissa = 0.0;
  double exponent = 0.0;

  static ScaledReal from_log(double log_value) {
    const double whole = std::floor(log_value);
    return ScaledReal{std::exp(log_value - whole), whole};
  }
  double log() const { return std::log(mantissa) + exponent; }
  double value() const { return mantissa * std::exp(exponent); }
};

inline double ratio(const ScaledReal& a, const ScaledReal& b) {
  return (a.mantissa / b.mantissa) * std::exp(a.exponent - b.exponent);
}

struct GrandPartition {
  double beta = 0.0;
  double nu = 0.0;
  double log_value = 0.0;   // ln zeta_s
  double dlog_dnu = 0.0;    // sum q_j n_j
  double d2log_dnu2 = 0.0;  // sum q_j n_j (1 + n_j)
};

struct PartitionEstimate {
  ScaledReal z_exact;
  ScaledReal z_saddle;
  double ratio = 0.0;  // z_exact / z_saddle
  double nu_star = 0.0;
};

struct PartitionLimits {
  std::int64_t max_increments = 10'000;
  std::size_t max_enterprises = 1'000;
};

namespace detail {

inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

// Accumulates one mode's ln xi, d/dnu and d^2/dnu^2 given x = beta*lambda - nu > 0.
inline void add_mode(GrandPartition& g, int q, double x) {
  const double n = 1.0 / std::expm1(x);
  g.log_value -= q * std::log1p(-std::exp(-x));
  g.dlog_dnu += q * n;
  g.d2log_dnu2 += q * n * (1.0 + n);
}

inline GrandPartition grand_partition_at_gap(const ProblemInstance& inst, double beta, double gap) {
  GrandPartition g;
  g.beta = beta;
  g.nu = beta * inst.mode_weight(pole_mode(inst, beta)) - gap;
  for (std::size_t m = 0; m < inst.modes(); ++m) add_mode(g, inst.degeneracy[m], mode_exponent(inst, beta, gap, m));
  return g;
}

}  // namespace detail

/// ln of the product of xi_j over modes [mode_begin, mode_end).
inline double log_zeta(const ProblemInstance& inst, double beta, double nu, std::size_t mode_begin,
                       std::size_t mode_end) {
  GrandPartition g;
  for (std::size_t m = mode_begin; m < mode_end; ++m) {
    const double x = beta * inst.mode_weight(m) - nu;
    if (!(x > 0.0)) throw Error(ErrorCode::DomainError, "grand partition requires nu < beta*lambda_j for all modes");
    detail::add_mode(g, inst.degeneracy[m], x);
  }
  return g.log_value;
}

inline GrandPartition grand_partition(const ProblemInstance& inst, double beta, double nu) {
  GrandPartition g;
  g.beta = beta;
  g.nu = nu;
  for (std::size_t m = 0; m < inst.modes(); ++m) {
    const double x = beta * inst.mode_weight(m) - nu;
    if (!(x > 0.0)) throw Error(ErrorCode::DomainError, "grand partition requires nu < beta*lambda_j for all modes");
    detail::add_mode(g, inst.degeneracy[m], x);
  }
  return g;
}

/// Same instance with N replaced; Z depends only on the weights and N.
inline ProblemInstance with_increments(ProblemInstance inst, std::int64_t n) {
  inst.total_increments = n;
  inst.bounds.max_shares = inst.bounds.min_shares + n;
  return inst;
}

/// Exact Z(beta, N) by the mode-by-mode recurrence
/// Z_j(n) = Z_{j-1}(n) + w_j Z_j(n-1), w_j = exp(-beta lambda_j), run in log
/// space relative to the largest w so no column under- or overflows.
inline ScaledReal z_exact(const ProblemInstance& inst, double beta, const PartitionLimits& limits = {}) {
  if (inst.total_increments > limits.max_increments || inst.enterprises() > limits.max_enterprises)
    throw Error(ErrorCode::CapExceeded, "instance exceeds the partition DP limits");
  const auto n_max = static_cast<std::size_t>(inst.total_increments);
  const std::size_t ref = detail::pole_mode(inst, beta);
  std::vector<double> log_y(n_max + 1, -std::numeric_limits<double>::infinity());
  log_y[0] = 0.0;
  for (std::size_t m = 0; m < inst.modes(); ++m) {
    const double log_r = -beta * inst.to_real(inst.mode_weight_scaled(m) - inst.mode_weight_scaled(ref));
    for (int rep = 0; rep < inst.degeneracy[m]; ++rep)
      for (std::size_t n = 1; n <= n_max; ++n) log_y[n] = detail::log_add(log_y[n], log_r + log_y[n - 1]);
  }
  return ScaledReal::from_log(-beta * inst.mode_weight(ref) * inst.n() + log_y[n_max]);
}

/// Stationary nu of the phase: sum_j q_j / (e^{beta lambda_j - nu} - 1) = N.
/// The same equation as the solver's count condition.
inline double saddle_nu(const ProblemInstance& inst, double beta) { return solve_sigma(beta, inst); }

/// Gaussian saddle evaluation e^{-nu N} zeta(nu) / sqrt(2 pi d^2 ln zeta / d nu^2)
/// at nu = saddle_nu, paired with the exact value.
inline PartitionEstimate z_saddle(const ProblemInstance& inst, double beta, const PartitionLimits& limits = {}) {
  const double gap = solve_pole_gap(beta, inst);
  const GrandPartition g = detail::grand_partition_at_gap(inst, beta, gap);
  PartitionEstimate est;
  est.nu_star = g.nu;
  est.z_exact = z_exact(inst, beta, limits);
  est.z_saddle = ScaledReal::from_log(-g.nu * inst.n() + g.log_value -
                                      0.5 * std::log(2.0 * std::numbers::pi * g.d2log_dnu2));
  est.ratio = ratio(est.z_exact, est.z_saddle);
  return est;
}

/// (e^{-nu N} / 2 pi) * integral over [-pi, pi] of e^{-i N a} zeta(nu + i a) da,
/// by the trapezoidal rule on `grid` equally spaced nodes. The integrand is
/// normalized by zeta(nu) so the quadrature stays in range.
inline ScaledReal z_integral(const ProblemInstance& inst, double beta, double nu, int grid) {
  if (grid < 64) throw Error(ErrorCode::InvalidInput, "quadrature grid must have at least 64 nodes");
  const double log_zeta0 = log_zeta(inst, beta, nu, 0, inst.modes());
  const double n = inst.n();
  std::complex<double> acc = 0.0;
  for (int k = 0; k < grid; ++k) {
    const double a = -std::numbers::pi + 2.0 * std::numbers::pi * k / grid;
    const std::complex<double> phase(0.0, a);
    std::complex<double> log_zeta_a = 0.0;
    for (std::size_t m = 0; m < inst.modes(); ++m) {
      const std::complex<double> w = std::exp(nu - beta * inst.mode_weight(m) + phase);
      log_zeta_a -= static_cast<double>(inst.degeneracy[m]) * std::log(1.0 - w);
    }
    acc += std::exp(log_zeta_a - log_zeta0 - n * phase);
  }
  const double mean = acc.real() / grid;
  if (!(mean > 0.0)) throw Error(ErrorCode::NoConvergence, "quadrature grid too coarse: nonpositive estimate");
  return ScaledReal::from_log(-nu * n + log_zeta0 + std::log(mean));
}

}  // namespace bealloc
