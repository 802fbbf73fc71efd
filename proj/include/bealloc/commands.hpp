#pragma once

// The four CLI workflows, usable in-process. Each returns a JSON report or
// throws bealloc::Error; run() maps errors to the fixed exit-code table.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bealloc/error.hpp"
#include "bealloc/family.hpp"
#include "bealloc/model.hpp"
#include "bealloc/oracle.hpp"
#include "bealloc/partition.hpp"
#include "bealloc/report.hpp"
#include "bealloc/solver.hpp"

namespace bealloc {

enum class Command { Solve, Enumerate, Verify, Zcheck };

struct RunConfig {
  Command command = Command::Solve;
  std::optional<std::string> prices_path;
  std::optional<std::int64_t> min_shares;
  std::optional<std::int64_t> max_shares;
  std::optional<std::string> budget;
  double epsilon = 0.0;
  std::optional<std::size_t> l;
  std::optional<double> beta_override;
  std::optional<std::uint64_t> samples;
  std::uint64_t seed = 0;
  std::uint64_t cap = kDefaultVisitCap;
  int grid = 4096;
  std::optional<std::string> out_path;
  Scaled scale = kDefaultScale;
  std::vector<std::int64_t> n_values;  // family sizes for verify / family zcheck
  double lemma3_epsilon = 0.25;
  int doublings = 3;
};

inline int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::BudgetInfeasible:
    case ErrorCode::DegenerateBoundary:
      return 2;
    case ErrorCode::NoConvergence:
    case ErrorCode::DomainError:
    case ErrorCode::RepairFailed:
      return 3;
    case ErrorCode::CapExceeded:
    case ErrorCode::LowAcceptance:
      return 5;
    default:
      return 4;
  }
}

inline ProblemInstance load_instance(const RunConfig& cfg) {
  if (!cfg.prices_path || !cfg.min_shares || !cfg.max_shares || !cfg.budget)
    throw Error(ErrorCode::InvalidInput, "--prices, --min-shares, --max-shares and --budget are required");
  const auto prices = load_prices_csv(*cfg.prices_path);
  return build_instance(prices, *cfg.min_shares, *cfg.max_shares, *cfg.budget, cfg.scale);
}

/// Ratio s/N outside [1/10, 10] is far from the proportional regime the
/// concentration statements assume.
inline bool in_proportional_regime(const ProblemInstance& inst) {
  if (inst.total_increments == 0) return false;
  const double r = static_cast<double>(inst.enterprises()) / inst.n();
  return r >= 0.1 && r <= 10.0;
}

inline Json cmd_solve(const RunConfig& cfg) {
  const ProblemInstance inst = load_instance(cfg);
  const ThermoParams p = solve_params(inst);
  const Allocation a = build_allocation(inst, p);
  Json j;
  j["command"] = "solve";
  j["instance"] = instance_json(inst);
  j["allocation"] = allocation_json(inst, p, a);
  return j;
}

inline Json cmd_enumerate(const RunConfig& cfg, std::ostream& diag) {
  const ProblemInstance inst = load_instance(cfg);
  if (!in_proportional_regime(inst))
    diag << "warning: s/N = " << inst.enterprises() << "/" << inst.total_increments
         << " is outside the proportional regime; concentration bounds may not apply\n";
  Json j;
  j["command"] = "enumerate";
  j["instance"] = instance_json(inst);

  std::optional<ThermoParams> params;
  if (cfg.l) {
    try {
      params = solve_params(inst);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateBoundary) throw;
      diag << "note: " << e.what() << "; deviation statistics skipped\n";
      j["stats_skipped"] = e.what();
    }
  }

  if (cfg.samples) {
    j["mode"] = "sampled";
    if (params) {
      j["ensemble"] = sampled_json(
          sampled_stats(inst, *params, *cfg.l, cfg.epsilon, cfg.lemma3_epsilon, *cfg.samples, cfg.seed));
    } else {
      const SampleResult r = sample_uniform(inst, *cfg.samples, cfg.seed);
      j["ensemble"] = Json{{"samples", *cfg.samples}, {"trials", r.trials}, {"acceptance_rate", r.acceptance_rate}};
    }
    return j;
  }

  j["mode"] = "exact";
  if (params)
    j["ensemble"] = ensemble_json(cumulative_stats(inst, *params, *cfg.l, cfg.epsilon, cfg.cap), true);
  else
    j["ensemble"] = ensemble_json(ensemble_summary(inst, cfg.cap), false);
  return j;
}

inline Json cmd_verify(const RunConfig& cfg) {
  const std::vector<std::int64_t> ns = cfg.n_values.empty() ? std::vector<std::int64_t>{6, 9, 12, 15} : cfg.n_values;
  Json rows = Json::array();
  std::vector<double> deviation;
  std::vector<double> lemma3;
  for (std::int64_t n : ns) {
    const ProblemInstance inst = uniform_price_family(n);
    const ThermoParams p = solve_params(inst);
    const std::size_t l = cfg.l.value_or(static_cast<std::size_t>((n + 1) / 2));
    Json row{{"N", n}, {"s", inst.enterprises()}, {"beta", p.beta}, {"sigma", p.sigma}};
    if (cfg.samples) {
      const SampledEnsemble st =
          sampled_stats(inst, p, l, cfg.epsilon, cfg.lemma3_epsilon, *cfg.samples, cfg.seed + static_cast<std::uint64_t>(n));
      row["total_count"] = nullptr;
      row["acceptance_rate"] = st.acceptance_rate;
      row["l"] = l;
      row["center"] = st.center;
      row["delta"] = st.delta;
      row["deviation_fraction"] = st.deviation_fraction;
      row["lemma3_quantity"] = st.lemma3_quantity;
      deviation.push_back(st.deviation_fraction);
      lemma3.push_back(st.lemma3_quantity);
    } else {
      const EnsembleStats st = cumulative_stats(inst, p, l, cfg.epsilon, cfg.cap);
      const double q = lemma3_quantity(inst, p.beta, cfg.lemma3_epsilon, cfg.cap);
      row["total_count"] = st.total_count.str();
      row["l"] = l;
      row["center"] = st.center;
      row["delta"] = st.delta;
      row["deviation_fraction"] = st.deviation_fraction;
      row["lemma3_quantity"] = q;
      deviation.push_back(st.deviation_fraction);
      lemma3.push_back(q);
    }
    rows.push_back(row);
  }
  bool nonincreasing = true;
  bool strictly_decreasing = true;
  for (std::size_t i = 1; i < deviation.size(); ++i) {
    nonincreasing = nonincreasing && deviation[i] <= deviation[i - 1];
    strictly_decreasing = strictly_decreasing && lemma3[i] < lemma3[i - 1];
  }
  Json j;
  j["command"] = "verify";
  j["mode"] = cfg.samples ? "sampled" : "exact";
  j["epsilon"] = cfg.epsilon;
  j["lemma3_epsilon"] = cfg.lemma3_epsilon;
  j["rows"] = rows;
  j["deviation_nonincreasing"] = nonincreasing;
  j["lemma3_strictly_decreasing"] = strictly_decreasing;
  return j;
}

inline Json cmd_zcheck(const RunConfig& cfg) {
  std::vector<ProblemInstance> schedule;
  std::optional<double> beta = cfg.beta_override;
  Json j;
  j["command"] = "zcheck";
  if (cfg.prices_path) {
    const ProblemInstance base = load_instance(cfg);
    if (base.total_increments < 1) throw Error(ErrorCode::InvalidInput, "zcheck needs N >= 1");
    if (!beta) beta = solve_params(base).beta;
    std::int64_t n = base.total_increments;
    for (int d = 0; d < cfg.doublings; ++d, n *= 2) schedule.push_back(with_increments(base, n));
    j["instance"] = instance_json(base);
  } else {
    if (!beta) throw Error(ErrorCode::InvalidInput, "zcheck without --prices needs --beta (family mode)");
    const std::vector<std::int64_t> ns = cfg.n_values.empty() ? std::vector<std::int64_t>{20, 40, 80} : cfg.n_values;
    for (std::int64_t n : ns) schedule.push_back(uniform_price_family(n));
    j["family"] = "s = N, unit prices";
  }
  j["beta"] = *beta;

  Json rows = Json::array();
  std::vector<double> ratios;
  for (const ProblemInstance& inst : schedule) {
    const PartitionEstimate est = z_saddle(inst, *beta);
    const ScaledReal integral = z_integral(inst, *beta, est.nu_star, cfg.grid);
    rows.push_back(partition_row_json(inst.total_increments, est, integral, cfg.grid));
    ratios.push_back(est.ratio);
  }
  Json changes = Json::array();
  std::vector<double> change;
  for (std::size_t i = 1; i < ratios.size(); ++i) {
    change.push_back(std::abs(ratios[i] / ratios[i - 1] - 1.0));
    changes.push_back(sci(change.back()));
  }
  bool decreasing = change.size() >= 2;
  bool halving = change.size() >= 2;
  for (std::size_t i = 1; i < change.size(); ++i) {
    decreasing = decreasing && change[i] < change[i - 1];
    halving = halving && change[i] <= 0.5 * change[i - 1];
  }
  j["rows"] = rows;
  j["ratio_relative_changes"] = changes;
  j["stabilizing"] = decreasing;
  j["halving"] = halving;
  return j;
}

/// Runs one command. The report goes to `out` (or cfg.out_path), diagnostics
/// to `diag`. Returns the process exit code.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& diag) {
  try {
    Json report;
    switch (cfg.command) {
      case Command::Solve: report = cmd_solve(cfg); break;
      case Command::Enumerate: report = cmd_enumerate(cfg, diag); break;
      case Command::Verify: report = cmd_verify(cfg); break;
      case Command::Zcheck: report = cmd_zcheck(cfg); break;
    }
    const std::string text = report.dump(2) + "\n";
    if (cfg.out_path) {
      std::ofstream file(*cfg.out_path);
      if (!file) throw Error(ErrorCode::InvalidInput, "cannot write '" + *cfg.out_path + "'");
      file << text;
    } else {
      out << text;
    }
    return 0;
  } catch (const Error& e) {
    diag << "error: " << e.what() << "\n";
    return exit_code(e.code());
  }
}

}  // namespace bealloc
