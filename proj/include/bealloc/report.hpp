#pragma once

// JSON documents for every report the CLI emits. Exact quantities (money,
// counts, rationals) are strings; partition values are %.17e strings.

#include <cstdio>
#include <string>

#include "json.hpp"

#include "bealloc/model.hpp"
#include "bealloc/oracle.hpp"
#include "bealloc/partition.hpp"
#include "bealloc/solver.hpp"

namespace bealloc {

using Json = nlohmann::ordered_json;

inline std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

inline std::string rational_string(const BigRational& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

inline Json instance_json(const ProblemInstance& inst) {
  Json prices = Json::array();
  for (Scaled p : inst.schedule.prices) prices.push_back(format_scaled(p, inst.scale()));
  Json lambda = Json::array();
  for (Scaled l : inst.weights.lambda) lambda.push_back(format_scaled(l, inst.scale()));
  Json j;
  j["prices"] = prices;
  j["scale"] = inst.scale();
  j["K"] = inst.bounds.min_shares;
  j["M"] = inst.bounds.max_shares;
  j["budget"] = format_scaled(inst.bounds.budget, inst.scale());
  j["lambda"] = lambda;
  j["N"] = inst.total_increments;
  j["E"] = format_scaled(inst.effective_budget, inst.scale());
  return j;
}

inline Json allocation_json(const ProblemInstance& inst, const ThermoParams& p, const Allocation& a) {
  Json j;
  j["beta"] = p.beta;
  j["sigma"] = p.sigma;
  j["beta_negative"] = p.beta < 0.0;
  j["residual_n"] = p.residual_n;
  j["residual_e"] = p.residual_e;
  j["occupancies"] = a.occupancies;
  j["increments"] = a.increments;
  j["counts"] = a.counts;
  j["spend"] = format_scaled(a.spend, inst.scale());
  j["budget_residual"] = format_scaled(a.budget_residual, inst.scale());
  j["rounding_shift"] = a.rounding_shift;
  j["deviation_budget"] = a.deviation_budget;
  j["effective_budget"] = format_scaled(inst.effective_budget, inst.scale());
  // The alternative right-hand side Phi - p_1*K, reported next to E for comparison.
  j["phi_minus_p1_k"] = format_scaled(
      inst.bounds.budget - checked_mul(inst.schedule.prices.front(), inst.bounds.min_shares), inst.scale());
  return j;
}

inline Json ensemble_json(const EnsembleStats& st, bool with_band) {
  Json j;
  j["total_count"] = st.total_count.str();
  Json means = Json::array();
  for (std::size_t i = 0; i < st.cumulative_mean.size(); ++i)
    means.push_back(Json{{"l", i + 2}, {"mean", rational_string(st.cumulative_mean[i])}});
  j["cumulative_mean"] = means;
  if (with_band) {
    j["l"] = st.l;
    j["center"] = st.center;
    j["delta"] = st.delta;
    j["epsilon"] = st.epsilon;
    j["deviating_count"] = st.deviating_count.str();
    j["deviation_fraction"] = st.deviation_fraction;
  }
  return j;
}

inline Json sampled_json(const SampledEnsemble& st) {
  return Json{{"samples", st.samples},
              {"acceptance_rate", st.acceptance_rate},
              {"l", st.l},
              {"center", st.center},
              {"delta", st.delta},
              {"mean_cumulative", st.mean_cumulative},
              {"deviation_fraction", st.deviation_fraction},
              {"lemma3_quantity", st.lemma3_quantity}};
}

inline Json partition_row_json(std::int64_t n, const PartitionEstimate& est, const ScaledReal& integral, int grid) {
  return Json{{"N", n},
              {"nu_star", sci(est.nu_star)},
              {"log_z_exact", sci(est.z_exact.log())},
              {"log_z_integral", sci(integral.log())},
              {"log_z_saddle", sci(est.z_saddle.log())},
              {"integral_over_exact", sci(ratio(integral, est.z_exact))},
              {"ratio", sci(est.ratio)},
              {"grid", grid}};
}

}  // namespace bealloc
