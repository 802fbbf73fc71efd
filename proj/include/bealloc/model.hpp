#pragma once

// Problem description: prices ordered by priority, share bounds, budget, and
// the derived tail weights / effective budget that turn the monotone share
// counts C_1 <= ... <= C_s into nonnegative increments N_2..N_s.
//
// Indexing: enterprise i (1-based, larger = higher priority) lives at vector
// index i-1. Increment modes j = 2..s live at mode index j-2.

#include <cstdint>
#include <fstream>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "bealloc/decimal.hpp"
#include "bealloc/error.hpp"

namespace bealloc {

inline constexpr Scaled kDefaultScale = 1'000'000;

struct PriceSchedule {
  std::vector<Scaled> prices;  // price_i * scale
  Scaled scale = 1;

  std::size_t size() const { return prices.size(); }
  double price(std::size_t index) const { return static_cast<double>(prices[index]) / static_cast<double>(scale); }
};

struct InvestmentBounds {
  std::int64_t min_shares = 0;  // K
  std::int64_t max_shares = 0;  // M
  Scaled budget = 0;            // Phi * scale
};

struct TailWeights {
  std::vector<Scaled> lambda;  // lambda_i = sum_{j>=i} p_j, times scale
};

struct EnergyRange {
  Scaled lower = 0;  // N * lambda_s
  Scaled upper = 0;  // N * lambda_2
};

class ProblemInstance {
 public:
  PriceSchedule schedule;
  InvestmentBounds bounds;
  TailWeights weights;
  std::int64_t total_increments = 0;  // N = M - K
  Scaled effective_budget = 0;        // E = Phi - K * lambda_1, times scale
  std::vector<int> degeneracy;        // q_j per mode, default 1

  std::size_t enterprises() const { return schedule.size(); }
  std::size_t modes() const { return schedule.size() - 1; }
  Scaled scale() const { return schedule.scale; }

  Scaled mode_weight_scaled(std::size_t mode) const { return weights.lambda[mode + 1]; }
  double mode_weight(std::size_t mode) const { return to_real(weights.lambda[mode + 1]); }
  double lambda(std::size_t index) const { return to_real(weights.lambda[index]); }
  double budget() const { return to_real(bounds.budget); }
  double energy() const { return to_real(effective_budget); }
  double n() const { return static_cast<double>(total_increments); }

  /// Sum of q_j over modes (Q).
  std::int64_t total_degeneracy() const {
    std::int64_t q = 0;
    for (int d : degeneracy) q += d;
    return q;
  }

  double to_real(Scaled v) const { return static_cast<double>(v) / static_cast<double>(schedule.scale); }
};

inline PriceSchedule make_schedule(std::vector<Scaled> scaled_prices, Scaled scale) {
  if (scale < 1) throw Error(ErrorCode::InvalidInput, "scale must be a positive integer");
  if (scaled_prices.empty()) throw Error(ErrorCode::EmptyPrices, "no prices given");
  if (scaled_prices.size() < 2)
    throw Error(ErrorCode::TooFewEnterprises, "at least two enterprises are required, got 1");
  for (std::size_t i = 0; i < scaled_prices.size(); ++i) {
    if (scaled_prices[i] <= 0)
      throw Error(ErrorCode::NonPositivePrice,
                  "price of enterprise " + std::to_string(i + 1) + " is " + format_scaled(scaled_prices[i], scale));
  }
  return PriceSchedule{std::move(scaled_prices), scale};
}

inline PriceSchedule parse_schedule(std::span<const std::string> prices, Scaled scale = kDefaultScale) {
  std::vector<Scaled> scaled;
  scaled.reserve(prices.size());
  for (const auto& p : prices) scaled.push_back(parse_scaled(p, scale));
  return make_schedule(std::move(scaled), scale);
}

inline TailWeights tail_weights(const PriceSchedule& schedule) {
  TailWeights w;
  w.lambda.assign(schedule.size(), 0);
  Scaled running = 0;
  for (std::size_t i = schedule.size(); i-- > 0;) {
    running = checked_add(running, schedule.prices[i]);
    w.lambda[i] = running;
  }
  return w;
}

/// Validates bounds and budget against the feasibility window
/// K*lambda_1 <= Phi <= M*lambda_1 and derives N and E.
inline ProblemInstance make_instance(PriceSchedule schedule, std::int64_t min_shares, std::int64_t max_shares,
                                     Scaled budget, std::vector<int> degeneracy = {}) {
  if (min_shares < 0) throw Error(ErrorCode::InvalidInput, "K must be nonnegative");
  if (min_shares > max_shares)
    throw Error(ErrorCode::BoundsInverted,
                "K = " + std::to_string(min_shares) + " exceeds M = " + std::to_string(max_shares));

  ProblemInstance inst;
  inst.weights = tail_weights(schedule);
  const Scaled lambda1 = inst.weights.lambda.front();
  const Scaled floor_spend = checked_mul(min_shares, lambda1);
  const Scaled ceiling_spend = checked_mul(max_shares, lambda1);
  if (budget < floor_spend || budget > ceiling_spend) {
    throw Error(ErrorCode::BudgetInfeasible,
                "budget " + format_scaled(budget, schedule.scale) + " outside the window K*lambda_1 <= Phi <= M*lambda_1 = [" +
                    format_scaled(floor_spend, schedule.scale) + ", " + format_scaled(ceiling_spend, schedule.scale) +
                    "]");
  }
  if (degeneracy.empty()) degeneracy.assign(schedule.size() - 1, 1);
  if (degeneracy.size() != schedule.size() - 1)
    throw Error(ErrorCode::InvalidInput, "degeneracy vector must have one entry per mode (s - 1)");
  for (int q : degeneracy)
    if (q < 1) throw Error(ErrorCode::InvalidInput, "degeneracies must be positive");

  inst.bounds = InvestmentBounds{min_shares, max_shares, budget};
  inst.total_increments = max_shares - min_shares;
  inst.effective_budget = budget - floor_spend;
  inst.degeneracy = std::move(degeneracy);
  inst.schedule = std::move(schedule);
  // Every later energy is at most N * lambda_1; keep it inside int64.
  (void)checked_mul(inst.total_increments, lambda1);
  return inst;
}

inline ProblemInstance build_instance(std::span<const std::string> prices, std::int64_t min_shares,
                                      std::int64_t max_shares, std::string_view budget, Scaled scale = kDefaultScale) {
  PriceSchedule schedule = parse_schedule(prices, scale);
  const Scaled phi = parse_scaled(budget, scale);
  if (phi <= 0) throw Error(ErrorCode::InvalidInput, "budget must be positive");
  return make_instance(std::move(schedule), min_shares, max_shares, phi);
}

/// Attainable range of sum_j N_j lambda_j over compositions of N.
inline EnergyRange energy_range(const ProblemInstance& inst) {
  const Scaled n = inst.total_increments;
  return EnergyRange{checked_mul(n, inst.weights.lambda.back()), checked_mul(n, inst.weights.lambda[1])};
}

/// True when N*lambda_s < E < N*lambda_2, i.e. an interior (beta, sigma) exists.
inline bool has_interior_solution(const ProblemInstance& inst) {
  const EnergyRange r = energy_range(inst);
  return r.lower < inst.effective_budget && inst.effective_budget < r.upper;
}

/// Reads one price per line, either "price" or "index,price". Blank lines and
/// lines starting with '#' are skipped; indices must ascend.
inline std::vector<std::string> read_prices_csv(std::istream& in) {
  std::vector<std::string> prices;
  std::string line;
  long long last_index = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto comma = view.find(',');
    if (comma == std::string_view::npos) {
      prices.emplace_back(view);
      ++last_index;
      continue;
    }
    const std::string_view index_text = trim(view.substr(0, comma));
    long long index = 0;
    try {
      std::size_t used = 0;
      index = std::stoll(std::string(index_text), &used);
      if (used != index_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad index '" + std::string(index_text) + "'");
    }
    if (index <= last_index)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": indices must ascend");
    last_index = index;
    const std::string_view price = trim(view.substr(comma + 1));
    if (price.find(',') != std::string_view::npos)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": too many fields");
    prices.emplace_back(price);
  }
  return prices;
}

inline std::vector<std::string> load_prices_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open prices file '" + path + "'");
  return read_prices_csv(in);
}

}  // namespace bealloc
