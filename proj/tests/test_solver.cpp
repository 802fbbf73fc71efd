#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "bealloc/model.hpp"
#include "bealloc/solver.hpp"
#include "support/oracles.hpp"

using namespace bealloc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double kLn2 = std::numbers::ln2;

ProblemInstance closed_form_instance() { return oracle::unit_instance({1, 2, 3}, 2, 8); }

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected bealloc::Error");
  return ErrorCode::InvalidInput;
}

void check_allocation_invariants(const ProblemInstance& inst, const Allocation& a) {
  REQUIRE(a.counts.size() == inst.enterprises());
  REQUIRE(a.counts.front() == inst.bounds.min_shares);
  REQUIRE(a.counts.back() == inst.bounds.max_shares);
  for (std::size_t i = 0; i + 1 < a.counts.size(); ++i) REQUIRE(a.counts[i + 1] >= a.counts[i]);
  Scaled spend = 0;
  for (std::size_t i = 0; i < a.counts.size(); ++i) spend += a.counts[i] * inst.schedule.prices[i];
  REQUIRE(spend == a.spend);
  REQUIRE(a.spend <= inst.bounds.budget);
  REQUIRE(a.budget_residual == inst.bounds.budget - a.spend);
}

}  // namespace

TEST_CASE("occupancy closed forms and pole", "[solver]") {
  CHECK_THAT(occupancy(1.0, 1.0 - kLn2, 1.0), WithinAbs(1.0, 1e-15));
  CHECK_THAT(occupancy(1.0, 0.0, 1.0), WithinRel(1.0 / (std::exp(1.0) - 1.0), 1e-14));
  CHECK_THAT(occupancy(1.0, 0.0, 1.0), WithinRel(0.5819767068693265, 1e-14));
  CHECK(code_of([] { occupancy(1.0, 1.0, 1.0); }) == ErrorCode::DomainError);
  CHECK(code_of([] { occupancy(1.0, 2.0, 1.0); }) == ErrorCode::DomainError);
}

TEST_CASE("count and energy sums at the uniform point", "[solver]") {
  const auto inst = closed_form_instance();
  CHECK_THAT(count_sum(0.0, -kLn2, inst), WithinRel(2.0, 1e-14));
  CHECK_THAT(energy_sum(0.0, -kLn2, inst), WithinRel(8.0, 1e-14));
  CHECK(count_sum(0.0, -60.0, inst) < 1e-25);
  CHECK(energy_sum(0.0, -60.0, inst) < 1e-24);

  const auto single = oracle::unit_instance({4, 7}, 3, 21);
  CHECK_THAT(count_sum(0.5, 1.0, single), WithinRel(occupancy(0.5, 1.0, 7.0), 1e-14));
  CHECK_THAT(energy_sum(0.5, 1.0, single), WithinRel(7.0 * occupancy(0.5, 1.0, 7.0), 1e-14));
  CHECK(code_of([&] { count_sum(1.0, 3.0, inst); }) == ErrorCode::DomainError);
}

TEST_CASE("solve_sigma inverts the count condition", "[solver]") {
  CHECK_THAT(solve_sigma(0.0, closed_form_instance()), WithinAbs(-kLn2, 1e-12));

  // beta = 0 with N equal to the number of modes: every occupancy is 1.
  const auto seven = oracle::unit_instance({3, 1, 4, 1, 5, 9, 2}, 6, 30);
  CHECK_THAT(solve_sigma(0.0, seven), WithinAbs(-kLn2, 1e-12));

  const auto base = oracle::unit_instance({1, 2, 3}, 2, 8);
  double previous = -1e300;
  for (std::int64_t n : {1, 10, 100, 1000, 10000}) {
    auto inst = base;
    inst.total_increments = n;
    const double sigma = solve_sigma(0.7, inst);
    CHECK(sigma > previous);
    CHECK(sigma < 0.7 * 3.0);
    CHECK_THAT(count_sum(0.7, sigma, inst), WithinRel(static_cast<double>(n), 1e-9));
    previous = sigma;
  }
  CHECK(0.7 * 3.0 - previous < 1e-3);
}

TEST_CASE("solve_params on the closed-form instance", "[solver]") {
  const auto p = solve_params(closed_form_instance());
  CHECK_THAT(p.beta, WithinAbs(0.0, 1e-12));
  CHECK_THAT(p.sigma, WithinAbs(-kLn2, 1e-12));
  CHECK(std::abs(p.residual_n) <= 1e-9 * 2);
  CHECK(std::abs(p.residual_e) <= 1e-9 * 8);
}

TEST_CASE("solve_params near the cheap boundary pushes beta up", "[solver]") {
  const auto inst = make_instance(make_schedule({1'000'000, 2'000'000, 3'000'000}, 1'000'000), 0, 2, 6'000'001);
  const auto p = solve_params(inst);
  CHECK(p.beta > 5.0);
  CHECK(std::abs(count_sum(p, inst) - 2.0) <= 1e-9 * 2.0);
  CHECK(std::abs(energy_sum(p, inst) - 6.000001) <= 1e-9 * 6.000001);
  const auto alloc = build_allocation(inst, p);
  CHECK(alloc.counts == std::vector<std::int64_t>{0, 0, 2});
}

TEST_CASE("solve_params allows negative beta above the uniform mean", "[solver]") {
  const auto inst = oracle::unit_instance({1, 2, 3}, 2, 9);
  const auto p = solve_params(inst);
  CHECK(p.beta < 0.0);
  CHECK(std::abs(p.residual_n) <= 2e-9);
  CHECK(std::abs(p.residual_e) <= 9e-9);
  check_allocation_invariants(inst, build_allocation(inst, p));
}

TEST_CASE("solve_params flags boundary budgets", "[solver]") {
  CHECK(code_of([] { solve_params(oracle::unit_instance({1, 2, 3}, 2, 12)); }) == ErrorCode::DegenerateBoundary);
  CHECK(code_of([] { solve_params(oracle::unit_instance({1, 2, 3}, 2, 10)); }) == ErrorCode::DegenerateBoundary);
  CHECK(code_of([] { solve_params(oracle::unit_instance({1, 2, 3}, 2, 6)); }) == ErrorCode::DegenerateBoundary);
  CHECK(code_of([] { solve_params(oracle::unit_instance({1, 2}, 4, 8)); }) == ErrorCode::DegenerateBoundary);
}

TEST_CASE("predicted_cumulative sums prefix occupancies", "[solver]") {
  const auto inst = closed_form_instance();
  const auto p = solve_params(inst);
  CHECK_THAT(predicted_cumulative(p, inst, 2), WithinAbs(1.0, 1e-12));
  CHECK_THAT(predicted_cumulative(p, inst, 3), WithinAbs(2.0, 1e-9));
  CHECK(code_of([&] { predicted_cumulative(p, inst, 1); }) == ErrorCode::IndexRange);
  CHECK(code_of([&] { predicted_cumulative(p, inst, 4); }) == ErrorCode::IndexRange);
}

TEST_CASE("build_allocation on the closed-form instance", "[solver]") {
  const auto inst = closed_form_instance();
  const auto a = build_allocation(inst, solve_params(inst));
  CHECK(a.counts == std::vector<std::int64_t>{0, 1, 2});
  CHECK(a.spend == 8);
  CHECK(a.budget_residual == 0);
  CHECK(a.rounding_shift == 0);
  CHECK_THAT(a.deviation_budget, WithinRel(std::pow(2.0, 0.75), 1e-15));
}

TEST_CASE("build_allocation with no increments", "[solver]") {
  const auto inst = make_instance(make_schedule({1, 2, 3}, 1), 4, 4, 24);
  const auto a = build_allocation(inst, ThermoParams{});
  CHECK(a.counts == std::vector<std::int64_t>{4, 4, 4});
  CHECK(a.spend == 4 * 6);
}

TEST_CASE("budget repair moves units toward cheaper modes", "[solver]") {
  // n = (1.75, 0.25): rounding gives (2, 0) with energy 10 > 9.5, one move fixes it.
  const auto inst = make_instance(make_schedule({10, 20, 30}, 10), 0, 2, 95);
  const auto p = solve_params(inst);
  const auto a = build_allocation(inst, p);
  CHECK_THAT(a.occupancies[0], WithinAbs(1.75, 1e-8));
  CHECK(a.rounding_shift == 1);
  CHECK(a.counts == std::vector<std::int64_t>{0, 1, 2});
  CHECK(a.spend == 80);
  check_allocation_invariants(inst, a);
}

TEST_CASE("boundary_allocation puts every increment on one mode", "[solver]") {
  const auto low = boundary_allocation(oracle::unit_instance({1, 2, 3}, 2, 6));
  CHECK(low.counts == std::vector<std::int64_t>{0, 0, 2});
  const auto high = boundary_allocation(oracle::unit_instance({1, 2, 3}, 2, 12));
  CHECK(high.counts == std::vector<std::int64_t>{0, 2, 2});
  CHECK(code_of([] { boundary_allocation(oracle::unit_instance({1, 2, 3}, 2, 5)); }) == ErrorCode::BudgetInfeasible);
}

TEST_CASE("largest_remainder preserves totals and breaks ties upward", "[solver][property]") {
  CHECK(largest_remainder({0.5, 0.5}, 1) == std::vector<std::int64_t>{0, 1});
  CHECK(largest_remainder({1.2, 0.9, 0.9}, 3) == std::vector<std::int64_t>{1, 1, 1});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> v(1 + trial % 40);
    double total = 0.0;
    for (auto& x : v) total += (x = 10.0 * u(rng));
    const auto n = static_cast<std::int64_t>(std::llround(total));
    // Rescale so the values sum to the integer exactly up to rounding.
    for (auto& x : v) x *= static_cast<double>(n) / total;
    const auto r = largest_remainder(v, n);
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      REQUIRE(std::abs(static_cast<double>(r[i]) - v[i]) < 1.0);
      sum += r[i];
    }
    REQUIRE(sum == n);
  }
}

TEST_CASE("count and energy sums are monotone in beta and sigma", "[solver][property]") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = oracle::random_interior_instance(rng, 30, 100);
    const double scale = 1.0 / inst.mode_weight(0);
    const double beta = (4.0 * u(rng) - 1.0) * scale;
    const double pole = std::min(beta * inst.mode_weight(0), beta * inst.mode_weight(inst.modes() - 1));
    const double sigma = pole - 0.05 - 3.0 * u(rng);
    const double hb = 1e-6 * std::max(std::abs(beta), scale);
    const double hs = 1e-6 * std::max(1.0, std::abs(sigma));
    const auto p0 = make_params(inst, beta, sigma);
    const auto pb = make_params(inst, beta + hb, sigma);
    const auto ps = make_params(inst, beta, sigma + hs);
    REQUIRE(count_sum(pb, inst) < count_sum(p0, inst));
    REQUIRE(energy_sum(pb, inst) < energy_sum(p0, inst));
    REQUIRE(count_sum(ps, inst) > count_sum(p0, inst));
    REQUIRE(energy_sum(ps, inst) > energy_sum(p0, inst));
  }
}

TEST_CASE("nested budget form equals the tail-weight form", "[solver][property]") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = oracle::random_interior_instance(rng);
    const auto p = solve_params(inst);
    REQUIRE_THAT(nested_budget_sum(p, inst), WithinRel(energy_sum(p, inst), 1e-12));
  }
}

TEST_CASE("solver residuals and allocation invariants on random instances", "[solver][property]") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = oracle::random_interior_instance(rng);
    const auto p = solve_params(inst);
    REQUIRE(std::abs(p.residual_n) <= 1e-9 * inst.n());
    REQUIRE(std::abs(p.residual_e) <= 1e-9 * inst.energy());
    check_allocation_invariants(inst, build_allocation(inst, p));
  }
}
