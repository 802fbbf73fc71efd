#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "bealloc/family.hpp"
#include "bealloc/oracle.hpp"
#include "support/oracles.hpp"

using namespace bealloc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

using Parts = std::vector<std::int64_t>;

std::vector<Parts> visited(const ProblemInstance& inst) {
  std::vector<Parts> out;
  enumerate(inst, [&](std::span<const std::int64_t> p, Scaled) { out.emplace_back(p.begin(), p.end()); });
  return out;
}

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

}  // namespace

TEST_CASE("enumerate visits the hand-counted sets in lexicographic order", "[oracle]") {
  CHECK(visited(oracle::unit_instance({1, 2, 3}, 2, 10)) == std::vector<Parts>{{0, 2}, {1, 1}, {2, 0}});
  CHECK(visited(oracle::unit_instance({1, 2, 3}, 2, 9)) == std::vector<Parts>{{0, 2}, {1, 1}});
  CHECK(visited(oracle::unit_instance({1, 2, 3}, 2, 5)).empty());
}

TEST_CASE("enumerate reports energies and honors the cap", "[oracle]") {
  const auto inst = oracle::unit_instance({1, 2, 3}, 2, 10);
  std::vector<Scaled> energies;
  enumerate(inst, [&](std::span<const std::int64_t>, Scaled e) { energies.push_back(e); });
  CHECK(energies == std::vector<Scaled>{6, 8, 10});
  CHECK(code_of([&] { count_configurations(inst, 2); }) == ErrorCode::CapExceeded);
  CHECK(count_configurations(inst, 3) == 3);
}

TEST_CASE("count_configurations small cases", "[oracle]") {
  CHECK(count_configurations(oracle::unit_instance({1, 2, 3}, 2, 10)) == 3);
  CHECK(count_configurations(oracle::unit_instance({1, 2, 3}, 2, 9)) == 2);
  CHECK(count_configurations(oracle::unit_instance({1, 2, 3}, 2, 5)) == 0);
  CHECK(count_configurations(make_instance(make_schedule({1, 2, 3}, 1), 3, 3, 18)) == 1);
}

TEST_CASE("slack budgets count all compositions", "[oracle][property]") {
  for (unsigned s = 2; s <= 20; ++s) {
    for (unsigned n = 0; n <= 30; ++n) {
      const BigInt expected = oracle::pascal(n + s - 2, s - 2);
      if (expected > 2'000'000) continue;
      std::vector<Scaled> prices(s);
      for (unsigned i = 0; i < s; ++i) prices[i] = 1 + (i * 7) % 5;
      Scaled lambda1 = 0;
      for (Scaled p : prices) lambda1 += p;
      const auto inst = make_instance(make_schedule(prices, 1), 0, n, n * lambda1);
      INFO("s = " << s << ", N = " << n);
      REQUIRE(count_configurations(inst) == expected);
    }
  }
}

TEST_CASE("enumeration agrees with brute force and an energy DP", "[oracle][property]") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<Scaled> price(1, 9);
  std::uniform_int_distribution<int> size(2, 6);
  std::uniform_int_distribution<std::int64_t> count(0, 9);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Scaled> p(static_cast<std::size_t>(size(rng)));
    for (auto& v : p) v = price(rng);
    const std::int64_t n = count(rng);
    Scaled lambda1 = 0;
    for (Scaled v : p) lambda1 += v;
    const auto phi = static_cast<Scaled>(frac(rng) * static_cast<double>(n * lambda1));
    const auto inst = make_instance(make_schedule(p, 1), 0, n, phi);
    const auto brute = oracle::members(inst);
    REQUIRE(visited(inst) == brute);
    REQUIRE(count_configurations(inst) == oracle::dp_count(inst));
  }
}

TEST_CASE("count is nondecreasing in the budget", "[oracle][property]") {
  BigInt previous = 0;
  for (Scaled phi = 0; phi <= 8 * 20; phi += 3) {
    const auto inst = make_instance(make_schedule({5, 1, 4, 2, 3, 5}, 1), 0, 8, phi);
    const BigInt c = count_configurations(inst);
    REQUIRE(c >= previous);
    previous = c;
  }
}

TEST_CASE("cumulative_stats hand-counted band", "[oracle]") {
  const auto inst = oracle::unit_instance({1, 2, 3}, 2, 10);
  const auto uniform = make_params(inst, 0.0, -std::numbers::ln2);
  // epsilon = -3/4 makes delta = N^0 = 1.
  const auto st = cumulative_stats(inst, uniform, 2, -0.75, kDefaultVisitCap);
  CHECK(st.total_count == 3);
  CHECK(st.delta == 1.0);
  CHECK_THAT(st.center, WithinAbs(1.0, 1e-12));
  CHECK(st.deviating_count == 2);
  CHECK_THAT(st.deviation_fraction, WithinRel(2.0 / 3.0, 1e-15));
  REQUIRE(st.cumulative_mean.size() == 2);
  CHECK(st.cumulative_mean[0] == BigRational(1));
  CHECK(st.cumulative_mean[1] == BigRational(2));

  const auto wide = cumulative_stats(inst, uniform, 2, 0.6, kDefaultVisitCap);
  CHECK(wide.delta > 2.0);
  CHECK(wide.deviation_fraction == 0.0);
}

TEST_CASE("cumulative_stats at l = s is pinned to N", "[oracle]") {
  const auto inst = oracle::unit_instance({2, 1, 3, 1, 2}, 6, 40);
  const auto p = solve_params(inst);
  const auto st = cumulative_stats(inst, p, inst.enterprises(), -0.7, kDefaultVisitCap);
  CHECK(st.delta > std::abs(p.residual_n));
  CHECK(st.deviation_fraction == 0.0);
  CHECK(st.cumulative_mean.back() == BigRational(6));
}

TEST_CASE("cumulative means match brute force", "[oracle]") {
  const auto inst = oracle::unit_instance({3, 1, 2, 2, 1}, 7, 30);
  const auto members = oracle::members(inst);
  const auto st = ensemble_summary(inst);
  REQUIRE(st.total_count == members.size());
  for (std::size_t m = 0; m < inst.modes(); ++m) {
    std::int64_t total = 0;
    for (const auto& c : members)
      for (std::size_t i = 0; i <= m; ++i) total += c[i];
    CHECK(st.cumulative_mean[m] == BigRational(BigInt(total), BigInt(members.size())));
  }
}

TEST_CASE("lemma3_quantity on the hand-counted instance", "[oracle]") {
  const auto inst = oracle::unit_instance({1, 2, 3}, 2, 10);
  // threshold 10 - 2^0.75 = 8.318: shell {(0,2), (1,1)}.
  CHECK_THAT(lemma3_quantity(inst, 0.0, 0.25), WithinRel(2.0 / 3.0, 1e-15));
  CHECK_THAT(lemma3_quantity(inst, 0.1, 0.25), WithinRel((std::exp(-0.6) + std::exp(-0.8)) / 3.0, 1e-13));
  CHECK(lemma3_quantity(oracle::unit_instance({1, 2, 3}, 2, 7), 0.0, 0.25) == 0.0);
  CHECK(lemma3_quantity(inst, 1e6, 0.25) == 0.0);
  CHECK(code_of([] { lemma3_quantity(oracle::unit_instance({1, 2, 3}, 2, 5), 0.0, 0.25); }) ==
        ErrorCode::BudgetInfeasible);
}

TEST_CASE("sample_uniform acceptance and determinism", "[oracle]") {
  const auto slack = oracle::unit_instance({1, 2, 3}, 2, 12);
  CHECK(sample_uniform(slack, 1000, 1).acceptance_rate == 1.0);

  const auto tight = oracle::unit_instance({1, 2, 3}, 2, 9);
  const auto r = sample_uniform(tight, 100'000, 7);
  CHECK_THAT(r.acceptance_rate, WithinAbs(2.0 / 3.0, 0.01));
  for (const auto& c : r.samples) REQUIRE(composition_energy(tight, c.parts) <= 9);

  const auto a = sample_uniform(tight, 500, 42);
  const auto b = sample_uniform(tight, 500, 42);
  const auto c = sample_uniform(tight, 500, 43);
  bool same = true, differ = false;
  for (std::size_t i = 0; i < 500; ++i) {
    same = same && a.samples[i].parts == b.samples[i].parts;
    differ = differ || a.samples[i].parts != c.samples[i].parts;
  }
  CHECK(same);
  CHECK(differ);
}

TEST_CASE("sample_uniform rejects hopeless budgets", "[oracle]") {
  // Only the all-at-s composition fits among C(28, 8) candidates.
  const auto inst = make_instance(make_schedule(std::vector<Scaled>(10, 1), 1), 0, 20, 20);
  CHECK(code_of([&] { sample_uniform(inst, 10, 0); }) == ErrorCode::LowAcceptance);
  CHECK(code_of([&] { sample_uniform(inst, 0, 0); }) == ErrorCode::InvalidInput);
}

TEST_CASE("sampled S_l distribution converges to the exact one", "[oracle][property]") {
  const auto inst = oracle::unit_instance({2, 1, 3, 1, 2, 2}, 8, 45);
  const std::size_t l = 4;
  const auto exact = cumulative_distribution(inst, l);
  std::uint64_t total = 0;
  for (auto c : exact) total += c;
  const auto draws = sample_uniform(inst, 100'000, 3);
  std::vector<double> empirical(exact.size(), 0.0);
  for (const auto& c : draws.samples) empirical[static_cast<std::size_t>(c.parts[0] + c.parts[1] + c.parts[2])] += 1.0;
  double tv = 0.0;
  for (std::size_t k = 0; k < exact.size(); ++k)
    tv += std::abs(empirical[k] / 1e5 - static_cast<double>(exact[k]) / static_cast<double>(total));
  CHECK(0.5 * tv < 0.05);
}

TEST_CASE("unit-price family sits at the uniform mean", "[oracle]") {
  const auto inst = uniform_price_family(6);
  CHECK(inst.enterprises() == 6);
  CHECK(inst.energy() == 18.0);
  const auto p = solve_params(inst);
  CHECK(p.beta == 0.0);
  CHECK(count_configurations(inst) == oracle::dp_count(inst));
}
