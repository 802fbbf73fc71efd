#pragma once

#include <cstdint>
#include <vector>

#include "bealloc/model.hpp"

namespace bealloc {

/// Scaled test family: s = n enterprises at unit price, K = 0, M = n, and the
/// budget at the beta = 0 mean energy, Phi = n * mean(lambda_2..lambda_s) = n^2/2.
inline ProblemInstance uniform_price_family(std::int64_t n) {
  if (n < 2) throw Error(ErrorCode::TooFewEnterprises, "family needs n >= 2");
  constexpr Scaled scale = 10;
  std::vector<Scaled> prices(static_cast<std::size_t>(n), scale);
  return make_instance(make_schedule(std::move(prices), scale), 0, n, checked_mul(5, checked_mul(n, n)));
}

}  // namespace bealloc
