// Solve a small instance and print the integer share counts.

#include <iostream>
#include <string>
#include <vector>

#include "bealloc/model.hpp"
#include "bealloc/solver.hpp"

int main() {
  const std::vector<std::string> prices = {"12.50", "8.75", "20.00", "4.10", "15.25", "9.90"};
  const auto inst = bealloc::build_instance(prices, 10, 40, "1500");
  const auto params = bealloc::solve_params(inst);
  const auto alloc = bealloc::build_allocation(inst, params);

  std::cout << "beta = " << params.beta << ", sigma = " << params.sigma << "\n";
  for (std::size_t i = 0; i < alloc.counts.size(); ++i)
    std::cout << "C_" << i + 1 << " = " << alloc.counts[i] << "\n";
  std::cout << "spend = " << bealloc::format_scaled(alloc.spend, inst.scale()) << " of "
            << bealloc::format_scaled(inst.bounds.budget, inst.scale()) << "\n";
}
