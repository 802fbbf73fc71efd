// bealloc: risk-minimizing monotone allocation and its combinatorial checks.
//
//   bealloc solve     --prices p.csv --min-shares K --max-shares M --budget X
//   bealloc enumerate --prices p.csv --min-shares K --max-shares M --budget X [--l L] [--samples S]
//   bealloc verify    [--epsilon E] [--samples S --seed S] [--n-values 6,9,12,15]
//   bealloc zcheck    [--prices ... | --beta B --n-values 20,40,80] [--grid G]

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "bealloc/commands.hpp"

namespace {

void add_common_options(CLI::App* sub, bealloc::RunConfig& cfg) {
  sub->add_option("--prices", cfg.prices_path, "CSV of prices by ascending priority ('price' or 'index,price')");
  sub->add_option("--min-shares", cfg.min_shares, "K, minimum shares of the lowest-priority enterprise");
  sub->add_option("--max-shares", cfg.max_shares, "M, maximum shares of the highest-priority enterprise");
  sub->add_option("--budget", cfg.budget, "budget Phi (decimal)");
  sub->add_option("--scale", cfg.scale, "fixed-point denominator for prices and budget")->capture_default_str();
  sub->add_option("--epsilon", cfg.epsilon, "band exponent offset: delta = N^(3/4 + epsilon)")->capture_default_str();
  sub->add_option("--lemma3-epsilon", cfg.lemma3_epsilon, "shell offset: energy <= E - N^(1/2 + epsilon)")
      ->capture_default_str();
  sub->add_option("--l", cfg.l, "prefix index l for cumulative statistics (2..s)");
  sub->add_option("--beta", cfg.beta_override, "fixed beta for zcheck");
  sub->add_option("--samples", cfg.samples, "use rejection sampling with this many draws");
  sub->add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();
  sub->add_option("--cap", cfg.cap, "maximum configurations visited by exact enumeration")->capture_default_str();
  sub->add_option("--grid", cfg.grid, "quadrature nodes for the Fourier integral")->capture_default_str();
  sub->add_option("--n-values", cfg.n_values, "family sizes N")->delimiter(',');
  sub->add_option("--doublings", cfg.doublings, "rows in the N-doubling schedule of zcheck")->capture_default_str();
  sub->add_option("--out", cfg.out_path, "write the report here instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bose-Einstein occupancy allocation under a budget"};
  app.require_subcommand(1);
  bealloc::RunConfig cfg;

  struct Entry {
    const char* name;
    const char* help;
    bealloc::Command command;
  };
  const Entry entries[] = {
      {"solve", "solve for (beta, sigma) and the integer allocation", bealloc::Command::Solve},
      {"enumerate", "count the configuration set and its cumulative statistics", bealloc::Command::Enumerate},
      {"verify", "concentration and low-energy-shell trends on the unit-price family", bealloc::Command::Verify},
      {"zcheck", "exact, integral and saddle-point partition functions", bealloc::Command::Zcheck},
  };
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common_options(sub, cfg);
    sub->callback([&cfg, cmd = e.command] { cfg.command = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 4;
  }
  return bealloc::run(cfg, std::cout, std::cerr);
}
