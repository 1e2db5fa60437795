// quasiblow <kind> --config <path> [--out <dir>] [--workers <k>] [--seed <u64>]

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "quasiblow/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Gradient blow-up simulations for u_tt = c(u)^2 u_xx + lambda c(u) c'(u) u_x^2"};
  std::string kind;
  std::string config;
  std::string out = "out";
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  app.add_option("kind", kind, "simulate, sweep, riccati, carlemann, psystem or verify")
      ->required()
      ->check(CLI::IsMember({"simulate", "sweep", "riccati", "carlemann", "psystem", "verify"}));
  app.add_option("--config", config, "JSON configuration")->required();
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_option("--workers", workers, "concurrent sweep cells")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "seed of the randomized suites");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  quasiblow::ScenarioSpec spec;
  try {
    spec = quasiblow::load_config(config);
  } catch (const quasiblow::ValidationError& e) {
    std::cerr << "quasiblow: " << config << ": " << e.what() << '\n';
    return 2;
  }
  if (std::string(quasiblow::to_string(spec.kind)) != kind) {
    std::cerr << "quasiblow: configuration declares kind '" << quasiblow::to_string(spec.kind)
              << "' but '" << kind << "' was requested\n";
    return 2;
  }
  quasiblow::RunOptions opt;
  opt.out_dir = out;
  opt.workers = workers;
  if (*seed_opt) opt.seed = seed;
  const int rc = quasiblow::run_scenario(spec, opt);
  std::cout << (rc == 0 ? "ok" : rc == 2 ? "invalid" : "failed") << ": " << (opt.out_dir / "run.json").string()
            << '\n';
  return rc;
}
