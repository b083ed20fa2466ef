#include "lcs/errors.hpp"
#include "lcs/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Discrete locally conformally symplectic dynamics"};
  app.require_subcommand(1);

  std::string config_path;
  auto* integrate = app.add_subcommand("integrate", "Integrate one configured trajectory");
  integrate->add_option("--config", config_path, "experiment config (JSON)")->required();

  std::string conv_config;
  std::vector<double> hs;
  auto* convergence = app.add_subcommand("convergence", "Error table and fitted order");
  convergence->set_help_flag("--help", "Print this help message and exit");
  convergence->add_option("--config", conv_config, "experiment config (JSON)")->required();
  convergence->add_option("--h", hs, "step sizes, comma separated")
      ->required()
      ->delimiter(',');

  std::string system;
  std::uint64_t seed = 0;
  auto* verify = app.add_subcommand("verify", "Run the invariant suites on a builtin");
  verify->add_option("--system", system, "builtin system name")->required();
  verify->add_option("--seed", seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lcs::kExitConfig;
  }

  try {
    if (*integrate) return lcs::cmd_integrate(lcs::load_config(config_path), std::cerr);
    if (*convergence)
      return lcs::cmd_convergence(lcs::load_config(conv_config), hs, std::cout, std::cerr);
    if (*verify) return lcs::cmd_verify(system, seed, std::cout, std::cerr);
  } catch (const lcs::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return lcs::kExitConfig;
  } catch (const lcs::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return lcs::kExitNumerical;
  }
  return lcs::kExitConfig;
}
