#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fkpp/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Reaction-diffusion experiments for u_t = u_xx - u^q + u^p"};
  app.require_subcommand(1);

  fkpp::cli::RunOptions options;
  std::int64_t seed = 0;
  std::string selected;

  for (std::string_view name : fkpp::cli::subcommands()) {
    CLI::App* sub = app.add_subcommand(std::string(name));
    sub->add_option("--config", options.config_path, "config file")->required();
    sub->add_option("--out", options.out_dir, "output directory");
    sub->add_option("--seed", seed, "reserved, all algorithms are deterministic");
    sub->add_flag("--quiet", options.quiet, "suppress the summary line");
    sub->callback([&selected, name] { selected = std::string(name); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : fkpp::cli::kExitError;
  }

  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--seed") > 0) options.seed = seed;
  }
  return fkpp::cli::run(selected, options, std::cout, std::cerr);
}
