#include <CLI11.hpp>

#include <iostream>

#include "benard/commands.hpp"
#include "benard/error.hpp"

int main(int argc, char** argv) {
  using namespace benard;
  CLI::App app{"Stochastic Boussinesq (Benard) Galerkin solver and large-deviation toolkit"};
  app.require_subcommand(1);

  CommandOptions opt;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opt.config_path, "INI configuration file");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--threads", opt.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", opt.out_dir, "output directory (overrides [output] dir)");
    sub->add_option("--basis-cache", opt.basis_cache, "basis cache file (BNRD)");
  };

  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const CommandOptions&);
  };
  const Entry entries[] = {
      {"simulate", "stochastic trajectory", cmd_simulate},
      {"skeleton", "controlled deterministic trajectory", cmd_skeleton},
      {"mam", "minimum-action control for a target", cmd_mam},
      {"weakconv", "weak convergence of the stochastic solution to the skeleton", cmd_weakconv},
      {"compactness", "continuity of the skeleton along a weakly converging control sequence", cmd_compactness},
      {"increments", "dyadic time-increment statistic", cmd_increments},
      {"mcldp", "Monte Carlo estimate of exit probabilities", cmd_mcldp},
      {"diagnostics", "identities, inequalities and noise constants", cmd_diagnostics},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> subs;
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, true);
    subs.emplace_back(sub, &e);
  }
  auto* self = app.add_subcommand("selftest", "built-in consistency checks");
  add_common(self, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  for (auto* sub : app.get_subcommands())
    if (sub->count("--seed")) opt.seed = seed;

  try {
    if (*self) return cmd_selftest(opt, std::cout);
    for (auto& [sub, e] : subs)
      if (*sub) return e->fn(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
