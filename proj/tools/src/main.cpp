#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>

#include "nlrt/error.hpp"
#include "nlrt/version.hpp"
#include "nlrt_app/config.hpp"
#include "nlrt_app/runner.hpp"

namespace {

const std::map<std::string, std::string> summaries = {
    {"simulate", "first passage summaries over a grid of levels"},
    {"constants", "rho, nu and lambda from the backward functional"},
    {"verify-thm1", "window count against its limit"},
    {"verify-thm3", "joint limit of overshoot, xi and zeta at the passage time"},
    {"verify-thm4", "E t_a against the second-order expansion"},
    {"diag-lemma1", "boundary-window sums Delta_0 and Delta_1"},
    {"diag-lemma3", "coupling error of the windowed quadratic term"},
    {"example-fwci", "fixed-width confidence interval for an exponential rate"},
    {"example-rst", "repeated likelihood ratio test for an exponential rate"},
};

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<std::string> out;
  std::optional<unsigned> workers;
  bool print_config = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo toolkit for perturbed random walks and their first passage times"};
  app.set_version_flag("--version", std::string(nlrt::version));
  app.require_subcommand(1);

  Overrides o;
  for (const auto& kind : nlrt::app::experiment_kinds()) {
    CLI::App* sub = app.add_subcommand(kind, summaries.at(kind));
    sub->add_option("--config", o.config, "YAML experiment file");
    sub->add_option("--seed", o.seed, "base seed");
    sub->add_option("--reps", o.reps, "replications");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--workers", o.workers, "worker threads (results do not depend on this)");
    sub->add_flag("--print-config", o.print_config, "print the resolved config and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nlrt::app::exit_config;
  }

  const std::string kind = app.get_subcommands().front()->get_name();
  nlrt::app::ExperimentConfig config;
  try {
    if (!o.config.empty()) config = nlrt::app::load_config(o.config);
    config.kind = kind;
    if (o.seed) config.seed = *o.seed;
    if (o.reps) config.reps = *o.reps;
    if (o.out) config.output = *o.out;
    if (o.workers) config.workers = *o.workers;
    config.validate();
  } catch (const nlrt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return nlrt::app::exit_config;
  } catch (const std::runtime_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return nlrt::app::exit_io;
  }

  if (o.print_config) {
    std::cout << nlrt::app::to_yaml(config);
    return nlrt::app::exit_ok;
  }
  return nlrt::app::run(config, std::cerr);
}
