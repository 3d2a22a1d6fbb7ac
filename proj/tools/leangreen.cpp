#include <CLI11.hpp>

#include "leangreen/cli.hpp"

namespace cli = leangreen::cli;

int main(int argc, char** argv) {
  CLI::App app{"Batch production line simulator with energy accounting and lean/green metrics"};
  app.require_subcommand(1);
  int code = 0;

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a line config against its invariants");
  validate->add_option("config", validate_path, "line config (JSON)")->required();
  validate->callback([&] { code = cli::cmd_validate(validate_path); });

  cli::SimulateOptions sim;
  std::string sim_factors;
  auto* simulate = app.add_subcommand("simulate", "run replications and write a report");
  simulate->add_option("config", sim.config_path, "line config (JSON)")->required();
  simulate->add_option("--reps", sim.reps, "number of replications")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "base seed")->capture_default_str();
  simulate->add_option("--out", sim.out_path, "report JSON path (default: standard output)");
  simulate->add_option("--factors", sim_factors, "OEEE factor mode")->check(CLI::IsMember({"supplied", "derived"}));
  simulate->add_option("--workers", sim.workers, "worker threads (0 = all cores)")->capture_default_str();
  simulate->callback([&] {
    sim.factors = cli::parse_factor_mode(sim_factors);
    code = cli::cmd_simulate(sim);
  });

  cli::EvsmOptions ev;
  auto* evsm = app.add_subcommand("evsm", "render an energy value stream map from a report");
  evsm->add_option("config", ev.config_path, "line config (JSON)")->required();
  evsm->add_option("--report", ev.report_path, "report produced by simulate")->required();
  evsm->add_option("--format", ev.format, "text or dot")->check(CLI::IsMember({"text", "dot"}))->capture_default_str();
  evsm->add_option("--out", ev.out_path, "output path (default: standard output)");
  evsm->callback([&] { code = cli::cmd_evsm(ev); });

  cli::CompareOptions cmp;
  std::string cmp_factors;
  auto* compare = app.add_subcommand("compare", "compare a scenario delta against the base line");
  compare->add_option("config", cmp.config_path, "base line config (JSON)")->required();
  compare->add_option("delta", cmp.delta_path, "scenario delta (JSON)")->required();
  compare->add_option("--reps", cmp.reps, "replications per side")->capture_default_str();
  compare->add_option("--seed", cmp.seed, "base seed shared by both sides")->capture_default_str();
  compare->add_option("--out", cmp.out_path, "comparison JSON path (default: standard output)");
  compare->add_option("--factors", cmp_factors, "OEEE factor mode")->check(CLI::IsMember({"supplied", "derived"}));
  compare->add_option("--workers", cmp.workers, "worker threads (0 = all cores)")->capture_default_str();
  compare->callback([&] {
    cmp.factors = cli::parse_factor_mode(cmp_factors);
    code = cli::cmd_compare(cmp);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kInputError;
  }
  return code;
}
