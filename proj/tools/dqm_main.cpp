// dqm: configuration-space laboratory for density-deformed momentum/kinetic
// operators, classical-wavefunction dynamics and Fisher-information
// functionals. Exit codes: 0 pass, 1 invariant failure, 2 config error,
// 3 numerical abort.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dqm/errors.hpp"
#include "dqm/runner.hpp"

namespace {

int fail(const std::string& type, const std::string& message, int code) {
  nlohmann::json err;
  err["error"] = {{"type", type}, {"message", message}, {"exit_code", code}};
  std::cout << err.dump(2) << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dqm: deformed-operator quantum/classical laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed_override;
  std::optional<double> lambda_override;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "path to the JSON config")
        ->required();
    sub->add_option("--out", out_dir, "output directory (absent or empty)");
    sub->add_option("--seed", seed_override, "override integrator.seed");
    sub->add_option("--lambda", lambda_override, "override physics.lambda");
  };

  auto* analyze = app.add_subcommand("analyze", "static operator report");
  auto* evolve = app.add_subcommand("evolve", "time evolution run");
  auto* sweep = app.add_subcommand("sweep-lambda", "lambda sweep CSV");
  auto* check = app.add_subcommand("check", "invariant suite");
  for (auto* sub : {analyze, evolve, sweep, check}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  dqm::Command cmd = dqm::Command::analyze;
  if (evolve->parsed()) cmd = dqm::Command::evolve;
  if (sweep->parsed()) cmd = dqm::Command::sweep_lambda;
  if (check->parsed()) cmd = dqm::Command::check;

  try {
    dqm::ScenarioConfig cfg = dqm::load_config(config_path);
    if (seed_override) cfg.seed = *seed_override;
    if (lambda_override) cfg.lambda = *lambda_override;
    return dqm::run_command(cfg, cmd, out_dir);
  } catch (const dqm::ConfigError& e) {
    return fail("config", e.what(), 2);
  } catch (const dqm::NumericalAbort& e) {
    return fail("numerical", e.what(), 3);
  } catch (const std::invalid_argument& e) {
    return fail("config", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("numerical", e.what(), 3);
  }
}
