// Copyright 2026 The ttmpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "ttmpc/harness.hpp"
#include "ttmpc/mission_log.hpp"
#include "ttmpc/scenario.hpp"

namespace {

int cmd_run(const std::string& scenario_file, const std::string& out_dir,
            bool seed_set, std::uint64_t seed, const std::string& shooting,
            const std::string& integrator, int max_ticks) {
  ttmpc::Scenario scenario = ttmpc::load_scenario(scenario_file);
  if (seed_set) {
    scenario.seed = seed;
    scenario.plant.seed = seed;
  }
  if (!shooting.empty()) {
    scenario.planner.shooting = shooting == "multiple"
                                    ? ttmpc::ShootingKind::kMultiple
                                    : ttmpc::ShootingKind::kSingle;
  }
  if (!integrator.empty()) {
    scenario.prediction_integrator = integrator == "euler"
                                         ? ttmpc::IntegratorKind::kEuler
                                         : ttmpc::IntegratorKind::kRk4;
  }
  if (max_ticks > 0) scenario.max_ticks = max_ticks;

  const std::string dir =
      out_dir.empty() ? "out/" + scenario.name : out_dir;
  const int status = ttmpc::run_scenario_to_dir(scenario, dir);

  const ttmpc::MissionLog log = ttmpc::read_mission_artifacts(dir);
  const ttmpc::MissionSummary s = log.summary();
  std::cout << "scenario " << s.scenario << ": "
            << (s.completed ? "success" : "timed-out") << " after " << s.ticks
            << " rows, final error " << s.final_error << " m, mean solve "
            << s.mean_solve_time_s << " s\n";
  std::cout << "artifacts written to " << dir << "\n";
  return status;
}

int cmd_compare(const std::string& dir_a, const std::string& dir_b) {
  const ttmpc::MissionLog a = ttmpc::read_mission_artifacts(dir_a);
  const ttmpc::MissionLog b = ttmpc::read_mission_artifacts(dir_b);
  std::cout << ttmpc::compare_report(a, b);
  return 0;
}

int cmd_check_derivatives(const std::string& scenario_file, int points,
                          double tolerance) {
  const ttmpc::Scenario scenario = ttmpc::load_scenario(scenario_file);
  const ttmpc::DerivativeCheck check =
      ttmpc::check_scenario_derivatives(scenario, points);
  std::cout << "objective gradient error:   " << check.objective_error << "\n";
  std::cout << "equality Jacobian error:    " << check.equality_error << "\n";
  std::cout << "inequality Jacobian error:  " << check.inequality_error
            << "\n";
  std::cout << "worst:                      " << check.max_error()
            << (check.max_error() <= tolerance ? "  (ok)" : "  (FAIL)")
            << "\n";
  return check.max_error() <= tolerance ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tractor-trailer nonlinear MPC benchmark harness"};
  app.require_subcommand(1);

  std::string scenario_file;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string shooting;
  std::string integrator;
  int max_ticks = 0;

  CLI::App* run = app.add_subcommand("run", "run a scenario end to end");
  run->add_option("scenario", scenario_file, "scenario file")->required();
  run->add_option("--out", out_dir, "output directory (default out/<name>)");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--shooting", shooting, "override the transcription")
      ->check(CLI::IsMember({"multiple", "single"}));
  run->add_option("--integrator", integrator,
                  "override the planner's prediction integrator")
      ->check(CLI::IsMember({"euler", "rk4"}));
  run->add_option("--max-ticks", max_ticks, "override the tick cap");

  std::string dir_a, dir_b;
  CLI::App* compare =
      app.add_subcommand("compare", "diff the metrics of two run directories");
  compare->add_option("logA", dir_a, "first run directory")->required();
  compare->add_option("logB", dir_b, "second run directory")->required();

  std::string check_file;
  int points = 5;
  double tolerance = 1e-5;
  CLI::App* check = app.add_subcommand(
      "check-derivatives",
      "finite-difference audit of the scenario's gradients and Jacobians");
  check->add_option("scenario", check_file, "scenario file")->required();
  check->add_option("--points", points, "number of random test points");
  check->add_option("--tolerance", tolerance, "pass/fail bar");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(scenario_file, out_dir, seed_opt->count() > 0, seed,
                     shooting, integrator, max_ticks);
    if (compare->parsed()) return cmd_compare(dir_a, dir_b);
    if (check->parsed())
      return cmd_check_derivatives(check_file, points, tolerance);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 2;
}
