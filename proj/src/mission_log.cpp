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

#include "ttmpc/mission_log.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ttmpc {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& filename) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("cannot open for writing: " + filename);
  return out;
}

double parse_double(const std::string& s) {
  // strtod round-trips the %.17g encodings including inf and nan.
  return std::strtod(s.c_str(), nullptr);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

const char* intern_status(const std::string& s) {
  for (SolveStatus status :
       {SolveStatus::kOptimal, SolveStatus::kMaxIterations,
        SolveStatus::kInfeasible, SolveStatus::kTimeBudget}) {
    if (s == to_string(status)) return to_string(status);
  }
  throw std::runtime_error("unknown solver status in log: " + s);
}

}  // namespace

MissionSummary MissionLog::summary() const {
  MissionSummary s;
  s.scenario = scenario_name;
  s.kind = kind;
  s.completed = completed;
  s.ticks = static_cast<int>(ticks.size());
  s.total_wall_time_s = wall_time_s;
  s.sim_time_s = sim_time_s;
  s.real_time_factor = wall_time_s > 0.0 ? sim_time_s / wall_time_s : 0.0;
  s.min_clearance = std::numeric_limits<double>::infinity();
  s.max_path_error = std::numeric_limits<double>::quiet_NaN();
  s.rmse_path_error = std::numeric_limits<double>::quiet_NaN();
  if (ticks.empty()) return s;

  double sq_sum = 0.0;
  int path_samples = 0;
  double max_path = 0.0;
  for (const TickRecord& r : ticks) {
    if (!std::isnan(r.path_error)) {
      max_path = std::max(max_path, r.path_error);
      sq_sum += r.path_error * r.path_error;
      ++path_samples;
    }
    s.min_clearance = std::min(s.min_clearance, r.min_clearance);
    s.max_abs_theta1 = std::max(s.max_abs_theta1, std::abs(r.state.theta1));
    s.mean_solve_time_s += r.solve_time_s;
    s.max_solve_time_s = std::max(s.max_solve_time_s, r.solve_time_s);
    s.total_iterations += r.iterations;
    if (r.fallback) ++s.fallback_ticks;
  }
  if (path_samples > 0) {
    s.max_path_error = max_path;
    s.rmse_path_error = std::sqrt(sq_sum / path_samples);
  }
  s.mean_solve_time_s /= static_cast<double>(ticks.size());
  s.final_error = ticks.back().error;
  return s;
}

void write_mission_csv(const MissionLog& log, const std::string& filename) {
  std::ofstream out = open_out(filename);
  out << "# scenario = " << log.scenario_name << "\n";
  out << "# kind = " << log.kind << "\n";
  out << "# completed = " << (log.completed ? "true" : "false") << "\n";
  out << "tick,t,x2,y2,theta1,theta2,v,phi,error,path_error,min_clearance,"
         "status,fallback,iterations,outer_iterations,kkt,max_defect,"
         "objective\n";
  for (const TickRecord& r : log.ticks) {
    out << r.tick << ',' << fmt(r.t) << ',' << fmt(r.state.x2) << ','
        << fmt(r.state.y2) << ',' << fmt(r.state.theta1) << ','
        << fmt(r.state.theta2) << ',' << fmt(r.command.v) << ','
        << fmt(r.command.phi) << ',' << fmt(r.error) << ','
        << fmt(r.path_error) << ',' << fmt(r.min_clearance) << ','
        << r.status << ',' << (r.fallback ? 1 : 0) << ',' << r.iterations
        << ',' << r.outer_iterations << ',' << fmt(r.kkt) << ','
        << fmt(r.max_defect) << ',' << fmt(r.objective) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + filename);
}

void write_timing_csv(const MissionLog& log, const std::string& filename) {
  std::ofstream out = open_out(filename);
  out << "tick,solve_time_s\n";
  for (const TickRecord& r : log.ticks)
    out << r.tick << ',' << fmt(r.solve_time_s) << '\n';
  out << "total_wall_time_s," << fmt(log.wall_time_s) << '\n';
  out << "sim_time_s," << fmt(log.sim_time_s) << '\n';
  if (!out) throw std::runtime_error("write failed: " + filename);
}

void write_summary(const MissionSummary& s, const std::string& filename) {
  std::ofstream out = open_out(filename);
  out << "scenario = " << s.scenario << "\n";
  out << "kind = " << s.kind << "\n";
  out << "status = " << (s.completed ? "success" : "timed-out") << "\n";
  out << "ticks = " << s.ticks << "\n";
  out << "final_error = " << fmt(s.final_error) << "\n";
  out << "max_path_error = " << fmt(s.max_path_error) << "\n";
  out << "rmse_path_error = " << fmt(s.rmse_path_error) << "\n";
  out << "min_clearance = " << fmt(s.min_clearance) << "\n";
  out << "max_abs_theta1 = " << fmt(s.max_abs_theta1) << "\n";
  out << "mean_solve_time_s = " << fmt(s.mean_solve_time_s) << "\n";
  out << "max_solve_time_s = " << fmt(s.max_solve_time_s) << "\n";
  out << "total_wall_time_s = " << fmt(s.total_wall_time_s) << "\n";
  out << "sim_time_s = " << fmt(s.sim_time_s) << "\n";
  out << "real_time_factor = " << fmt(s.real_time_factor) << "\n";
  out << "total_iterations = " << s.total_iterations << "\n";
  out << "fallback_ticks = " << s.fallback_ticks << "\n";
  if (!out) throw std::runtime_error("write failed: " + filename);
}

void write_plot_series(const MissionLog& log, const WaypointPath* path,
                       const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out = open_out(dir + "/trajectory.csv");
    out << "t,x2,y2\n";
    for (const TickRecord& r : log.ticks)
      out << fmt(r.t) << ',' << fmt(r.state.x2) << ',' << fmt(r.state.y2)
          << '\n';
  }
  if (path) {
    std::ofstream out = open_out(dir + "/reference.csv");
    out << "arclength,x2,y2,theta2\n";
    for (int i = 0; i < path->size(); ++i)
      out << fmt(path->arclength[static_cast<size_t>(i)]) << ','
          << fmt((*path)[i].x2) << ',' << fmt((*path)[i].y2) << ','
          << fmt((*path)[i].theta2) << '\n';
  }
  {
    std::ofstream out = open_out(dir + "/controls.csv");
    out << "tick,t,v,phi\n";
    for (const TickRecord& r : log.ticks)
      out << r.tick << ',' << fmt(r.t) << ',' << fmt(r.command.v) << ','
          << fmt(r.command.phi) << '\n';
  }
  {
    std::ofstream out = open_out(dir + "/hitch_angle.csv");
    out << "tick,t,theta1\n";
    for (const TickRecord& r : log.ticks)
      out << r.tick << ',' << fmt(r.t) << ',' << fmt(r.state.theta1) << '\n';
  }
  {
    std::ofstream out = open_out(dir + "/error.csv");
    out << "tick,t,error,path_error\n";
    for (const TickRecord& r : log.ticks)
      out << r.tick << ',' << fmt(r.t) << ',' << fmt(r.error) << ','
          << fmt(r.path_error) << '\n';
  }
}

void write_mission_artifacts(const MissionLog& log, const WaypointPath* path,
                             const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_mission_csv(log, dir + "/mission.csv");
  write_timing_csv(log, dir + "/timing.csv");
  write_summary(log.summary(), dir + "/summary.txt");
  write_plot_series(log, path, dir + "/plots");
}

MissionLog read_mission_artifacts(const std::string& dir) {
  MissionLog log;
  std::ifstream in(dir + "/mission.csv");
  if (!in)
    throw std::runtime_error("cannot open " + dir + "/mission.csv");

  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const size_t eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(1, eq - 1);
      const std::string value = line.substr(eq + 1);
      const auto strip = [](const std::string& s) {
        size_t a = s.find_first_not_of(' ');
        size_t b = s.find_last_not_of(" \r");
        return a == std::string::npos ? std::string()
                                      : s.substr(a, b - a + 1);
      };
      if (strip(key) == "scenario") log.scenario_name = strip(value);
      if (strip(key) == "kind") log.kind = strip(value);
      if (strip(key) == "completed") log.completed = strip(value) == "true";
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // column order is fixed by write_mission_csv
      continue;
    }
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != 18)
      throw std::runtime_error(dir + "/mission.csv: malformed row: " + line);
    TickRecord r;
    r.tick = std::stoi(f[0]);
    r.t = parse_double(f[1]);
    r.state = State{parse_double(f[2]), parse_double(f[3]),
                    parse_double(f[4]), parse_double(f[5])};
    r.command = Control{parse_double(f[6]), parse_double(f[7])};
    r.error = parse_double(f[8]);
    r.path_error = parse_double(f[9]);
    r.min_clearance = parse_double(f[10]);
    r.status = intern_status(f[11]);
    r.fallback = f[12] == "1";
    r.iterations = std::stoi(f[13]);
    r.outer_iterations = std::stoi(f[14]);
    r.kkt = parse_double(f[15]);
    r.max_defect = parse_double(f[16]);
    r.objective = parse_double(f[17]);
    log.ticks.push_back(r);
  }

  std::ifstream timing(dir + "/timing.csv");
  if (timing) {
    size_t row = 0;
    bool header = false;
    while (std::getline(timing, line)) {
      if (line.empty()) continue;
      if (!header) {
        header = true;
        continue;
      }
      const std::vector<std::string> f = split_csv(line);
      if (f.size() != 2) continue;
      if (f[0] == "total_wall_time_s") {
        log.wall_time_s = parse_double(f[1]);
      } else if (f[0] == "sim_time_s") {
        log.sim_time_s = parse_double(f[1]);
      } else if (row < log.ticks.size()) {
        log.ticks[row].solve_time_s = parse_double(f[1]);
        ++row;
      }
    }
  }
  return log;
}

std::string compare_report(const MissionLog& a, const MissionLog& b) {
  if (a.scenario_name != b.scenario_name)
    throw std::invalid_argument("compare: logs are from different scenarios (" +
                                a.scenario_name + " vs " + b.scenario_name +
                                ")");
  const MissionSummary sa = a.summary();
  const MissionSummary sb = b.summary();

  std::ostringstream out;
  const auto row = [&out](const std::string& label, double va, double vb) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-22s %16.6g %16.6g %16.6g\n",
                  label.c_str(), va, vb, vb - va);
    out << buf;
  };
  out << "scenario: " << sa.scenario << "\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-22s %16s %16s %16s\n", "metric", "A", "B",
                "B-A");
  out << buf;
  row("ticks", sa.ticks, sb.ticks);
  row("completed", sa.completed ? 1 : 0, sb.completed ? 1 : 0);
  row("final_error", sa.final_error, sb.final_error);
  row("max_path_error", sa.max_path_error, sb.max_path_error);
  row("rmse_path_error", sa.rmse_path_error, sb.rmse_path_error);
  row("min_clearance", sa.min_clearance, sb.min_clearance);
  row("max_abs_theta1", sa.max_abs_theta1, sb.max_abs_theta1);
  row("mean_solve_time_s", sa.mean_solve_time_s, sb.mean_solve_time_s);
  row("total_iterations", static_cast<double>(sa.total_iterations),
      static_cast<double>(sb.total_iterations));
  row("fallback_ticks", sa.fallback_ticks, sb.fallback_ticks);
  return out.str();
}

}  // namespace ttmpc
