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

#include "ttmpc/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace ttmpc {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
  mutable bool used = false;
};

class Fields {
 public:
  Fields(const std::string& text, std::string origin)
      : origin_(std::move(origin)) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          fail(line_no, "", "malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty()) fail(line_no, "", "empty section name");
        continue;
      }
      const size_t eq = line.find('=');
      if (eq == std::string::npos)
        fail(line_no, section, "expected key = value");
      Entry e;
      e.section = section;
      e.key = trim(line.substr(0, eq));
      e.value = trim(line.substr(eq + 1));
      e.line = line_no;
      if (e.key.empty()) fail(line_no, section, "empty key");
      entries_.push_back(std::move(e));
    }
  }

  [[noreturn]] void fail(int line, const std::string& field,
                         const std::string& reason) const {
    std::string msg = origin_;
    if (line > 0) msg += ":" + std::to_string(line);
    msg += ": ";
    if (!field.empty()) msg += field + ": ";
    msg += reason;
    throw std::runtime_error(msg);
  }

  const Entry* find(const std::string& section, const std::string& key) const {
    const Entry* found = nullptr;
    for (const Entry& e : entries_) {
      if (e.section == section && e.key == key) {
        if (found)
          fail(e.line, section + "." + key, "duplicate key");
        found = &e;
      }
    }
    if (found) found->used = true;
    return found;
  }

  std::vector<const Entry*> find_all(const std::string& section,
                                     const std::string& key) const {
    std::vector<const Entry*> out;
    for (const Entry& e : entries_) {
      if (e.section == section && e.key == key) {
        e.used = true;
        out.push_back(&e);
      }
    }
    return out;
  }

  std::string require_string(const std::string& section,
                             const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) fail(0, section + "." + key, "required key is missing");
    return e->value;
  }

  double to_double(const Entry& e) const {
    try {
      size_t used = 0;
      const double v = std::stod(e.value, &used);
      if (trim(e.value.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    fail(e.line, e.section + "." + e.key, "not a number: '" + e.value + "'");
  }

  std::vector<double> to_doubles(const Entry& e, size_t count) const {
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string field;
    while (std::getline(ss, field, ',')) {
      field = trim(field);
      try {
        size_t used = 0;
        out.push_back(std::stod(field, &used));
        if (!trim(field.substr(used)).empty()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        fail(e.line, e.section + "." + e.key,
             "not a number: '" + field + "'");
      }
    }
    if (out.size() != count)
      fail(e.line, e.section + "." + e.key,
           "expected " + std::to_string(count) + " comma-separated numbers");
    return out;
  }

  double number(const std::string& section, const std::string& key,
                double fallback) const {
    const Entry* e = find(section, key);
    return e ? to_double(*e) : fallback;
  }

  int integer(const std::string& section, const std::string& key,
              int fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    const double v = to_double(*e);
    if (v != std::floor(v))
      fail(e->line, section + "." + key, "expected an integer");
    return static_cast<int>(v);
  }

  std::uint64_t unsigned64(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    try {
      size_t used = 0;
      const std::uint64_t v = std::stoull(e->value, &used);
      if (trim(e->value.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    fail(e->line, section + "." + key, "expected a nonnegative integer");
  }

  bool boolean(const std::string& section, const std::string& key,
               bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    fail(e->line, section + "." + key, "expected true or false");
  }

  std::string token(const std::string& section, const std::string& key,
                    const std::string& fallback,
                    const std::vector<std::string>& allowed) const {
    const Entry* e = find(section, key);
    const std::string v = e ? e->value : fallback;
    for (const std::string& a : allowed)
      if (v == a) return v;
    std::string msg = "expected one of:";
    for (const std::string& a : allowed) msg += " " + a;
    fail(e ? e->line : 0, section + "." + key, msg);
  }

  template <int N>
  Eigen::Matrix<double, N, 1> vec(const std::string& section,
                                  const std::string& key,
                                  const Eigen::Matrix<double, N, 1>& fallback)
      const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    const std::vector<double> v = to_doubles(*e, N);
    Eigen::Matrix<double, N, 1> out;
    for (int i = 0; i < N; ++i) out(i) = v[static_cast<size_t>(i)];
    return out;
  }

  void reject_unused() const {
    for (const Entry& e : entries_) {
      if (!e.used)
        fail(e.line, e.section + "." + e.key, "unknown key");
    }
  }

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::vector<Entry> entries_;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_vec(const Eigen::VectorXd& v) {
  std::string out;
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v(i));
  }
  return out;
}

Eigen::Vector4d diagonal_of(const Eigen::Matrix4d& m, const char* name) {
  if (!m.isApprox(Eigen::Matrix4d(m.diagonal().asDiagonal())))
    throw std::invalid_argument(std::string("serialize_scenario: ") + name +
                                " weights must be diagonal");
  return m.diagonal();
}

std::string dirname_of(const std::string& path) {
  const size_t slash = path.find_last_of('/');
  if (slash == std::string::npos) return "";
  return path.substr(0, slash + 1);
}

}  // namespace

const char* to_string(MissionKind kind) {
  switch (kind) {
    case MissionKind::kDriveToPose:
      return "drive-to-pose";
    case MissionKind::kPathFollow:
      return "path-follow";
    case MissionKind::kObstacleAvoid:
      return "obstacle-avoid";
  }
  return "unknown";
}

Scenario::Scenario() {
  state_lower << -1e20, -1e20, -params.theta1_max, -1e20;
  state_upper << 1e20, 1e20, params.theta1_max, 1e20;
  control_lower << 0.0, -params.phi_max;
  control_upper << params.v_max, params.phi_max;
}

OcpProblem Scenario::make_problem() const {
  OcpProblem p;
  p.horizon = horizon;
  p.dt = dt;
  p.params = params;
  p.weights = weights;
  p.x0 = initial;
  p.reference = {has_target ? target : initial};
  p.u_ref = Control{0.0, 0.0};
  p.u_prev = Control{0.0, 0.0};
  p.state_lower = state_lower;
  p.state_upper = state_upper;
  p.control_lower = control_lower;
  p.control_upper = control_upper;
  p.rate_lower = Eigen::Vector2d(-params.dv_max, -params.dphi_max);
  p.rate_upper = Eigen::Vector2d(params.dv_max, params.dphi_max);
  p.obstacles = obstacles;
  p.state_mode = state_mode;
  p.state_slack_weight = state_slack_weight;
  p.terminal_mode = TerminalMode::kCostOnly;
  p.integrator = prediction_integrator;
  return p;
}

void Scenario::validate() const {
  if (name.empty())
    throw std::invalid_argument("Scenario: name must not be empty");
  if (!(threshold > 0.0))
    throw std::invalid_argument("Scenario: threshold must be > 0");
  if (max_ticks < 0)
    throw std::invalid_argument("Scenario: max_ticks must be >= 0");
  if (kind == MissionKind::kPathFollow) {
    if (waypoint_file.empty())
      throw std::invalid_argument(
          "Scenario: path-follow missions need a waypoints file");
    guidance.validate();
  } else if (!has_target) {
    throw std::invalid_argument(std::string("Scenario: kind ") +
                                to_string(kind) + " needs a target");
  }
  plant.validate();
  make_problem().validate();
}

bool Scenario::operator==(const Scenario& other) const {
  return name == other.name && kind == other.kind &&
         backward == other.backward && initial.vec() == other.initial.vec() &&
         has_target == other.has_target &&
         (!has_target || target.vec() == other.target.vec()) &&
         waypoint_file == other.waypoint_file &&
         path_closed == other.path_closed &&
         guidance.lookahead == other.guidance.lookahead &&
         guidance.min_error == other.guidance.min_error &&
         threshold == other.threshold && max_ticks == other.max_ticks &&
         seed == other.seed && params.l1 == other.params.l1 &&
         params.l2 == other.params.l2 && params.width == other.params.width &&
         params.v_max == other.params.v_max &&
         params.phi_max == other.params.phi_max &&
         params.theta1_max == other.params.theta1_max &&
         params.dv_max == other.params.dv_max &&
         params.dphi_max == other.params.dphi_max &&
         params.r_body == other.params.r_body &&
         params.variant == other.params.variant &&
         horizon == other.horizon && dt == other.dt &&
         prediction_integrator == other.prediction_integrator &&
         weights.q == other.weights.q && weights.r == other.weights.r &&
         weights.p == other.weights.p && state_lower == other.state_lower &&
         state_upper == other.state_upper &&
         control_lower == other.control_lower &&
         control_upper == other.control_upper &&
         state_mode == other.state_mode &&
         state_slack_weight == other.state_slack_weight &&
         obstacles.size() == other.obstacles.size() &&
         [&] {
           for (size_t i = 0; i < obstacles.size(); ++i) {
             if (obstacles[i].center != other.obstacles[i].center ||
                 obstacles[i].radius != other.obstacles[i].radius ||
                 obstacles[i].r_safe != other.obstacles[i].r_safe)
               return false;
           }
           return true;
         }() &&
         planner.shooting == other.planner.shooting &&
         planner.warm_start == other.planner.warm_start &&
         planner.obstacle_margin == other.planner.obstacle_margin &&
         planner.solver.max_iterations == other.planner.solver.max_iterations &&
         planner.solver.max_outer_iterations ==
             other.planner.solver.max_outer_iterations &&
         planner.solver.kkt_tolerance == other.planner.solver.kkt_tolerance &&
         planner.solver.constraint_tolerance ==
             other.planner.solver.constraint_tolerance &&
         planner.solver.penalty_init == other.planner.solver.penalty_init &&
         planner.solver.penalty_growth ==
             other.planner.solver.penalty_growth &&
         planner.solver.lbfgs_memory == other.planner.solver.lbfgs_memory &&
         planner.solver.time_budget_s == other.planner.solver.time_budget_s &&
         plant.integrator == other.plant.integrator &&
         plant.substeps == other.plant.substeps &&
         plant.noise_std == other.plant.noise_std &&
         plant.actuator_tau_v == other.plant.actuator_tau_v &&
         plant.actuator_tau_phi == other.plant.actuator_tau_phi;
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  const Fields f(text, origin);
  Scenario s;

  s.name = f.require_string("mission", "name");
  const std::string kind =
      f.token("mission", "kind", "",
              {"drive-to-pose", "path-follow", "obstacle-avoid"});
  s.kind = kind == "drive-to-pose" ? MissionKind::kDriveToPose
           : kind == "path-follow" ? MissionKind::kPathFollow
                                   : MissionKind::kObstacleAvoid;
  s.backward =
      f.token("mission", "direction", "forward", {"forward", "backward"}) ==
      "backward";

  // Vehicle first: bound defaults derive from it.
  s.params.l1 = f.number("vehicle", "l1", s.params.l1);
  s.params.l2 = f.number("vehicle", "l2", s.params.l2);
  s.params.width = f.number("vehicle", "width", s.params.width);
  s.params.v_max = f.number("vehicle", "v_max", s.params.v_max);
  s.params.phi_max = f.number("vehicle", "phi_max", s.params.phi_max);
  s.params.theta1_max = f.number("vehicle", "theta1_max", s.params.theta1_max);
  s.params.dv_max = f.number("vehicle", "dv_max", s.params.dv_max);
  s.params.dphi_max = f.number("vehicle", "dphi_max", s.params.dphi_max);
  s.params.r_body = f.number("vehicle", "r_body", s.params.r_body);
  s.params.variant = f.token("vehicle", "model_variant", "paper",
                             {"paper", "two-length"}) == "paper"
                         ? ModelVariant::kPaper
                         : ModelVariant::kTwoLength;

  {
    const Entry* e = f.find("mission", "initial");
    if (!e) f.fail(0, "mission.initial", "required key is missing");
    const std::vector<double> v = f.to_doubles(*e, 4);
    s.initial = State{v[0], v[1], v[2], v[3]};
  }
  if (const Entry* e = f.find("mission", "target")) {
    const std::vector<double> v = f.to_doubles(*e, 4);
    s.target = State{v[0], v[1], v[2], v[3]};
    s.has_target = true;
  }
  if (const Entry* e = f.find("mission", "waypoints")) s.waypoint_file = e->value;
  s.path_closed = f.boolean("mission", "closed", false);
  s.threshold = f.number("mission", "threshold", s.threshold);
  s.max_ticks = f.integer("mission", "max_ticks", s.max_ticks);
  s.seed = f.unsigned64("mission", "seed", s.seed);

  if (s.kind == MissionKind::kPathFollow && s.waypoint_file.empty())
    f.fail(0, "mission.waypoints",
           "required for kind path-follow");
  if (s.kind != MissionKind::kPathFollow && !s.has_target)
    f.fail(0, "mission.target",
           std::string("required for kind ") + to_string(s.kind));

  s.horizon = f.integer("horizon", "n", s.horizon);
  s.dt = f.number("horizon", "dt", s.dt);
  s.prediction_integrator =
      f.token("horizon", "integrator", "euler", {"euler", "rk4"}) == "euler"
          ? IntegratorKind::kEuler
          : IntegratorKind::kRk4;

  {
    const Eigen::Vector4d q =
        f.vec<4>("weights", "q", s.weights.q.diagonal());
    const Eigen::Vector2d r =
        f.vec<2>("weights", "r", s.weights.r.diagonal());
    const Eigen::Vector4d p =
        f.vec<4>("weights", "p", s.weights.p.diagonal());
    s.weights = Weights::diagonal(q, r, p);
  }

  {
    Eigen::Vector4d state_lo, state_hi;
    state_lo << -1e20, -1e20, -s.params.theta1_max, -1e20;
    state_hi << 1e20, 1e20, s.params.theta1_max, 1e20;
    Eigen::Vector2d ctrl_lo, ctrl_hi;
    if (s.backward) {
      ctrl_lo << -s.params.v_max, -s.params.phi_max;
      ctrl_hi << 0.0, s.params.phi_max;
    } else {
      ctrl_lo << 0.0, -s.params.phi_max;
      ctrl_hi << s.params.v_max, s.params.phi_max;
    }
    s.state_lower = f.vec<4>("bounds", "state_lower", state_lo);
    s.state_upper = f.vec<4>("bounds", "state_upper", state_hi);
    s.control_lower = f.vec<2>("bounds", "control_lower", ctrl_lo);
    s.control_upper = f.vec<2>("bounds", "control_upper", ctrl_hi);
  }
  s.state_mode =
      f.token("bounds", "state_mode", "soft", {"soft", "hard"}) == "soft"
          ? StateConstraintMode::kSoft
          : StateConstraintMode::kHard;
  s.state_slack_weight =
      f.number("bounds", "state_slack_weight", s.state_slack_weight);

  for (const Entry* e : f.find_all("obstacles", "obstacle")) {
    const std::vector<double> v = f.to_doubles(*e, 4);
    Obstacle obs;
    obs.center = Eigen::Vector2d(v[0], v[1]);
    obs.radius = v[2];
    obs.r_safe = v[3];
    s.obstacles.push_back(obs);
  }

  s.planner.shooting = f.token("planner", "shooting", "multiple",
                               {"multiple", "single"}) == "multiple"
                           ? ShootingKind::kMultiple
                           : ShootingKind::kSingle;
  s.planner.warm_start = f.boolean("planner", "warm_start", true);
  s.planner.obstacle_margin =
      f.number("planner", "obstacle_margin", s.planner.obstacle_margin);
  SolverOptions& so = s.planner.solver;
  so.max_iterations = f.integer("planner", "max_iterations", so.max_iterations);
  so.max_outer_iterations =
      f.integer("planner", "max_outer_iterations", so.max_outer_iterations);
  so.kkt_tolerance = f.number("planner", "kkt_tolerance", so.kkt_tolerance);
  so.constraint_tolerance =
      f.number("planner", "constraint_tolerance", so.constraint_tolerance);
  so.penalty_init = f.number("planner", "penalty_init", so.penalty_init);
  so.penalty_growth = f.number("planner", "penalty_growth", so.penalty_growth);
  so.lbfgs_memory = f.integer("planner", "lbfgs_memory", so.lbfgs_memory);
  so.time_budget_s = f.number("planner", "time_budget_s", so.time_budget_s);

  s.guidance.lookahead = f.number("guidance", "lookahead", s.guidance.lookahead);
  s.guidance.min_error = f.number("guidance", "min_error", s.guidance.min_error);

  s.plant.integrator =
      f.token("plant", "integrator", "rk4", {"euler", "rk4"}) == "euler"
          ? IntegratorKind::kEuler
          : IntegratorKind::kRk4;
  s.plant.substeps = f.integer("plant", "substeps", s.plant.substeps);
  s.plant.noise_std =
      f.vec<4>("plant", "noise_std", Eigen::Vector4d::Zero());
  s.plant.actuator_tau_v =
      f.number("plant", "actuator_tau_v", s.plant.actuator_tau_v);
  s.plant.actuator_tau_phi =
      f.number("plant", "actuator_tau_phi", s.plant.actuator_tau_phi);
  s.plant.seed = s.seed;

  f.reject_unused();

  try {
    s.validate();
  } catch (const std::exception& ex) {
    throw std::runtime_error(origin + ": " + ex.what());
  }
  return s;
}

Scenario load_scenario(const std::string& filename) {
  std::ifstream in(filename);
  if (!in)
    throw std::runtime_error("load_scenario: cannot open " + filename);
  std::stringstream buffer;
  buffer << in.rdbuf();
  Scenario s = parse_scenario(buffer.str(), filename);
  if (!s.waypoint_file.empty() && s.waypoint_file.front() != '/')
    s.waypoint_file = dirname_of(filename) + s.waypoint_file;
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "[mission]\n";
  out << "name = " << s.name << "\n";
  out << "kind = " << to_string(s.kind) << "\n";
  out << "direction = " << (s.backward ? "backward" : "forward") << "\n";
  out << "initial = " << format_vec(s.initial.vec()) << "\n";
  if (s.has_target) out << "target = " << format_vec(s.target.vec()) << "\n";
  if (!s.waypoint_file.empty()) {
    out << "waypoints = " << s.waypoint_file << "\n";
    out << "closed = " << (s.path_closed ? "true" : "false") << "\n";
  }
  out << "threshold = " << format_double(s.threshold) << "\n";
  out << "max_ticks = " << s.max_ticks << "\n";
  out << "seed = " << s.seed << "\n";

  out << "\n[vehicle]\n";
  out << "l1 = " << format_double(s.params.l1) << "\n";
  out << "l2 = " << format_double(s.params.l2) << "\n";
  out << "width = " << format_double(s.params.width) << "\n";
  out << "v_max = " << format_double(s.params.v_max) << "\n";
  out << "phi_max = " << format_double(s.params.phi_max) << "\n";
  out << "theta1_max = " << format_double(s.params.theta1_max) << "\n";
  out << "dv_max = " << format_double(s.params.dv_max) << "\n";
  out << "dphi_max = " << format_double(s.params.dphi_max) << "\n";
  out << "r_body = " << format_double(s.params.r_body) << "\n";
  out << "model_variant = "
      << (s.params.variant == ModelVariant::kPaper ? "paper" : "two-length")
      << "\n";

  out << "\n[horizon]\n";
  out << "n = " << s.horizon << "\n";
  out << "dt = " << format_double(s.dt) << "\n";
  out << "integrator = "
      << (s.prediction_integrator == IntegratorKind::kEuler ? "euler" : "rk4")
      << "\n";

  out << "\n[weights]\n";
  out << "q = " << format_vec(diagonal_of(s.weights.q, "q")) << "\n";
  {
    const Eigen::Matrix2d& r = s.weights.r;
    if (!r.isApprox(Eigen::Matrix2d(r.diagonal().asDiagonal())))
      throw std::invalid_argument(
          "serialize_scenario: r weights must be diagonal");
    out << "r = " << format_vec(r.diagonal()) << "\n";
  }
  out << "p = " << format_vec(diagonal_of(s.weights.p, "p")) << "\n";

  out << "\n[bounds]\n";
  out << "state_lower = " << format_vec(s.state_lower) << "\n";
  out << "state_upper = " << format_vec(s.state_upper) << "\n";
  out << "control_lower = " << format_vec(s.control_lower) << "\n";
  out << "control_upper = " << format_vec(s.control_upper) << "\n";
  out << "state_mode = "
      << (s.state_mode == StateConstraintMode::kSoft ? "soft" : "hard")
      << "\n";
  out << "state_slack_weight = " << format_double(s.state_slack_weight)
      << "\n";

  if (!s.obstacles.empty()) {
    out << "\n[obstacles]\n";
    for (const Obstacle& o : s.obstacles) {
      out << "obstacle = " << format_double(o.center.x()) << ", "
          << format_double(o.center.y()) << ", " << format_double(o.radius)
          << ", " << format_double(o.r_safe) << "\n";
    }
  }

  out << "\n[planner]\n";
  out << "shooting = "
      << (s.planner.shooting == ShootingKind::kMultiple ? "multiple"
                                                        : "single")
      << "\n";
  out << "warm_start = " << (s.planner.warm_start ? "true" : "false") << "\n";
  out << "obstacle_margin = " << format_double(s.planner.obstacle_margin)
      << "\n";
  const SolverOptions& so = s.planner.solver;
  out << "max_iterations = " << so.max_iterations << "\n";
  out << "max_outer_iterations = " << so.max_outer_iterations << "\n";
  out << "kkt_tolerance = " << format_double(so.kkt_tolerance) << "\n";
  out << "constraint_tolerance = " << format_double(so.constraint_tolerance)
      << "\n";
  out << "penalty_init = " << format_double(so.penalty_init) << "\n";
  out << "penalty_growth = " << format_double(so.penalty_growth) << "\n";
  out << "lbfgs_memory = " << so.lbfgs_memory << "\n";
  out << "time_budget_s = " << format_double(so.time_budget_s) << "\n";

  if (s.kind == MissionKind::kPathFollow) {
    out << "\n[guidance]\n";
    out << "lookahead = " << format_double(s.guidance.lookahead) << "\n";
    out << "min_error = " << format_double(s.guidance.min_error) << "\n";
  }

  out << "\n[plant]\n";
  out << "integrator = "
      << (s.plant.integrator == IntegratorKind::kEuler ? "euler" : "rk4")
      << "\n";
  out << "substeps = " << s.plant.substeps << "\n";
  out << "noise_std = " << format_vec(s.plant.noise_std) << "\n";
  out << "actuator_tau_v = " << format_double(s.plant.actuator_tau_v) << "\n";
  out << "actuator_tau_phi = " << format_double(s.plant.actuator_tau_phi)
      << "\n";
  return out.str();
}

void save_scenario(const Scenario& scenario, const std::string& filename) {
  std::ofstream out(filename);
  if (!out)
    throw std::runtime_error("save_scenario: cannot open " + filename);
  out << serialize_scenario(scenario);
  if (!out)
    throw std::runtime_error("save_scenario: write failed for " + filename);
}

}  // namespace ttmpc
