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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "ttmpc/guidance.hpp"

using namespace ttmpc;

namespace {

// Arc of the circle centered at (5,5) with radius 5, angles a0..a1 inclusive.
std::vector<Eigen::Vector2d> circle_arc(double a0, double a1, int n) {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double a = a0 + (a1 - a0) * i / (n - 1);
    pts.emplace_back(5.0 + 5.0 * std::cos(a), 5.0 + 5.0 * std::sin(a));
  }
  return pts;
}

std::vector<Eigen::Vector2d> straight_east(double length, int n) {
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < n; ++i)
    pts.emplace_back(length * i / (n - 1), 0.0);
  return pts;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/ttmpc_guidance_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

double wrapped_diff(double a, double b) { return std::remainder(a - b, 2.0 * M_PI); }

}  // namespace

TEST_CASE("headings follow the tangent around a half circle") {
  // South point, east point, north point, traversed counterclockwise.
  const auto pts = circle_arc(-M_PI / 2.0, M_PI / 2.0, 201);
  const WaypointPath path = path_from_points(pts, false, false);
  REQUIRE(path.size() == 201);

  // Interior headings come from central differences, so the midpoint is
  // exact; the endpoints use one-sided chords and sit half a step off.
  CHECK(path[0].theta2 == doctest::Approx(M_PI / 2.0).epsilon(0.01));
  CHECK(path[100].theta2 == doctest::Approx(M_PI));
  CHECK(path[200].theta2 == doctest::Approx(3.0 * M_PI / 2.0).epsilon(0.01));
  for (int i = 1; i < path.size(); ++i)
    CHECK(path[i].theta2 > path[i - 1].theta2);
  for (int i = 0; i < path.size(); ++i) CHECK(path[i].theta1 == 0.0);
  CHECK(path.total_length() == doctest::Approx(5.0 * M_PI).epsilon(1e-4));
  CHECK(path.arclength[0] == 0.0);
}

TEST_CASE("backward paths face away from the direction of travel") {
  const auto pts = circle_arc(M_PI / 2.0, 3.0 * M_PI / 2.0, 201);
  const WaypointPath fwd =
      path_from_points(pts, false, false, -M_PI / 2.0);
  const WaypointPath bwd = path_from_points(pts, false, true, M_PI / 2.0);

  // Reversing traversal flips every tangent, so headings differ by exactly
  // half a turn sample for sample.
  for (int i = 0; i < bwd.size(); i += 10)
    CHECK(std::abs(wrapped_diff(bwd[i].theta2, fwd[i].theta2 + M_PI)) <= 1e-12);

  // North -> west -> south while backing: the trailer still faces +y at the
  // start and ends facing -y after sweeping through pi.
  CHECK(bwd[0].theta2 == doctest::Approx(M_PI / 2.0).epsilon(0.01));
  CHECK(bwd[100].theta2 == doctest::Approx(M_PI));
  CHECK(bwd[200].theta2 == doctest::Approx(3.0 * M_PI / 2.0).epsilon(0.01));
}

TEST_CASE("the heading hint picks the starting band") {
  const auto pts = circle_arc(-M_PI / 2.0, M_PI / 2.0, 51);
  const WaypointPath up = path_from_points(pts, false, false, 2.0 * M_PI);
  CHECK(up[0].theta2 ==
        doctest::Approx(M_PI / 2.0 + 2.0 * M_PI).epsilon(0.01));
  const WaypointPath down = path_from_points(pts, false, false, -2.0 * M_PI);
  CHECK(down[0].theta2 ==
        doctest::Approx(M_PI / 2.0 - 2.0 * M_PI).epsilon(0.01));
}

TEST_CASE("degenerate point lists are rejected") {
  CHECK_THROWS_AS(path_from_points({{0.0, 0.0}}, false, false),
                  std::invalid_argument);
  CHECK_THROWS_AS(path_from_points({{0.0, 0.0}, {0.0, 0.0}}, false, false),
                  std::invalid_argument);
}

TEST_CASE("nearest waypoint minimizes distance and breaks ties low") {
  const auto pts = circle_arc(-M_PI / 2.0, M_PI / 2.0, 5000);
  const WaypointPath path = path_from_points(pts, false, false);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-2.0, 12.0);
  for (int trial = 0; trial < 200; ++trial) {
    State x;
    x.x2 = coord(rng);
    x.y2 = coord(rng);
    const int got = nearest_waypoint(path, x);
    const Eigen::Vector2d p(x.x2, x.y2);
    const double got_d2 =
        (p - Eigen::Vector2d(path[got].x2, path[got].y2)).squaredNorm();
    for (int i = 0; i < path.size(); ++i) {
      const double d2 =
          (p - Eigen::Vector2d(path[i].x2, path[i].y2)).squaredNorm();
      CHECK(d2 >= got_d2);
      if (i < got) CHECK(d2 > got_d2);  // the lowest minimizer wins
    }
  }

  // Exact tie between two samples.
  WaypointPath two;
  two.states = {State{0.0, 0.0, 0.0, 0.0}, State{2.0, 0.0, 0.0, 0.0}};
  two.arclength = {0.0, 2.0};
  State mid;
  mid.x2 = 1.0;
  mid.y2 = 5.0;
  CHECK(nearest_waypoint(two, mid) == 0);
}

TEST_CASE("lookahead distance grows from zero toward its cap") {
  CHECK(lookahead_lambda(3.0, 0.0) == 0.0);
  CHECK(lookahead_lambda(3.0, 2.0) == doctest::Approx(2.0));
  CHECK(lookahead_lambda(3.0, 1000.0) > 0.99 * 3.0);
  double prev = -1.0;
  for (double e = 0.0; e <= 50.0; e += 0.25) {
    const double lam = lookahead_lambda(3.0, e);
    CHECK(lam > prev);
    CHECK(lam < 3.0);
    prev = lam;
  }
  CHECK_THROWS_AS(lookahead_lambda(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lookahead_lambda(3.0, -0.1), std::invalid_argument);
}

TEST_CASE("selected targets are always path samples") {
  const auto pts = circle_arc(-M_PI / 2.0, M_PI / 2.0, 101);
  const WaypointPath path = path_from_points(pts, false, false);
  GuidanceConfig cfg;

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-2.0, 12.0);
  std::uniform_real_distribution<double> err(0.0, 20.0);
  for (int trial = 0; trial < 100; ++trial) {
    State x;
    x.x2 = coord(rng);
    x.y2 = coord(rng);
    const State t = select_target(path, x, cfg, err(rng));
    bool member = false;
    for (int i = 0; i < path.size(); ++i) {
      if (t.x2 == path[i].x2 && t.y2 == path[i].y2 &&
          t.theta2 == path[i].theta2) {
        member = true;
        break;
      }
    }
    CHECK(member);
  }
}

TEST_CASE("zero error keeps the target at the nearest sample") {
  const auto pts = circle_arc(-M_PI / 2.0, M_PI / 2.0, 101);
  const WaypointPath path = path_from_points(pts, false, false);
  GuidanceConfig cfg;
  // Standing exactly on a sample with matched headings: the implicit error
  // of the stateless overload is zero and the carrot does not move.
  const State on = path[40];
  const State t = select_target(path, on, cfg);
  CHECK(t.x2 == on.x2);
  CHECK(t.y2 == on.y2);
}

TEST_CASE("open paths clamp the carrot at the final sample") {
  const auto pts = straight_east(10.0, 101);
  const WaypointPath path = path_from_points(pts, false, false);
  GuidanceConfig cfg;
  State near_end;
  near_end.x2 = 9.8;
  near_end.y2 = 0.0;
  const State t = select_target(path, near_end, cfg, 1000.0);
  CHECK(t.x2 == doctest::Approx(10.0));
  CHECK(t.y2 == doctest::Approx(0.0));
}

TEST_CASE("closed paths wrap the carrot through the closing segment") {
  // Square with vertices 4 apart; the closing edge runs from (0,4) back to
  // (0,0), so arclengths are 0,4,8,12 with total 16.
  const std::vector<Eigen::Vector2d> pts = {
      {0.0, 0.0}, {4.0, 0.0}, {4.0, 4.0}, {0.0, 4.0}};
  const WaypointPath path = path_from_points(pts, true, false);
  CHECK(path.total_length() == doctest::Approx(16.0));
  GuidanceConfig cfg;

  State at_last;
  at_last.x2 = 0.0;
  at_last.y2 = 4.0;
  // error 2 -> lambda 2, landing at arclength 14 inside the closing edge.
  const State t = select_target(path, at_last, cfg, 2.0);
  CHECK(t.x2 == path[0].x2);
  CHECK(t.y2 == path[0].y2);
}

TEST_CASE("targets march forward around a closed lap") {
  const int n = 100;
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * i / n;
    pts.emplace_back(5.0 + 5.0 * std::cos(a), 5.0 + 5.0 * std::sin(a));
  }
  const WaypointPath path = path_from_points(pts, true, false);
  GuidanceConfig cfg;

  int prev_idx = -1;
  for (int k = 0; k < n; ++k) {
    State x;
    x.x2 = path[k].x2;
    x.y2 = path[k].y2;
    const State t = select_target(path, x, cfg, 2.0);
    int idx = -1;
    for (int i = 0; i < n; ++i)
      if (t.x2 == path[i].x2 && t.y2 == path[i].y2) idx = i;
    REQUIRE(idx >= 0);
    if (prev_idx >= 0) {
      const int advance = ((idx - prev_idx) % n + n) % n;
      CHECK(advance <= 5);  // forward steps only, including the wrap
    }
    prev_idx = idx;
  }
}

TEST_CASE("the target tracker leads the vehicle and freezes when parked") {
  const auto pts = straight_east(10.0, 101);
  const WaypointPath path = path_from_points(pts, false, false);
  GuidanceConfig cfg;
  const State goal = path[100];
  TargetTracker tracker(path, cfg, goal);

  // First update measures against the seed (the mission goal, 10 m away),
  // not against the nearest sample, so the carrot lands a lookahead-sized
  // step ahead of the vehicle instead of at the goal.
  State x = path[0];
  const State t1 = tracker.update(x);
  CHECK(tracker.last_error() == doctest::Approx(10.0));
  CHECK(tracker.last_lambda() == doctest::Approx(3.0 - 3.0 / 11.0));
  CHECK(t1.x2 == doctest::Approx(2.8));

  // Standing exactly on the carrot freezes it.
  x = t1;
  const State t2 = tracker.update(x);
  CHECK(tracker.last_error() == 0.0);
  CHECK(t2.x2 == t1.x2);

  // A small offset re-selects; with the error nearly closed the carrot sits
  // just ahead of the vehicle and keeps leading it down the path.
  x.x2 = 2.75;
  const State t3 = tracker.update(x);
  CHECK(tracker.last_error() == doctest::Approx(0.05));
  CHECK(t3.x2 == doctest::Approx(2.9));
}

TEST_CASE("lap detection requires nearly a full traversal") {
  const int n = 100;
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * i / n;
    pts.emplace_back(5.0 + 5.0 * std::cos(a), 5.0 + 5.0 * std::sin(a));
  }
  const WaypointPath path = path_from_points(pts, true, false);

  LapTracker lap(path);
  for (int i = 0; i < n; ++i) {
    lap.update(i);
    // The start-line window wraps, so the last few samples before the line
    // may already register; everything earlier must not.
    if (i < n - 5) CHECK(!lap.completed());
  }
  lap.update(0);
  CHECK(lap.completed());
  CHECK(lap.traversed() == doctest::Approx(path.total_length()).epsilon(1e-9));

  // Half a lap is not completion, nor is jitter near the start line.
  LapTracker half(path);
  for (int i = 0; i <= n / 2; ++i) half.update(i);
  CHECK(!half.completed());

  LapTracker jitter(path);
  for (int k = 0; k < 300; ++k) jitter.update(k % 2);
  CHECK(!jitter.completed());

  CHECK_THROWS_AS(lap.update(-1), std::invalid_argument);
  CHECK_THROWS_AS(lap.update(n), std::invalid_argument);
}

TEST_CASE("waypoint files load with comments and optional headings") {
  const std::string two_col = write_temp(
      "ok.csv",
      "# demo path\n"
      "0.0, 0.0\n"
      "\n"
      "1.0, 0.0  # inline comment\n"
      "2.0, 0.0\n");
  const WaypointPath p2 = load_waypoints(two_col, false, false);
  REQUIRE(p2.size() == 3);
  CHECK(p2[1].x2 == 1.0);
  CHECK(p2[0].theta2 == doctest::Approx(M_PI / 2.0));  // east = +x travel

  // Explicit headings are taken verbatim and unwrapped along the file.
  const std::string three_col = write_temp("hdg.csv",
                                           "0,0,0.0\n"
                                           "1,0,6.2\n"
                                           "2,0,0.1\n");
  const WaypointPath p3 = load_waypoints(three_col, false, false);
  REQUIRE(p3.size() == 3);
  CHECK(p3[0].theta2 == 0.0);
  CHECK(p3[1].theta2 == doctest::Approx(6.2 - 2.0 * M_PI));
  CHECK(p3[2].theta2 == doctest::Approx(0.1));
}

TEST_CASE("malformed waypoint files name the offending line") {
  const std::string bad_number = write_temp("bad.csv", "0,0\n1,abc\n");
  try {
    load_waypoints(bad_number, false, false);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":2:") != std::string::npos);
    CHECK(msg.find("abc") != std::string::npos);
  }

  const std::string short_row = write_temp("short.csv", "0,0\n1\n");
  CHECK_THROWS_WITH_AS(load_waypoints(short_row, false, false),
                       doctest::Contains("expected x,y"), std::runtime_error);

  const std::string mixed = write_temp("mixed.csv", "0,0\n1,0,0.5\n");
  CHECK_THROWS_WITH_AS(load_waypoints(mixed, false, false),
                       doctest::Contains("mixed"), std::runtime_error);

  const std::string lonely = write_temp("one.csv", "0,0\n");
  CHECK_THROWS_AS(load_waypoints(lonely, false, false), std::runtime_error);
  CHECK_THROWS_AS(load_waypoints("/tmp/ttmpc_guidance_missing.csv", false,
                                 false),
                  std::runtime_error);
}

TEST_CASE("path and config validation") {
  WaypointPath bad;
  bad.states = {State{}};
  bad.arclength = {0.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad.states = {State{}, State{}};
  bad.arclength = {0.0, 0.0};  // not strictly increasing
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad.arclength = {0.0};  // length mismatch
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  GuidanceConfig cfg;
  cfg.lookahead = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.lookahead = 3.0;
  cfg.min_error = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
