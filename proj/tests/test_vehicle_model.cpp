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
#include <random>

#include "ttmpc/dual.hpp"
#include "ttmpc/vehicle_model.hpp"

using namespace ttmpc;

namespace {
constexpr double kHalfPi = 1.5707963267948966;

VehicleParams table_params() {
  VehicleParams p;  // defaults mirror the benchmark vehicle
  return p;
}
}  // namespace

TEST_CASE("heading convention: theta2 = pi/2 moves the trailer along +x") {
  const State x{0.0, 0.0, 0.0, kHalfPi};
  const Control u{0.2, 0.0};
  const Eigen::Vector4d dx = dynamics(x, u, table_params());
  CHECK(dx(0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(dx(1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dx(2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dx(3) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("heading convention: theta2 = 0 moves the trailer along -y") {
  const State x{0.0, 0.0, 0.0, 0.0};
  const Control u{0.2, 0.0};
  const Eigen::Vector4d dx = dynamics(x, u, table_params());
  CHECK(dx(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dx(1) == doctest::Approx(-0.2).epsilon(1e-12));
}

TEST_CASE("one Euler step at cruise speed advances x2 by v*dt") {
  const State x{0.0, 0.0, 0.0, kHalfPi};
  const Control u{0.2, 0.0};
  const State next = step_euler(x, u, table_params(), 0.2);
  CHECK(next.x2 == doctest::Approx(0.04).epsilon(1e-15));
  CHECK(next.y2 == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(next.theta1 == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(next.theta2 == doctest::Approx(kHalfPi).epsilon(1e-15));
}

TEST_CASE("steering feeds the hitch angle with opposite-sign trailer lag") {
  // Positive steering at zero hitch angle turns the tractor one way and the
  // trailer heading not at all (dtheta2 depends on theta1 only).
  const State x{0.0, 0.0, 0.0, kHalfPi};
  const Control u{0.2, 0.3};
  const VehicleParams p = table_params();
  const Eigen::Vector4d dx = dynamics(x, u, p);
  CHECK(dx(2) == doctest::Approx(0.2 * std::tan(0.3) / p.l2).epsilon(1e-12));
  CHECK(dx(3) == doctest::Approx(0.0).epsilon(1e-12));

  // A bent hitch then rotates the trailer.
  const State bent{0.0, 0.0, 0.4, kHalfPi};
  const Eigen::Vector4d dx2 = dynamics(bent, u, p);
  CHECK(dx2(3) == doctest::Approx(0.2 * std::sin(0.4) / p.l2).epsilon(1e-12));
}

TEST_CASE("two-length variant divides the steering term by l1") {
  VehicleParams p = table_params();
  p.variant = ModelVariant::kTwoLength;
  const State x{1.0, -2.0, 0.25, 0.7};
  const Control u{0.15, -0.3};
  const Eigen::Vector4d dx = dynamics(x, u, p);
  const double expected =
      0.15 * (std::sin(0.25) / p.l2 + std::tan(-0.3) / p.l1);
  CHECK(dx(2) == doctest::Approx(expected).epsilon(1e-12));
  // Position and trailer-heading rows are variant-independent.
  VehicleParams q = table_params();
  const Eigen::Vector4d dx_paper = dynamics(x, u, q);
  CHECK(dx(0) == doctest::Approx(dx_paper(0)).epsilon(1e-15));
  CHECK(dx(1) == doctest::Approx(dx_paper(1)).epsilon(1e-15));
  CHECK(dx(3) == doctest::Approx(dx_paper(3)).epsilon(1e-15));
}

TEST_CASE("hitch disturbance grows with v > 0 and decays with v < 0") {
  // With zero steering, d(theta1) = v * sin(theta1) / l2: a small positive
  // hitch angle grows when v > 0 and shrinks when v < 0. This is the sign
  // structure the anti-jackknife bound exists for.
  const VehicleParams p = table_params();
  State x{0.0, 0.0, 0.05, kHalfPi};
  const Eigen::Vector4d pos = dynamics(x, Control{0.2, 0.0}, p);
  const Eigen::Vector4d neg = dynamics(x, Control{-0.2, 0.0}, p);
  CHECK(pos(2) > 0.0);
  CHECK(neg(2) < 0.0);
}

TEST_CASE("rk4 matches the classical tableau on a smooth maneuver") {
  // One RK4 step against four half-steps: the difference must shrink ~16x
  // when the step halves (order 4).
  const VehicleParams p = table_params();
  const State x0{0.0, 0.0, 0.1, 0.3};
  const Control u{0.2, 0.25};

  auto refine = [&](double h, int n) {
    State x = x0;
    for (int i = 0; i < n; ++i) x = step_rk4(x, u, p, h);
    return x;
  };
  const Eigen::Vector4d coarse = refine(0.4, 1).vec();
  const Eigen::Vector4d mid = refine(0.2, 2).vec();
  const Eigen::Vector4d fine = refine(0.1, 4).vec();
  const double e1 = (coarse - fine).norm();
  const double e2 = (mid - fine).norm();
  CHECK(e2 < e1);
  CHECK(e1 / e2 > 8.0);  // clean 4th order would give ~16
}

TEST_CASE("step dispatch matches the explicit integrators") {
  const VehicleParams p = table_params();
  const State x{0.3, -0.8, -0.2, 2.1};
  const Control u{-0.1, 0.2};
  CHECK(step(x, u, p, 0.2, IntegratorKind::kEuler).vec() ==
        step_euler(x, u, p, 0.2).vec());
  CHECK(step(x, u, p, 0.2, IntegratorKind::kRk4).vec() ==
        step_rk4(x, u, p, 0.2).vec());
}

TEST_CASE("invalid parameters and inputs are rejected") {
  VehicleParams p = table_params();
  p.l2 = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = table_params();
  p.v_max = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  const State x{0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(
      dynamics(x, Control{std::numeric_limits<double>::quiet_NaN(), 0.0},
               table_params()),
      std::invalid_argument);
  CHECK_THROWS_AS(step_euler(x, Control{0.1, 0.0}, table_params(), 0.0),
                  std::invalid_argument);
}

TEST_CASE("ackermann outer wheel turns less than the inner wheel") {
  // Geometry oracle: cot(outer) = cot(inner) + width / wheelbase, evaluated
  // independently at inner=0.5, width=1.0, wheelbase=1.9.
  const double inner = 0.5;
  const double outer = ackermann_outer(inner, 1.0, 1.9);
  CHECK(outer == doctest::Approx(0.4012805654821203).epsilon(1e-12));
  CHECK(outer < inner);
  // Zero track width degenerates to a bicycle: both wheels share the angle.
  CHECK(ackermann_outer(inner, 0.0, 1.9) == doctest::Approx(inner));
  // Domain is the open interval (0, pi/2); zero and negative angles are out.
  CHECK_THROWS_AS(ackermann_outer(0.0, 1.0, 1.9), std::invalid_argument);
  CHECK_THROWS_AS(ackermann_outer(-inner, 1.0, 1.9), std::invalid_argument);
  CHECK_THROWS_AS(ackermann_outer(2.0, 1.0, 1.9), std::invalid_argument);
}

TEST_CASE("hitch point sits one trailer length behind the axle") {
  const State x{0.0, 0.0, 0.0, kHalfPi};  // facing +x
  const Eigen::Vector2d hitch = hitch_point(x, 4.0);
  CHECK(hitch.x() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(hitch.y() == doctest::Approx(0.0).epsilon(1e-12));

  const State south{0.0, 0.0, 0.0, 0.0};  // facing -y
  const Eigen::Vector2d hitch2 = hitch_point(south, 4.0);
  CHECK(hitch2.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(hitch2.y() == doctest::Approx(-4.0).epsilon(1e-12));
}

TEST_CASE("body circles cover trailer axle and hitch") {
  const VehicleParams p = table_params();
  const State x{0.0, 0.0, 0.0, 0.0};  // facing -y, hitch at (0,-4)
  const BodyCircles circles = body_circles(x, p);
  CHECK(circles.centers[0].x() == doctest::Approx(0.0));
  CHECK(circles.centers[0].y() == doctest::Approx(0.0));
  CHECK(circles.centers[1].x() == doctest::Approx(0.0));
  CHECK(circles.centers[1].y() == doctest::Approx(-4.0));
  CHECK(circles.radius == doctest::Approx(p.r_body));
}

TEST_CASE("step jacobians match central finite differences") {
  const VehicleParams p = table_params();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const State x{5.0 * uni(rng), 5.0 * uni(rng), 0.6 * uni(rng),
                  3.0 * uni(rng)};
    const Control u{0.2 * uni(rng), 0.4 * uni(rng)};
    const IntegratorKind kind =
        trial % 2 ? IntegratorKind::kRk4 : IntegratorKind::kEuler;
    const StepJacobian sj = step_with_jacobian(x, u, p, 0.2, kind);
    CHECK(sj.next.vec() == step(x, u, p, 0.2, kind).vec());

    const double h = 1e-6;
    for (int j = 0; j < 4; ++j) {
      Eigen::Vector4d xp = x.vec(), xm = x.vec();
      xp(j) += h;
      xm(j) -= h;
      const Eigen::Vector4d fd =
          (step(State::from_vec(xp), u, p, 0.2, kind).vec() -
           step(State::from_vec(xm), u, p, 0.2, kind).vec()) /
          (2 * h);
      for (int i = 0; i < 4; ++i)
        CHECK(sj.a(i, j) == doctest::Approx(fd(i)).epsilon(1e-6));
    }
    for (int j = 0; j < 2; ++j) {
      Eigen::Vector2d up = u.vec(), um = u.vec();
      up(j) += h;
      um(j) -= h;
      const Eigen::Vector4d fd =
          (step(x, Control::from_vec(up), p, 0.2, kind).vec() -
           step(x, Control::from_vec(um), p, 0.2, kind).vec()) /
          (2 * h);
      for (int i = 0; i < 4; ++i)
        CHECK(sj.b(i, j) == doctest::Approx(fd(i)).epsilon(1e-6));
    }
  }
}

TEST_CASE("dual arithmetic differentiates composed expressions") {
  // d/dx [ sin(x)*cos(x) + tan(x)/x ] at x = 0.7, against the closed form.
  const double v = 0.7;
  Dual<1> x = Dual<1>::seeded(v, 0);
  const Dual<1> y = sin(x) * cos(x) + tan(x) / x;
  const double expected_value = std::sin(v) * std::cos(v) + std::tan(v) / v;
  const double dtan = 1.0 / (std::cos(v) * std::cos(v));
  const double expected_grad = std::cos(2 * v) + (dtan * v - std::tan(v)) / (v * v);
  CHECK(y.value == doctest::Approx(expected_value).epsilon(1e-15));
  CHECK(y.grad(0) == doctest::Approx(expected_grad).epsilon(1e-12));

  // sqrt and division by a dual.
  Dual<1> z = Dual<1>::seeded(2.0, 0);
  const Dual<1> r = 1.0 / sqrt(z);
  CHECK(r.value == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(r.grad(0) == doctest::Approx(-0.5 * std::pow(2.0, -1.5)).epsilon(1e-12));
}
