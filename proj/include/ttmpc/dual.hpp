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

#ifndef TTMPC_DUAL_HPP
#define TTMPC_DUAL_HPP

#include <cmath>

#include <Eigen/Core>

namespace ttmpc {

// Forward-mode dual number carrying N directional derivatives alongside the
// value. Running the (scalar-templated) dynamics and integrators on Dual<6>
// with the state seeded on directions 0..3 and the control on 4..5 yields the
// exact step Jacobian in one evaluation.
template <int N>
struct Dual {
  double value = 0.0;
  Eigen::Matrix<double, N, 1> grad = Eigen::Matrix<double, N, 1>::Zero();

  Dual() = default;
  Dual(double v) : value(v) {}  // NOLINT: implicit promotion is the point

  static Dual seeded(double v, int direction) {
    Dual d(v);
    d.grad(direction) = 1.0;
    return d;
  }

  Dual operator-() const {
    Dual r(-value);
    r.grad = -grad;
    return r;
  }

  Dual& operator+=(const Dual& o) {
    value += o.value;
    grad += o.grad;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    value -= o.value;
    grad -= o.grad;
    return *this;
  }
};

template <int N>
Dual<N> operator+(Dual<N> a, const Dual<N>& b) {
  return a += b;
}
template <int N>
Dual<N> operator-(Dual<N> a, const Dual<N>& b) {
  return a -= b;
}

template <int N>
Dual<N> operator*(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r(a.value * b.value);
  r.grad = a.value * b.grad + b.value * a.grad;
  return r;
}

template <int N>
Dual<N> operator/(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r(a.value / b.value);
  r.grad = (a.grad - (a.value / b.value) * b.grad) / b.value;
  return r;
}

// Mixed-mode overloads: template deduction never applies the implicit
// double -> Dual promotion, so spell the scalar cases out.
template <int N>
Dual<N> operator+(Dual<N> a, double b) {
  a.value += b;
  return a;
}
template <int N>
Dual<N> operator+(double a, Dual<N> b) {
  b.value += a;
  return b;
}
template <int N>
Dual<N> operator-(Dual<N> a, double b) {
  a.value -= b;
  return a;
}
template <int N>
Dual<N> operator-(double a, const Dual<N>& b) {
  Dual<N> r(a - b.value);
  r.grad = -b.grad;
  return r;
}
template <int N>
Dual<N> operator*(const Dual<N>& a, double b) {
  Dual<N> r(a.value * b);
  r.grad = b * a.grad;
  return r;
}
template <int N>
Dual<N> operator*(double a, const Dual<N>& b) {
  return b * a;
}
template <int N>
Dual<N> operator/(const Dual<N>& a, double b) {
  Dual<N> r(a.value / b);
  r.grad = a.grad / b;
  return r;
}
template <int N>
Dual<N> operator/(double a, const Dual<N>& b) {
  Dual<N> r(a / b.value);
  r.grad = (-a / (b.value * b.value)) * b.grad;
  return r;
}

template <int N>
Dual<N> sin(const Dual<N>& a) {
  Dual<N> r(std::sin(a.value));
  r.grad = std::cos(a.value) * a.grad;
  return r;
}

template <int N>
Dual<N> cos(const Dual<N>& a) {
  Dual<N> r(std::cos(a.value));
  r.grad = -std::sin(a.value) * a.grad;
  return r;
}

template <int N>
Dual<N> tan(const Dual<N>& a) {
  const double c = std::cos(a.value);
  Dual<N> r(std::tan(a.value));
  r.grad = a.grad / (c * c);
  return r;
}

template <int N>
Dual<N> sqrt(const Dual<N>& a) {
  const double s = std::sqrt(a.value);
  Dual<N> r(s);
  r.grad = a.grad / (2.0 * s);
  return r;
}

using std::cos;
using std::sin;
using std::sqrt;
using std::tan;

}  // namespace ttmpc

#endif  // TTMPC_DUAL_HPP
