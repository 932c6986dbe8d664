// Copyright 2026 The QLoop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qloop/gates.hpp"

#include <cmath>

namespace qloop::gates {

namespace {
const Complex kI(0, 1);
}

CMatrix identity(int n) {
  if (n < 1) throw DimensionError("identity: dimension must be positive");
  return CMatrix::Identity(n, n);
}

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

CMatrix hadamard() {
  CMatrix m(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

CMatrix phase_s() {
  CMatrix m(2, 2);
  m << 1, 0, 0, kI;
  return m;
}

CMatrix t_gate() {
  CMatrix m(2, 2);
  m << 1, 0, 0, std::exp(kI * (M_PI / 4.0));
  return m;
}

CMatrix cnot() {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 3) = 1;
  m(3, 2) = 1;
  return m;
}

CMatrix ry(double theta) {
  CMatrix m(2, 2);
  m << std::cos(theta / 2), -std::sin(theta / 2), std::sin(theta / 2),
      std::cos(theta / 2);
  return m;
}

CMatrix rz(double theta) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = std::exp(-kI * (theta / 2));
  m(1, 1) = std::exp(kI * (theta / 2));
  return m;
}

CMatrix global_phase(double alpha) {
  CMatrix m(1, 1);
  m(0, 0) = std::exp(kI * alpha);
  return m;
}

CMatrix controlled(const CMatrix& u) {
  if (u.rows() != u.cols()) {
    throw DimensionError("controlled: gate must be square");
  }
  const Eigen::Index d = u.rows();
  CMatrix m = CMatrix::Zero(2 * d, 2 * d);
  m.topLeftCorner(d, d) = CMatrix::Identity(d, d);
  m.bottomRightCorner(d, d) = u;
  return m;
}

CMatrix rotation_gate(double alpha, double beta, double gamma, double delta) {
  return std::exp(kI * alpha) * (rz(beta) * ry(gamma) * rz(delta)).eval();
}

CMatrix walk_shift(int n) {
  if (n < 1) throw DimensionError("walk_shift: cycle length must be positive");
  CMatrix s = CMatrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    const int left = (i + n - 1) % n;
    const int right = (i + 1) % n;
    s(2 * left, 2 * i) = 1;           // coin |0>: one step left
    s(2 * right + 1, 2 * i + 1) = 1;  // coin |1>: one step right
  }
  return s;
}

CMatrix walk_unitary(int n) {
  return walk_shift(n) * tensor_product(identity(n), hadamard());
}

}  // namespace qloop::gates
