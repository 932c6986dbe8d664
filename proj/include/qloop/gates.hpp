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

#ifndef QLOOP_GATES_HPP_
#define QLOOP_GATES_HPP_

#include "qloop/linalg.hpp"

namespace qloop::gates {

CMatrix identity(int n);
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix hadamard();
CMatrix phase_s();
CMatrix t_gate();
CMatrix cnot();

// Rotations about the y and z axes.
CMatrix ry(double theta);
CMatrix rz(double theta);

// Global phase as a 1x1 factor [e^{i alpha}]; products broadcast it.
CMatrix global_phase(double alpha);

// C(U) = diag(I, U) with a control of the same dimension as U's register.
CMatrix controlled(const CMatrix& u);

// e^{i alpha} Rz(beta) Ry(gamma) Rz(delta): the generic one-qubit unitary.
CMatrix rotation_gate(double alpha, double beta, double gamma, double delta);

// Cyclic shift conditioned on the coin: S = sum_i |i-1><i| (x) |0><0|
// + sum_i |i+1><i| (x) |1><1| on an n-cycle.
CMatrix walk_shift(int n);

// One step of the coined walk: S (I_n (x) H).
CMatrix walk_unitary(int n);

}  // namespace qloop::gates

#endif  // QLOOP_GATES_HPP_
