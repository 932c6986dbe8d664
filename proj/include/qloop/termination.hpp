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

#ifndef QLOOP_TERMINATION_HPP_
#define QLOOP_TERMINATION_HPP_

#include <string>
#include <vector>

#include "qloop/linalg.hpp"
#include "qloop/loop.hpp"

namespace qloop {

//=========================================================================
// Spectral split of U_X
//=========================================================================

// Orthogonal decomposition of H_X into the unit-modulus eigenspace of U_X
// (where U_X acts unitarily) and a complement of spectral radius < 1. For a
// compression of a unitary the unit eigenvectors reduce U_X orthogonally, so
// the split is well defined.
struct SpectralSplit {
  std::vector<EigenPair> unit_eigenpairs;  // vectors in H_X coordinates
  CMatrix pi1;           // k x k orthogonal projector onto the unit subspace
  CMatrix unit_basis;    // k x t orthonormal columns spanning range(pi1)
  double stable_radius = 0.0;  // max |lambda| over the remaining spectrum
  SchurData schur;             // Schur form of U_X, deterministic order

  int unit_count() const { return static_cast<int>(unit_eigenpairs.size()); }
};

SpectralSplit spectral_split(const CMatrix& u_x);

//=========================================================================
// Verdicts
//=========================================================================

enum class LoopClass { kTerminating, kAlmostTerminating, kNotAlmostTerminating };

struct LoopVerdict {
  LoopClass kind = LoopClass::kNotAlmostTerminating;
  double spectral_radius = 0.0;  // max |lambda(U_X)|, clamped to <= 1
  bool nilpotency_checked = false;  // algebraic |U_X^k| test passed
  bool uniform = false;  // almost termination here is always uniform
  int unit_count = 0;
};

LoopVerdict classify_loop(const QuantumLoop& loop);

enum class InputClass { kTerminates, kAlmostTerminates, kNonTerminating };

struct InputVerdict {
  InputClass kind = InputClass::kNonTerminating;
  double p_nt = 1.0;
  int at_step = 0;   // kTerminates: step at which the loop has surely exited
  bool marginal = false;  // p_nt within tolerance of zero but not clean zero
};

// True iff |U_X^k rho_X U_X^dag k| vanishes with k = dim H_X; by the Jordan
// criterion the nilpotent part dies within k powers and nothing else dies.
bool terminates_on(const QuantumLoop& loop, const StateInput& input);

// True iff the input carries no mass on the unit-modulus eigenspace of U_X.
bool almost_terminates_on(const QuantumLoop& loop, const StateInput& input);

// Nonterminating probability: trace(Pi1 rho_X Pi1).
double p_nt(const QuantumLoop& loop, const StateInput& input);

InputVerdict input_verdict(const QuantumLoop& loop, const StateInput& input);

std::string to_string(LoopClass c);
std::string to_string(InputClass c);

//=========================================================================
// Jordan block oracles (closed forms on synthetic data)
//=========================================================================

CMatrix jordan_block(const Complex& lambda, int r);

// J_r(lambda)^N in closed form: binomial-coefficient superdiagonals.
CMatrix jordan_block_power(const Complex& lambda, int r, int n);

// J_r(lambda)^N v without forming the matrix.
CVector jordan_block_apply(const Complex& lambda, int r, int n,
                           const CVector& v);

}  // namespace qloop

#endif  // QLOOP_TERMINATION_HPP_
