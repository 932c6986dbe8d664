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

#ifndef QLOOP_COMPUTED_FUNCTION_HPP_
#define QLOOP_COMPUTED_FUNCTION_HPP_

#include <string>
#include <vector>

#include "qloop/linalg.hpp"
#include "qloop/loop.hpp"
#include "qloop/termination.hpp"

namespace qloop {

// F(rho): positive operator of trace <= 1 supported on H_Xbar, in full
// K-dimensional coordinates.
struct PartialDensity {
  CMatrix matrix;
  double trace_value = 0.0;
  double truncation_bound = 0.0;  // residual estimate of the engine used
  std::string method;

  // The same operator in H_Xbar coordinates (last K-k basis columns).
  CMatrix xbar_block(const GuardProjectors& g) const {
    return g.compress_xbar(matrix);
  }
};

enum class FMethod { kAuto, kSeries, kSolve, kNormal };

// Truncated series evaluation of
//   F(rho) = P_Xbar rho P_Xbar + P_Xbar U (sum_n U_X^n rho_X U_X^dag n)
//            U^dag P_Xbar,
// with the unit-modulus component of rho_X projected out first (it never
// reaches the output and would stall convergence).
PartialDensity f_series(const QuantumLoop& loop, const StateInput& input,
                        double tol_conv = -1);

// Fixed-point evaluation: solves Y = rho_s + A Y A^dag for the stable block
// as a dense linear system in the vectorized unknowns.
PartialDensity f_solve(const QuantumLoop& loop, const StateInput& input);

// Closed form for normal U_X over its spectral decomposition.
PartialDensity f_normal(const QuantumLoop& loop, const StateInput& input);

// Dispatch: normal closed form when applicable, else the fixed-point solve,
// with the series as fallback on numerical failure.
PartialDensity computed_function(const QuantumLoop& loop,
                                 const StateInput& input,
                                 FMethod method = FMethod::kAuto);

// Closed form of sum_{n>=0} J_r(lambda)^n v for |lambda| < 1, using
// f_i(x) = (1-x)^-(i+1).
CVector jordan_series_sum(const Complex& lambda, int r, const CVector& v);

//=========================================================================
// Synthetic Jordan-built loops (oracle path)
//=========================================================================

// Explicit Jordan data for a synthetic U_X = S J S^-1; unit-modulus blocks
// come first and must have size 1.
struct JordanSpec {
  struct Block {
    Complex lambda;
    int size = 1;
  };
  std::vector<Block> blocks;
  CMatrix s;

  int dim() const;
  int unit_count() const;
  CMatrix jordan_matrix() const;
  CMatrix u_x() const;
  void check() const;  // throws on malformed specs
};

// A loop whose guard compression is exactly the prescribed U_X, built by
// unitary dilation onto K = 2k dimensions (guard outcomes are the first k
// computational labels).
struct SyntheticJordanLoop {
  QuantumLoop loop;
  JordanSpec jordan;
};

SyntheticJordanLoop build_synthetic_loop(const JordanSpec& spec);

// Jordan-form evaluation for pure inputs on a synthetic loop: builds the
// per-block series sums u_i and returns the P_Xbar-restriction of
// |psi> + U S u as a rank-1 partial density.
PartialDensity f_pure_jordan(const SyntheticJordanLoop& synth,
                             const CVector& psi);

}  // namespace qloop

#endif  // QLOOP_COMPUTED_FUNCTION_HPP_
