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

#ifndef QLOOP_LOOP_HPP_
#define QLOOP_LOOP_HPP_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qloop/linalg.hpp"

namespace qloop {

//=========================================================================
// Measurements
//=========================================================================

struct Outcome {
  std::string label;
  double value = 0.0;  // eigenvalue of the observable for this outcome
  CMatrix projector;
};

// Outcome-labeled complete family of mutually orthogonal projectors.
struct ProjectiveMeasurement {
  std::vector<Outcome> outcomes;
  int dim = 0;

  // Full computational-basis measurement; labels are mixed-radix digit
  // strings over subsystem_dims, values are basis indices.
  static ProjectiveMeasurement computational(const std::vector<int>& dims);

  // Computational measurement of a single register; labels are that
  // register's digits, projectors act as identity elsewhere.
  static ProjectiveMeasurement computational_on(const std::vector<int>& dims,
                                                int reg);

  // Spectral decomposition of a Hermitian observable; eigenvalues equal
  // within the spectrum tolerance share one outcome. Outcomes are ordered
  // deterministically. Labels: explicit list if given, else the integer
  // eigenvalue when the whole spectrum is integral, else "e0", "e1", ...
  static ProjectiveMeasurement from_observable(
      const CMatrix& m, const std::vector<std::string>& labels = {});

  const Outcome* find(const std::string& label) const;
  std::vector<std::string> labels() const;

  // Reassembled observable sum_m m P_m.
  CMatrix observable() const;
};

//=========================================================================
// Loops and inputs
//=========================================================================

// The program  while (M in X) { q := U q }.
struct QuantumLoop {
  std::vector<int> subsystem_dims;
  CMatrix unitary;
  ProjectiveMeasurement measurement;
  std::set<std::string> guard;

  int dim() const;
  bool guard_is_empty() const { return guard.empty(); }
  bool guard_is_full() const {
    return guard.size() == measurement.outcomes.size();
  }
};

struct StateInput {
  enum class Kind { kPure, kMixed };
  Kind kind = Kind::kPure;
  CVector psi;  // kind == kPure
  CMatrix rho;  // kind == kMixed

  static StateInput pure(const CVector& psi);
  static StateInput mixed(const CMatrix& rho);

  int dim() const;
  CMatrix density() const;  // pure states promoted to rank-1 densities
};

//=========================================================================
// Guard projectors
//=========================================================================

// P_X = sum_{m in X} P_m together with an orthonormal basis of H whose
// first k columns span H_X (guard outcomes first, in measurement order).
struct GuardProjectors {
  CMatrix p_x;
  CMatrix p_xbar;
  int k = 0;
  CMatrix basis;                   // K x K unitary
  std::vector<int> basis_outcome;  // measurement outcome owning each column

  // Restriction A_X = P_X A P_X expressed in the first-k basis columns.
  CMatrix compress(const CMatrix& a) const;
  CVector compress_vector(const CVector& v) const;

  // Embeds an H_X-coordinate object back into full K-dimensional space.
  CMatrix embed(const CMatrix& a_x) const;
  CVector embed_vector(const CVector& v_x) const;

  // Coordinates of the complement H_Xbar (last K-k basis columns).
  CMatrix compress_xbar(const CMatrix& a) const;
};

GuardProjectors guard_projectors(const QuantumLoop& loop);

//=========================================================================
// Step semantics
//=========================================================================

struct StepResult {
  double p_term = 0.0;
  std::optional<CMatrix> rho_out;  // absent when p_term below the zero tol
  double p_cont = 0.0;
  std::optional<CMatrix> rho_in;  // absent when p_cont below the zero tol
};

StepResult step(const QuantumLoop& loop, const CMatrix& rho);
StepResult step(const GuardProjectors& g, const CMatrix& unitary,
                const CMatrix& rho);

struct LoopTraceStep {
  int n = 0;
  double p_t = 0.0;             // conditional termination probability
  double p_nt = 0.0;            // conditional continuation probability
  double p_nt_cumulative = 0.0; // p_NT^{n+}, product of the conditionals
  double p_nt_formula = 0.0;    // tr(U_X^{n-1} rho_X U_X^{dag(n-1)})
  std::optional<CMatrix> rho_out;
  std::optional<CMatrix> rho_in;
};

struct LoopTrace {
  std::vector<LoopTraceStep> steps;
  int truncated_at = 0;
  bool termination_detected = false;

  double final_p_nt() const {
    return steps.empty() ? 1.0 : steps.back().p_nt_cumulative;
  }
};

// Unwound execution for steps 1..n_max (stops early once the continuing
// branch is extinct). Each step carries both the simulated cumulative
// probability and its trace-formula cross-check.
LoopTrace run_trace(const QuantumLoop& loop, const StateInput& input,
                    int n_max);

// Pure-state fast path: cumulative p_NT^{n+} = |U_X^{n-1} psi_X|^2 for
// n = 1..n_max, without forming densities.
std::vector<double> run_trace_pure(const QuantumLoop& loop, const CVector& psi,
                                   int n_max);

//=========================================================================
// Validation
//=========================================================================

struct Diagnostic {
  enum class Severity { kWarning, kError };
  Severity severity = Severity::kError;
  std::string code;
  std::string message;
  double residual = 0.0;
};

std::vector<Diagnostic> validate_measurement(const ProjectiveMeasurement& m);
std::vector<Diagnostic> validate_input(const StateInput& input);
std::vector<Diagnostic> validate_loop(const QuantumLoop& loop);

bool has_errors(const std::vector<Diagnostic>& diags);

}  // namespace qloop

#endif  // QLOOP_LOOP_HPP_
