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

#include "qloop/loop.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qloop {

namespace {

int product(const std::vector<int>& dims) {
  int k = 1;
  for (int d : dims) {
    if (d <= 0) throw DimensionError("register dimensions must be positive");
    k *= d;
  }
  return k;
}

std::string index_label(const std::vector<int>& dims, int index) {
  if (dims.size() == 1) return std::to_string(index);
  std::vector<int> digits(dims.size());
  int rem = index;
  for (int r = static_cast<int>(dims.size()) - 1; r >= 0; --r) {
    digits[r] = rem % dims[r];
    rem /= dims[r];
  }
  bool wide = false;
  for (int d : dims) wide = wide || d > 10;
  std::string label;
  for (size_t r = 0; r < digits.size(); ++r) {
    if (wide && r > 0) label += ',';
    label += std::to_string(digits[r]);
  }
  return label;
}

}  // namespace

//=========================================================================
// ProjectiveMeasurement
//=========================================================================

ProjectiveMeasurement ProjectiveMeasurement::computational(
    const std::vector<int>& dims) {
  const int k = product(dims);
  ProjectiveMeasurement m;
  m.dim = k;
  m.outcomes.reserve(k);
  for (int i = 0; i < k; ++i) {
    Outcome o;
    o.label = index_label(dims, i);
    o.value = static_cast<double>(i);
    o.projector = CMatrix::Zero(k, k);
    o.projector(i, i) = Complex(1, 0);
    m.outcomes.push_back(std::move(o));
  }
  return m;
}

ProjectiveMeasurement ProjectiveMeasurement::computational_on(
    const std::vector<int>& dims, int reg) {
  if (reg < 0 || reg >= static_cast<int>(dims.size())) {
    throw DimensionError("computational_on: register index out of range");
  }
  const int k = product(dims);
  int before = 1, after = 1;
  for (int r = 0; r < reg; ++r) before *= dims[r];
  for (int r = reg + 1; r < static_cast<int>(dims.size()); ++r)
    after *= dims[r];

  ProjectiveMeasurement m;
  m.dim = k;
  for (int i = 0; i < dims[reg]; ++i) {
    CMatrix pi = CMatrix::Zero(dims[reg], dims[reg]);
    pi(i, i) = Complex(1, 0);
    Outcome o;
    o.label = std::to_string(i);
    o.value = static_cast<double>(i);
    o.projector = tensor_product(
        tensor_product(CMatrix::Identity(before, before), pi),
        CMatrix::Identity(after, after));
    m.outcomes.push_back(std::move(o));
  }
  return m;
}

ProjectiveMeasurement ProjectiveMeasurement::from_observable(
    const CMatrix& obs, const std::vector<std::string>& labels) {
  if (obs.rows() != obs.cols()) {
    throw DimensionError("observable must be square");
  }
  if (!is_hermitian(obs)) {
    throw Error("observable must be Hermitian");
  }
  const EigenData eig = eig_normal(obs);
  const double scale = std::max(1.0, operator_norm(obs));
  const double group_tol = tolerances().spectrum * scale;

  // eig_normal order is deterministic, so grouping adjacent values gives a
  // deterministic outcome order.
  struct Group {
    double value;
    std::vector<const EigenPair*> members;
  };
  std::vector<Group> groups;
  for (const EigenPair& p : eig.pairs) {
    const double v = p.value.real();
    if (!groups.empty() && std::abs(groups.back().value - v) <= group_tol) {
      groups.back().members.push_back(&p);
    } else {
      groups.push_back({v, {&p}});
    }
  }

  if (!labels.empty() && labels.size() != groups.size()) {
    throw Error("observable has " + std::to_string(groups.size()) +
                " outcomes but " + std::to_string(labels.size()) +
                " labels were given");
  }

  bool integral = true;
  for (const Group& g : groups) {
    integral = integral && std::abs(g.value - std::llround(g.value)) <
                               tolerances().spectrum * scale;
  }

  ProjectiveMeasurement m;
  m.dim = static_cast<int>(obs.rows());
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    Outcome o;
    o.value = integral ? static_cast<double>(std::llround(groups[gi].value))
                       : groups[gi].value;
    if (!labels.empty()) {
      o.label = labels[gi];
    } else if (integral) {
      o.label = std::to_string(std::llround(groups[gi].value));
    } else {
      o.label = "e" + std::to_string(gi);
    }
    o.projector = CMatrix::Zero(m.dim, m.dim);
    for (const EigenPair* p : groups[gi].members) {
      o.projector += p->vector * p->vector.adjoint();
    }
    m.outcomes.push_back(std::move(o));
  }
  return m;
}

const Outcome* ProjectiveMeasurement::find(const std::string& label) const {
  for (const Outcome& o : outcomes) {
    if (o.label == label) return &o;
  }
  return nullptr;
}

std::vector<std::string> ProjectiveMeasurement::labels() const {
  std::vector<std::string> out;
  out.reserve(outcomes.size());
  for (const Outcome& o : outcomes) out.push_back(o.label);
  return out;
}

CMatrix ProjectiveMeasurement::observable() const {
  CMatrix m = CMatrix::Zero(dim, dim);
  for (const Outcome& o : outcomes) m += o.value * o.projector;
  return m;
}

//=========================================================================
// QuantumLoop / StateInput
//=========================================================================

int QuantumLoop::dim() const { return product(subsystem_dims); }

StateInput StateInput::pure(const CVector& psi) {
  StateInput s;
  s.kind = Kind::kPure;
  s.psi = psi;
  return s;
}

StateInput StateInput::mixed(const CMatrix& rho) {
  StateInput s;
  s.kind = Kind::kMixed;
  s.rho = rho;
  return s;
}

int StateInput::dim() const {
  return kind == Kind::kPure ? static_cast<int>(psi.size())
                             : static_cast<int>(rho.rows());
}

CMatrix StateInput::density() const {
  if (kind == Kind::kMixed) return rho;
  return psi * psi.adjoint();
}

//=========================================================================
// Guard projectors
//=========================================================================

GuardProjectors guard_projectors(const QuantumLoop& loop) {
  const int k_total = loop.dim();
  GuardProjectors g;
  g.p_x = CMatrix::Zero(k_total, k_total);
  g.basis = CMatrix(k_total, 0);

  auto append_outcome_basis = [&](int outcome_index) {
    const Outcome& o = loop.measurement.outcomes[outcome_index];
    const CMatrix cols = range_basis(o.projector, 0.5);
    CMatrix merged(k_total, g.basis.cols() + cols.cols());
    merged << g.basis, cols;
    g.basis = merged;
    for (Eigen::Index c = 0; c < cols.cols(); ++c) {
      g.basis_outcome.push_back(outcome_index);
    }
  };

  for (size_t i = 0; i < loop.measurement.outcomes.size(); ++i) {
    if (loop.guard.count(loop.measurement.outcomes[i].label)) {
      g.p_x += loop.measurement.outcomes[i].projector;
      append_outcome_basis(static_cast<int>(i));
    }
  }
  g.k = static_cast<int>(g.basis.cols());
  for (size_t i = 0; i < loop.measurement.outcomes.size(); ++i) {
    if (!loop.guard.count(loop.measurement.outcomes[i].label)) {
      append_outcome_basis(static_cast<int>(i));
    }
  }
  g.p_xbar = CMatrix::Identity(k_total, k_total) - g.p_x;
  return g;
}

CMatrix GuardProjectors::compress(const CMatrix& a) const {
  if (a.rows() != basis.rows() || a.cols() != basis.rows()) {
    throw DimensionError("compress: operator does not match loop dimension");
  }
  const auto bx = basis.leftCols(k);
  return bx.adjoint() * a * bx;
}

CVector GuardProjectors::compress_vector(const CVector& v) const {
  if (v.size() != basis.rows()) {
    throw DimensionError("compress_vector: vector does not match dimension");
  }
  return basis.leftCols(k).adjoint() * v;
}

CMatrix GuardProjectors::embed(const CMatrix& a_x) const {
  if (a_x.rows() != k || a_x.cols() != k) {
    throw DimensionError("embed: expected a k x k operator");
  }
  const auto bx = basis.leftCols(k);
  return bx * a_x * bx.adjoint();
}

CVector GuardProjectors::embed_vector(const CVector& v_x) const {
  if (v_x.size() != k) {
    throw DimensionError("embed_vector: expected a k-vector");
  }
  return basis.leftCols(k) * v_x;
}

CMatrix GuardProjectors::compress_xbar(const CMatrix& a) const {
  const auto bc = basis.rightCols(basis.cols() - k);
  return bc.adjoint() * a * bc;
}

//=========================================================================
// Step semantics
//=========================================================================

StepResult step(const GuardProjectors& g, const CMatrix& unitary,
                const CMatrix& rho) {
  const double tol_zero = tolerances().zero;
  StepResult r;
  r.p_term = trace((g.p_xbar * rho * g.p_xbar).eval()).real();
  r.p_cont = trace((g.p_x * rho * g.p_x).eval()).real();
  if (r.p_term > tol_zero) {
    r.rho_out = (g.p_xbar * rho * g.p_xbar / r.p_term).eval();
  }
  if (r.p_cont > tol_zero) {
    const CMatrix mid = g.p_x * rho * g.p_x / r.p_cont;
    r.rho_in = (unitary * mid * unitary.adjoint()).eval();
  }
  return r;
}

StepResult step(const QuantumLoop& loop, const CMatrix& rho) {
  return step(guard_projectors(loop), loop.unitary, rho);
}

LoopTrace run_trace(const QuantumLoop& loop, const StateInput& input,
                    int n_max) {
  if (n_max < 1) throw Error("run_trace: n_max must be at least 1");
  const GuardProjectors g = guard_projectors(loop);
  const CMatrix u_x = g.compress(loop.unitary);

  LoopTrace trace_out;
  CMatrix rho = input.density();
  CMatrix w = g.compress(rho);  // U_X^{n-1} rho_X U_X^{dag(n-1)}
  double cumulative = 1.0;

  for (int n = 1; n <= n_max; ++n) {
    const StepResult s = step(g, loop.unitary, rho);
    LoopTraceStep ts;
    ts.n = n;
    ts.p_t = s.p_term;
    ts.p_nt = s.p_cont;
    cumulative *= s.p_cont;
    ts.p_nt_cumulative = cumulative;
    ts.p_nt_formula = trace(w).real();
    ts.rho_out = s.rho_out;
    ts.rho_in = s.rho_in;
    trace_out.steps.push_back(std::move(ts));
    trace_out.truncated_at = n;

    if (cumulative < tolerances().zero || !s.rho_in.has_value()) {
      trace_out.termination_detected = true;
      break;
    }
    rho = *s.rho_in;
    w = u_x * w * u_x.adjoint();
  }
  if (!trace_out.steps.empty() &&
      trace_out.steps.back().p_nt_cumulative < tolerances().zero) {
    trace_out.termination_detected = true;
  }
  return trace_out;
}

std::vector<double> run_trace_pure(const QuantumLoop& loop, const CVector& psi,
                                   int n_max) {
  const GuardProjectors g = guard_projectors(loop);
  const CMatrix u_x = g.compress(loop.unitary);
  CVector w = g.compress_vector(psi);
  std::vector<double> out;
  out.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    out.push_back(w.squaredNorm());
    w = u_x * w;
  }
  return out;
}

//=========================================================================
// Validation
//=========================================================================

namespace {

void push(std::vector<Diagnostic>& diags, Diagnostic::Severity sev,
          const std::string& code, const std::string& message,
          double residual = 0.0) {
  diags.push_back({sev, code, message, residual});
}

}  // namespace

std::vector<Diagnostic> validate_measurement(const ProjectiveMeasurement& m) {
  std::vector<Diagnostic> diags;
  const double tol = tolerances().structural;
  CMatrix sum = CMatrix::Zero(m.dim, m.dim);
  for (size_t i = 0; i < m.outcomes.size(); ++i) {
    const Outcome& o = m.outcomes[i];
    if (o.projector.rows() != m.dim || o.projector.cols() != m.dim) {
      push(diags, Diagnostic::Severity::kError, "projector-dim",
           "projector '" + o.label + "' has wrong dimension");
      continue;
    }
    const double herm = (o.projector - o.projector.adjoint())
                            .cwiseAbs()
                            .maxCoeff();
    if (herm >= tol) {
      push(diags, Diagnostic::Severity::kError, "projector-hermitian",
           "projector '" + o.label + "' is not Hermitian", herm);
    }
    const double idem =
        (o.projector * o.projector - o.projector).cwiseAbs().maxCoeff();
    if (idem >= tol) {
      push(diags, Diagnostic::Severity::kError, "projector-idempotent",
           "projector '" + o.label + "' is not idempotent", idem);
    }
    for (size_t j = i + 1; j < m.outcomes.size(); ++j) {
      if (m.outcomes[j].projector.rows() != m.dim) continue;
      const double orth =
          (o.projector * m.outcomes[j].projector).cwiseAbs().maxCoeff();
      if (orth >= tol) {
        push(diags, Diagnostic::Severity::kError, "projector-orthogonal",
             "projectors '" + o.label + "' and '" + m.outcomes[j].label +
                 "' are not orthogonal",
             orth);
      }
    }
    sum += o.projector;
  }
  const double comp =
      (sum - CMatrix::Identity(m.dim, m.dim)).cwiseAbs().maxCoeff();
  if (comp >= tol) {
    push(diags, Diagnostic::Severity::kError, "completeness",
         "projectors do not sum to the identity", comp);
  }
  return diags;
}

std::vector<Diagnostic> validate_input(const StateInput& input) {
  std::vector<Diagnostic> diags;
  const double tol = tolerances().structural;
  if (input.kind == StateInput::Kind::kPure) {
    const double dev = std::abs(input.psi.norm() - 1.0);
    if (dev >= tol) {
      push(diags, Diagnostic::Severity::kError, "input-norm",
           "pure input is not normalized", dev);
    }
  } else {
    if (!is_hermitian(input.rho, tol)) {
      push(diags, Diagnostic::Severity::kError, "input-hermitian",
           "density operator is not Hermitian");
    } else if (!is_positive_semidefinite(input.rho, tol)) {
      push(diags, Diagnostic::Severity::kError, "input-positive",
           "density operator is not positive semidefinite");
    }
    const double dev = std::abs(trace(input.rho).real() - 1.0);
    if (dev >= tol) {
      push(diags, Diagnostic::Severity::kError, "input-trace",
           "density operator trace is not 1", dev);
    }
  }
  return diags;
}

std::vector<Diagnostic> validate_loop(const QuantumLoop& loop) {
  std::vector<Diagnostic> diags;
  const int k_total = loop.dim();
  if (loop.unitary.rows() != k_total || loop.unitary.cols() != k_total) {
    push(diags, Diagnostic::Severity::kError, "unitary-dim",
         "loop body does not match the declared register dimensions");
    return diags;
  }
  const double udev = operator_norm(
      (loop.unitary.adjoint() * loop.unitary -
       CMatrix::Identity(k_total, k_total))
          .eval());
  if (udev >= tolerances().structural) {
    push(diags, Diagnostic::Severity::kError, "unitarity",
         "loop body is not unitary", udev);
  }
  if (loop.measurement.dim != k_total) {
    push(diags, Diagnostic::Severity::kError, "measurement-dim",
         "measurement dimension does not match the loop dimension");
    return diags;
  }
  for (const Diagnostic& d : validate_measurement(loop.measurement)) {
    diags.push_back(d);
  }
  for (const std::string& label : loop.guard) {
    if (!loop.measurement.find(label)) {
      push(diags, Diagnostic::Severity::kError, "guard-label",
           "guard label '" + label + "' is not a measurement outcome");
    }
  }
  if (loop.guard_is_empty()) {
    push(diags, Diagnostic::Severity::kWarning, "guard-empty",
         "guard is empty: the loop terminates immediately and does nothing");
  } else if (loop.guard_is_full()) {
    push(diags, Diagnostic::Severity::kWarning, "guard-full",
         "guard covers every outcome: the loop runs forever");
  }
  return diags;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
    return d.severity == Diagnostic::Severity::kError;
  });
}

}  // namespace qloop
