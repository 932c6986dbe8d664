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

#include "qloop/termination.hpp"

#include <algorithm>
#include <cmath>

namespace qloop {

namespace {

// Largest U_X-invariant subspace of ker(I - U_X^dag U_X). U_X restricted to
// it is an isometry of an invariant finite-dimensional space, hence unitary,
// hence exactly the unit-modulus eigenspace (unit Jordan blocks have size 1).
// Working from the isometry defect instead of Schur vectors keeps the basis
// orthonormal to machine precision.
CMatrix unit_subspace(const CMatrix& u_x) {
  const Eigen::Index k = u_x.rows();
  const double defect_tol = 2.0 * tolerances().unit;
  const double leak_tol = 1e-7;

  const CMatrix defect =
      CMatrix::Identity(k, k) - u_x.adjoint() * u_x;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(defect);
  Eigen::Index d = 0;
  while (d < k && es.eigenvalues()(d) <= defect_tol) ++d;
  CMatrix basis = es.eigenvectors().leftCols(d);

  while (basis.cols() > 0) {
    const CMatrix image = u_x * basis;
    const CMatrix leak = image - basis * (basis.adjoint() * image);
    Eigen::JacobiSVD<CMatrix> svd(leak, Eigen::ComputeFullV);
    Eigen::Index kept = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()(i) <= leak_tol) ++kept;
    }
    // Singular values are descending: the kernel directions are the tail.
    const Eigen::Index cols = basis.cols();
    if (kept == cols) break;
    basis = (basis * svd.matrixV().rightCols(kept)).eval();
  }
  return basis;
}

}  // namespace

SpectralSplit spectral_split(const CMatrix& u_x) {
  if (u_x.rows() != u_x.cols()) {
    throw DimensionError("spectral_split: U_X must be square");
  }
  const Eigen::Index k = u_x.rows();
  SpectralSplit split;
  if (k == 0) {
    split.pi1 = CMatrix(0, 0);
    split.unit_basis = CMatrix(0, 0);
    split.schur = schur_triangularize(u_x);
    return split;
  }
  if (operator_norm(u_x) > 1.0 + tolerances().structural) {
    throw ContractionError(
        "spectral_split: operator norm exceeds 1; U_X is not the compression "
        "of a unitary");
  }

  split.schur = schur_triangularize(u_x);
  split.unit_basis = unit_subspace(u_x);
  const Eigen::Index t = split.unit_basis.cols();
  split.pi1 = split.unit_basis * split.unit_basis.adjoint();

  if (t > 0) {
    const CMatrix compressed =
        split.unit_basis.adjoint() * u_x * split.unit_basis;
    const EigenData eig = eig_normal(compressed);
    for (const EigenPair& p : eig.pairs) {
      split.unit_eigenpairs.push_back(
          {p.value, (split.unit_basis * p.vector).eval()});
    }
  }

  if (t == k) {
    split.stable_radius = 0.0;
  } else if (t == 0) {
    split.stable_radius = std::abs(split.schur.T(0, 0));
  } else {
    Eigen::HouseholderQR<CMatrix> qr(split.unit_basis);
    const CMatrix full = qr.householderQ() * CMatrix::Identity(k, k);
    const CMatrix complement = full.rightCols(k - t);
    const CMatrix stable_block =
        complement.adjoint() * u_x * complement;
    split.stable_radius = stable_block.eigenvalues().cwiseAbs().maxCoeff();
  }
  return split;
}

//=========================================================================
// Loop-level classification
//=========================================================================

LoopVerdict classify_loop(const QuantumLoop& loop) {
  LoopVerdict v;
  if (loop.guard_is_empty()) {
    v.kind = LoopClass::kTerminating;
    v.spectral_radius = 0.0;
    v.nilpotency_checked = true;
    v.uniform = true;
    return v;
  }
  if (loop.guard_is_full()) {
    v.kind = LoopClass::kNotAlmostTerminating;
    v.spectral_radius = 1.0;
    v.unit_count = loop.dim();
    return v;
  }

  const GuardProjectors g = guard_projectors(loop);
  const CMatrix u_x = g.compress(loop.unitary);
  const SpectralSplit split = spectral_split(u_x);

  v.unit_count = split.unit_count();
  const double raw_radius =
      split.unit_count() > 0 ? std::abs(split.schur.T(0, 0))
                             : split.stable_radius;
  v.spectral_radius = std::min(raw_radius, 1.0);

  // The |U_X^k| test is the robust form of nilpotency: eigenvalues of a
  // numerically perturbed nilpotent matrix can be as large as eps^(1/k).
  v.nilpotency_checked =
      operator_norm(matrix_power(u_x, g.k)) < tolerances().unit_zero;

  if (v.nilpotency_checked) {
    v.kind = LoopClass::kTerminating;
    v.uniform = true;
  } else if (split.unit_count() == 0 &&
             split.stable_radius < 1.0 - tolerances().unit) {
    v.kind = LoopClass::kAlmostTerminating;
    v.uniform = true;  // almost terminating iff uniformly almost terminating
  } else {
    v.kind = LoopClass::kNotAlmostTerminating;
  }
  return v;
}

//=========================================================================
// Per-input verdicts
//=========================================================================

namespace {

struct CompressedInput {
  GuardProjectors g;
  CMatrix u_x;
  CMatrix rho_x;
};

CompressedInput compress_input(const QuantumLoop& loop,
                               const StateInput& input) {
  CompressedInput c;
  c.g = guard_projectors(loop);
  c.u_x = c.g.compress(loop.unitary);
  c.rho_x = c.g.compress(input.density());
  return c;
}

}  // namespace

bool terminates_on(const QuantumLoop& loop, const StateInput& input) {
  if (loop.guard_is_empty()) return true;
  if (loop.guard_is_full()) return false;
  const CompressedInput c = compress_input(loop, input);
  CMatrix w = c.rho_x;
  for (int n = 0; n < c.g.k; ++n) w = c.u_x * w * c.u_x.adjoint();
  return operator_norm(w) < tolerances().zero;
}

bool almost_terminates_on(const QuantumLoop& loop, const StateInput& input) {
  return p_nt(loop, input) < tolerances().pnt;
}

double p_nt(const QuantumLoop& loop, const StateInput& input) {
  if (loop.guard_is_empty()) return 0.0;
  if (loop.guard_is_full()) return 1.0;
  const CompressedInput c = compress_input(loop, input);
  const SpectralSplit split = spectral_split(c.u_x);
  if (split.unit_count() == 0) return 0.0;
  const double value = trace((split.pi1 * c.rho_x).eval()).real();
  return std::clamp(value, 0.0, 1.0);
}

InputVerdict input_verdict(const QuantumLoop& loop, const StateInput& input) {
  InputVerdict v;
  if (loop.guard_is_empty()) {
    v.kind = InputClass::kTerminates;
    v.p_nt = 0.0;
    v.at_step = 1;
    return v;
  }
  if (loop.guard_is_full()) {
    v.kind = InputClass::kNonTerminating;
    v.p_nt = 1.0;
    return v;
  }

  const CompressedInput c = compress_input(loop, input);
  CMatrix w = c.rho_x;
  for (int n = 0; n <= c.g.k; ++n) {
    if (operator_norm(w) < tolerances().zero) {
      v.kind = InputClass::kTerminates;
      v.p_nt = 0.0;
      v.at_step = n + 1;  // p_NT^(n+1) is the first vanishing conditional
      return v;
    }
    w = c.u_x * w * c.u_x.adjoint();
  }

  v.p_nt = p_nt(loop, input);
  if (v.p_nt < tolerances().pnt) {
    v.kind = InputClass::kAlmostTerminates;
    v.marginal = v.p_nt >= tolerances().pnt * 1e-2;
  } else {
    v.kind = InputClass::kNonTerminating;
  }
  return v;
}

std::string to_string(LoopClass c) {
  switch (c) {
    case LoopClass::kTerminating:
      return "Terminating";
    case LoopClass::kAlmostTerminating:
      return "AlmostTerminating";
    case LoopClass::kNotAlmostTerminating:
      return "NotAlmostTerminating";
  }
  return "?";
}

std::string to_string(InputClass c) {
  switch (c) {
    case InputClass::kTerminates:
      return "Terminates";
    case InputClass::kAlmostTerminates:
      return "AlmostTerminates";
    case InputClass::kNonTerminating:
      return "NonTerminating";
  }
  return "?";
}

//=========================================================================
// Jordan block oracles
//=========================================================================

namespace {

double binomial(int n, int j) {
  if (j < 0 || j > n) return 0.0;
  double out = 1.0;
  for (int i = 0; i < j; ++i) out = out * (n - i) / (i + 1);
  return out;
}

Complex power_term(const Complex& lambda, int n, int j) {
  // binom(n, j) * lambda^(n-j), with 0^0 = 1 and the convention that a zero
  // binomial silences the (otherwise negative) power.
  if (j > n) return Complex(0, 0);
  Complex p(1, 0);
  for (int i = 0; i < n - j; ++i) p *= lambda;
  return binomial(n, j) * p;
}

void check_jordan_args(int r, int n) {
  if (r < 1) throw Error("jordan block size must be at least 1");
  if (n < 0) throw Error("jordan power must be nonnegative");
  if (n > 64) {
    throw Error("jordan power capped at 64: binomials are computed in "
                "double precision");
  }
}

}  // namespace

CMatrix jordan_block(const Complex& lambda, int r) {
  if (r < 1) throw Error("jordan block size must be at least 1");
  CMatrix j = CMatrix::Zero(r, r);
  for (int i = 0; i < r; ++i) {
    j(i, i) = lambda;
    if (i + 1 < r) j(i, i + 1) = Complex(1, 0);
  }
  return j;
}

CMatrix jordan_block_power(const Complex& lambda, int r, int n) {
  check_jordan_args(r, n);
  CMatrix out = CMatrix::Zero(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = i; j < r; ++j) {
      out(i, j) = power_term(lambda, n, j - i);
    }
  }
  return out;
}

CVector jordan_block_apply(const Complex& lambda, int r, int n,
                           const CVector& v) {
  check_jordan_args(r, n);
  if (v.size() != r) {
    throw DimensionError("jordan_block_apply: vector length must equal r");
  }
  CVector out = CVector::Zero(r);
  for (int m = 0; m < r; ++m) {
    Complex acc(0, 0);
    for (int i = 0; i + m < r; ++i) {
      acc += power_term(lambda, n, i) * v(i + m);
    }
    out(m) = acc;
  }
  return out;
}

}  // namespace qloop
