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

#include "qloop/computed_function.hpp"

#include <cmath>

namespace qloop {

namespace {

struct FContext {
  GuardProjectors g;
  CMatrix u_x;
  SpectralSplit split;
  CMatrix rho;
  CMatrix rho_x;
  CMatrix stable_projector;  // Q = I - Pi1
};

FContext make_context(const QuantumLoop& loop, const StateInput& input) {
  FContext c;
  c.g = guard_projectors(loop);
  c.u_x = c.g.compress(loop.unitary);
  c.split = spectral_split(c.u_x);
  c.rho = input.density();
  c.rho_x = c.g.compress(c.rho);
  c.stable_projector =
      CMatrix::Identity(c.g.k, c.g.k) - c.split.pi1;
  return c;
}

// Wraps a solved/summed stable block Y into the full-space output.
PartialDensity assemble(const QuantumLoop& loop, const FContext& c,
                        const CMatrix& y, const std::string& method,
                        double truncation_bound) {
  const CMatrix inner = loop.unitary * c.g.embed(y) * loop.unitary.adjoint();
  PartialDensity out;
  out.matrix = c.g.p_xbar * (c.rho + inner) * c.g.p_xbar;
  out.matrix = ((out.matrix + out.matrix.adjoint()) / 2.0).eval();
  out.trace_value = trace(out.matrix).real();
  out.method = method;
  out.truncation_bound = truncation_bound;
  return out;
}

bool trivial_guard(const QuantumLoop& loop, const StateInput& input,
                   const std::string& method, PartialDensity* out) {
  if (loop.guard_is_empty()) {
    out->matrix = input.density();
    out->trace_value = 1.0;
    out->method = method;
    return true;
  }
  if (loop.guard_is_full()) {
    const int k = loop.dim();
    out->matrix = CMatrix::Zero(k, k);
    out->trace_value = 0.0;
    out->method = method;
    return true;
  }
  return false;
}

}  // namespace

PartialDensity f_series(const QuantumLoop& loop, const StateInput& input,
                        double tol_conv) {
  PartialDensity out;
  if (trivial_guard(loop, input, "series", &out)) return out;
  if (tol_conv < 0) tol_conv = tolerances().series;

  const FContext c = make_context(loop, input);
  const CMatrix& q = c.stable_projector;
  CMatrix term = q * c.rho_x * q;
  CMatrix y = CMatrix::Zero(c.g.k, c.g.k);

  const double radius = c.split.stable_radius;
  double term_trace = trace(term).real();
  long iterations = 0;
  const long max_iterations = 2'000'000;
  while (term_trace >= tol_conv) {
    y += term;
    term = (c.u_x * term * c.u_x.adjoint()).eval();
    term_trace = trace(term).real();
    if (++iterations > max_iterations) {
      throw NumericalError(
          "f_series: series did not converge (stable radius " +
          std::to_string(radius) + ")");
    }
  }
  const double tail =
      radius < 1.0 ? term_trace / std::max(1e-300, 1.0 - radius * radius)
                   : term_trace;
  return assemble(loop, c, y, "series", tail);
}

PartialDensity f_solve(const QuantumLoop& loop, const StateInput& input) {
  PartialDensity out;
  if (trivial_guard(loop, input, "solve", &out)) return out;

  const FContext c = make_context(loop, input);
  const CMatrix& q = c.stable_projector;
  const CMatrix a = q * c.u_x * q;
  const CMatrix rho_s = q * c.rho_x * q;
  const Eigen::Index k = c.g.k;

  // Vectorize Y = rho_s + A Y A^dag columnwise: (I - conj(A) (x) A) vec(Y)
  // = vec(rho_s). Unique solution since the stable spectral radius is < 1.
  const CMatrix lhs = CMatrix::Identity(k * k, k * k) -
                      tensor_product(a.conjugate(), a);
  CVector rhs(k * k);
  for (Eigen::Index j = 0; j < k; ++j) rhs.segment(j * k, k) = rho_s.col(j);
  const CVector solved = lhs.partialPivLu().solve(rhs);
  CMatrix y(k, k);
  for (Eigen::Index j = 0; j < k; ++j) y.col(j) = solved.segment(j * k, k);
  y = ((y + y.adjoint()) / 2.0).eval();

  const double residual =
      operator_norm((y - rho_s - a * y * a.adjoint()).eval());
  if (residual > 1e-6) {
    throw NumericalError(
        "f_solve: fixed-point residual " + std::to_string(residual) +
        " is too large; fall back to f_series");
  }
  return assemble(loop, c, y, "solve", residual);
}

PartialDensity f_normal(const QuantumLoop& loop, const StateInput& input) {
  PartialDensity out;
  if (trivial_guard(loop, input, "normal", &out)) return out;

  const FContext c = make_context(loop, input);
  EigenData eig;
  try {
    eig = eig_normal(c.u_x);
  } catch (const NormalityError& e) {
    throw ApplicabilityError(std::string("f_normal: ") + e.what());
  }

  const double unit_cut = 1.0 - tolerances().unit;
  std::vector<const EigenPair*> stable;
  for (const EigenPair& p : eig.pairs) {
    if (std::abs(p.value) < unit_cut) stable.push_back(&p);
  }

  CMatrix f = c.g.p_xbar * c.rho * c.g.p_xbar;
  std::vector<CVector> mapped;  // P_Xbar U |i> lifted to H
  mapped.reserve(stable.size());
  for (const EigenPair* p : stable) {
    mapped.push_back(
        (c.g.p_xbar * (loop.unitary * c.g.embed_vector(p->vector))).eval());
  }
  for (size_t i = 0; i < stable.size(); ++i) {
    for (size_t j = 0; j < stable.size(); ++j) {
      const Complex geom =
          1.0 / (1.0 - stable[i]->value * std::conj(stable[j]->value));
      const Complex weight =
          stable[i]->vector.dot(c.rho_x * stable[j]->vector);
      f += geom * weight * (mapped[i] * mapped[j].adjoint());
    }
  }
  out.matrix = ((f + f.adjoint()) / 2.0).eval();
  out.trace_value = trace(out.matrix).real();
  out.method = "normal";
  return out;
}

PartialDensity computed_function(const QuantumLoop& loop,
                                 const StateInput& input, FMethod method) {
  switch (method) {
    case FMethod::kSeries:
      return f_series(loop, input);
    case FMethod::kSolve:
      return f_solve(loop, input);
    case FMethod::kNormal:
      return f_normal(loop, input);
    case FMethod::kAuto:
      break;
  }
  if (!loop.guard_is_empty() && !loop.guard_is_full()) {
    const GuardProjectors g = guard_projectors(loop);
    const CMatrix u_x = g.compress(loop.unitary);
    const CMatrix defect = u_x * u_x.adjoint() - u_x.adjoint() * u_x;
    if (operator_norm(defect) <
        tolerances().structural * std::max(1.0, u_x.squaredNorm())) {
      return f_normal(loop, input);
    }
  }
  try {
    return f_solve(loop, input);
  } catch (const NumericalError&) {
    return f_series(loop, input);
  }
}

//=========================================================================
// Jordan closed forms
//=========================================================================

CVector jordan_series_sum(const Complex& lambda, int r, const CVector& v) {
  if (r < 1) throw Error("jordan_series_sum: block size must be >= 1");
  if (v.size() != r) {
    throw DimensionError("jordan_series_sum: vector length must equal r");
  }
  if (std::abs(lambda) >= 1.0) {
    throw DivergenceError(
        "jordan_series_sum: |lambda| >= 1, the series diverges");
  }
  // f_i(lambda) = (1 - lambda)^-(i+1).
  std::vector<Complex> f(r);
  const Complex inv = 1.0 / (Complex(1, 0) - lambda);
  f[0] = inv;
  for (int i = 1; i < r; ++i) f[i] = f[i - 1] * inv;

  CVector out = CVector::Zero(r);
  for (int m = 0; m < r; ++m) {
    Complex acc(0, 0);
    for (int i = 0; i + m < r; ++i) acc += f[i] * v(i + m);
    out(m) = acc;
  }
  return out;
}

//=========================================================================
// Synthetic Jordan-built loops
//=========================================================================

int JordanSpec::dim() const {
  int k = 0;
  for (const Block& b : blocks) k += b.size;
  return k;
}

int JordanSpec::unit_count() const {
  int t = 0;
  for (const Block& b : blocks) {
    if (std::abs(b.lambda) >= 1.0 - tolerances().unit) t += b.size;
  }
  return t;
}

CMatrix JordanSpec::jordan_matrix() const {
  const int k = dim();
  CMatrix j = CMatrix::Zero(k, k);
  int offset = 0;
  for (const Block& b : blocks) {
    j.block(offset, offset, b.size, b.size) = jordan_block(b.lambda, b.size);
    offset += b.size;
  }
  return j;
}

CMatrix JordanSpec::u_x() const {
  check();
  return s * jordan_matrix() * s.partialPivLu().inverse();
}

void JordanSpec::check() const {
  const int k = dim();
  if (k == 0) throw Error("JordanSpec: no blocks");
  if (s.rows() != k || s.cols() != k) {
    throw DimensionError("JordanSpec: S must be k x k with k the total "
                         "block size");
  }
  bool seen_stable = false;
  for (const Block& b : blocks) {
    const bool unit = std::abs(b.lambda) >= 1.0 - tolerances().unit;
    if (unit && b.size != 1) {
      throw Error("JordanSpec: unit-modulus blocks must have size 1");
    }
    if (unit && seen_stable) {
      throw Error("JordanSpec: unit-modulus blocks must come first");
    }
    if (!unit) seen_stable = true;
    if (b.size < 1) throw Error("JordanSpec: block sizes must be positive");
  }
}

SyntheticJordanLoop build_synthetic_loop(const JordanSpec& spec) {
  spec.check();
  const int k = spec.dim();
  const CMatrix u_x = spec.u_x();
  if (operator_norm(u_x) > 1.0 + 1e-9) {
    throw ContractionError(
        "build_synthetic_loop: S J S^-1 has operator norm above 1 and is not "
        "a compression of any unitary");
  }

  // Halmos dilation of the contraction U_X onto 2k dimensions, built from
  // one SVD so both defect square roots share the same singular values and
  // the block unitarity identities hold to machine precision.
  Eigen::JacobiSVD<CMatrix> svd(u_x,
                                Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::VectorXd sigma = svd.singularValues().cwiseMin(1.0);
  Eigen::VectorXd cosigma =
      (Eigen::VectorXd::Ones(k) - sigma.cwiseProduct(sigma)).cwiseMax(0.0)
          .cwiseSqrt();
  const CMatrix w = svd.matrixU();
  const CMatrix v = svd.matrixV();
  CMatrix u(2 * k, 2 * k);
  u.topLeftCorner(k, k) = w * sigma.asDiagonal() * v.adjoint();
  u.topRightCorner(k, k) = w * cosigma.asDiagonal() * w.adjoint();
  u.bottomLeftCorner(k, k) = v * cosigma.asDiagonal() * v.adjoint();
  u.bottomRightCorner(k, k) = -v * sigma.asDiagonal() * w.adjoint();

  SyntheticJordanLoop synth;
  synth.jordan = spec;
  synth.loop.subsystem_dims = {2 * k};
  synth.loop.unitary = u;
  synth.loop.measurement = ProjectiveMeasurement::computational({2 * k});
  for (int i = 0; i < k; ++i) {
    synth.loop.guard.insert(std::to_string(i));
  }
  return synth;
}

PartialDensity f_pure_jordan(const SyntheticJordanLoop& synth,
                             const CVector& psi) {
  const JordanSpec& spec = synth.jordan;
  if (spec.blocks.empty()) {
    throw ApplicabilityError("f_pure_jordan: loop has no Jordan data");
  }
  spec.check();
  const int k = spec.dim();
  if (psi.size() != 2 * k) {
    throw DimensionError("f_pure_jordan: input does not match loop dimension");
  }

  const GuardProjectors g = guard_projectors(synth.loop);
  const CVector psi_x = g.compress_vector(psi);
  CVector v = spec.s.partialPivLu().solve(psi_x);

  // Unit-modulus components never reach the output; drop them and sum the
  // stable blocks in closed form.
  CVector u = CVector::Zero(k);
  int offset = 0;
  for (const JordanSpec::Block& b : spec.blocks) {
    if (std::abs(b.lambda) < 1.0 - tolerances().unit) {
      u.segment(offset, b.size) =
          jordan_series_sum(b.lambda, b.size, v.segment(offset, b.size));
    }
    offset += b.size;
  }

  const CVector lifted = g.embed_vector((spec.s * u).eval());
  const CVector w = g.p_xbar * (psi + synth.loop.unitary * lifted);

  PartialDensity out;
  out.matrix = w * w.adjoint();
  out.trace_value = w.squaredNorm();
  out.method = "jordan";
  return out;
}

}  // namespace qloop
