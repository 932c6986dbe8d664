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

#include "qloop/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qloop {

Tolerances& tolerances() {
  static Tolerances tol;
  return tol;
}

void apply_tolerance_overrides(const std::string& spec) {
  if (spec.empty()) return;
  Tolerances& tol = tolerances();
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error("tolerance override '" + item + "' is not name=value");
    }
    const std::string name = item.substr(0, eq);
    const double value = std::stod(item.substr(eq + 1));
    if (name == "structural") {
      tol.structural = value;
    } else if (name == "residual") {
      tol.residual = value;
    } else if (name == "unit") {
      tol.unit = value;
    } else if (name == "unit_zero") {
      tol.unit_zero = value;
    } else if (name == "zero") {
      tol.zero = value;
    } else if (name == "spectrum") {
      tol.spectrum = value;
    } else if (name == "series") {
      tol.series = value;
    } else if (name == "inside") {
      tol.inside = value;
    } else if (name == "pnt") {
      tol.pnt = value;
    } else {
      throw Error("unknown tolerance name '" + name + "'");
    }
  }
}

namespace {

void require_square(const CMatrix& a, const char* who) {
  if (a.rows() != a.cols()) {
    throw DimensionError(std::string(who) + ": matrix must be square, got " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
  }
}

double pick(double tol, double fallback) { return tol < 0 ? fallback : tol; }

}  // namespace

Complex trace(const CMatrix& a) {
  require_square(a, "trace");
  return a.trace();
}

bool is_unitary(const CMatrix& a, double tol) {
  require_square(a, "is_unitary");
  tol = pick(tol, tolerances().structural);
  if (a.rows() == 0) return true;
  const CMatrix d = a.adjoint() * a - CMatrix::Identity(a.rows(), a.cols());
  return operator_norm(d) < tol;
}

bool is_hermitian(const CMatrix& a, double tol) {
  require_square(a, "is_hermitian");
  tol = pick(tol, tolerances().structural);
  if (a.rows() == 0) return true;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() < tol;
}

bool is_positive_semidefinite(const CMatrix& a, double tol) {
  require_square(a, "is_positive_semidefinite");
  tol = pick(tol, tolerances().structural);
  if (a.rows() == 0) return true;
  if (!is_hermitian(a, tol)) return false;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > -tol;
}

double operator_norm(const CMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

CMatrix tensor_product(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix matrix_power(const CMatrix& a, int n) {
  require_square(a, "matrix_power");
  if (n < 0) throw Error("matrix_power: negative exponent");
  CMatrix out = CMatrix::Identity(a.rows(), a.cols());
  for (int i = 0; i < n; ++i) out = out * a;
  return out;
}

CMatrix hermitian_sqrt_psd(const CMatrix& a) {
  require_square(a, "hermitian_sqrt_psd");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
  Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * vals.asDiagonal() *
         es.eigenvectors().adjoint();
}

bool spectral_precedes(const Complex& a, const Complex& b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (ma != mb) return ma > mb;
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

namespace {

// Exchanges the diagonal entries at positions (i, i+1) of an upper
// triangular T by a unitary similarity, updating V accordingly. The rotation
// comes from the normalized eigenvector (b, c-a) of the 2x2 corner block for
// its lower eigenvalue c; for a Jordan-coupled pair (a == c) there is
// nothing to exchange.
void swap_adjacent(CMatrix& T, CMatrix& V, Eigen::Index i) {
  const Complex a = T(i, i);
  const Complex b = T(i, i + 1);
  const Complex c = T(i + 1, i + 1);
  if (a == c) return;
  const double n = std::sqrt(std::norm(b) + std::norm(c - a));
  if (n == 0.0) return;
  const Complex x0 = b / n, x1 = (c - a) / n;
  CMatrix g(2, 2);
  g << x0, -std::conj(x1), x1, std::conj(x0);
  T.block(i, 0, 2, T.cols()) = g.adjoint() * T.block(i, 0, 2, T.cols());
  T.block(0, i, T.rows(), 2) = T.block(0, i, T.rows(), 2) * g;
  V.block(0, i, V.rows(), 2) = V.block(0, i, V.rows(), 2) * g;
  T(i + 1, i) = Complex(0, 0);
}

}  // namespace

SchurData schur_triangularize(const CMatrix& a) {
  require_square(a, "schur_triangularize");
  const Eigen::Index k = a.rows();
  SchurData out;
  out.dim = static_cast<int>(k);
  if (k == 0) {
    out.V = CMatrix(0, 0);
    out.T = CMatrix(0, 0);
    return out;
  }
  Eigen::ComplexSchur<CMatrix> schur(a, /*computeU=*/true);
  if (schur.info() != Eigen::Success) {
    throw NumericalError("schur_triangularize: iteration failed to converge");
  }
  out.V = schur.matrixU();
  out.T = schur.matrixT();
  // Selection sort of the diagonal into the deterministic order; each move is
  // a chain of adjacent unitary exchanges, so the Schur form is preserved.
  for (Eigen::Index p = 0; p < k; ++p) {
    Eigen::Index best = p;
    for (Eigen::Index j = p + 1; j < k; ++j) {
      if (spectral_precedes(out.T(j, j), out.T(best, best))) best = j;
    }
    for (Eigen::Index j = best; j > p; --j) {
      swap_adjacent(out.T, out.V, j - 1);
    }
  }
  // Clean roundoff below the diagonal.
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) out.T(i, j) = Complex(0, 0);
  }
  return out;
}

CVector EigenData::values() const {
  CVector v(static_cast<Eigen::Index>(pairs.size()));
  for (size_t i = 0; i < pairs.size(); ++i) v(i) = pairs[i].value;
  return v;
}

CMatrix EigenData::vectors() const {
  if (pairs.empty()) return CMatrix(0, 0);
  CMatrix m(pairs[0].vector.size(), static_cast<Eigen::Index>(pairs.size()));
  for (size_t i = 0; i < pairs.size(); ++i) m.col(i) = pairs[i].vector;
  return m;
}

// A normal matrix splits as B + iC with B = (A+A^dag)/2, C = (A-A^dag)/2i
// Hermitian and commuting, so a common orthonormal eigenbasis exists: first
// diagonalize B, then diagonalize C compressed to each eigenspace of B. This
// keeps the eigenvectors orthonormal to machine precision even for
// degenerate or clustered spectra, which the raw general eigensolver does
// not guarantee.
EigenData eig_normal(const CMatrix& a, double tol) {
  require_square(a, "eig_normal");
  const Eigen::Index k = a.rows();
  EigenData out;
  if (k == 0) return out;

  tol = pick(tol, tolerances().structural);
  const CMatrix defect = a * a.adjoint() - a.adjoint() * a;
  if (operator_norm(defect) >= tol * std::max(1.0, a.squaredNorm())) {
    throw NormalityError(
        "eig_normal: input is not normal within tolerance; use "
        "schur_triangularize instead");
  }

  const CMatrix b = (a + a.adjoint()) / 2.0;
  const CMatrix c = (a - a.adjoint()) / Complex(0, 2);
  Eigen::SelfAdjointEigenSolver<CMatrix> esb(b);
  const Eigen::VectorXd beta = esb.eigenvalues();
  CMatrix q = esb.eigenvectors();

  const double scale = std::max(1.0, operator_norm(a));
  const double cluster_tol = tolerances().spectrum * scale;

  Eigen::Index lo = 0;
  while (lo < k) {
    Eigen::Index hi = lo + 1;
    while (hi < k && beta(hi) - beta(hi - 1) <= cluster_tol) ++hi;
    const Eigen::Index d = hi - lo;
    CMatrix w = q.middleCols(lo, d);
    if (d > 1) {
      Eigen::SelfAdjointEigenSolver<CMatrix> esc(
          (w.adjoint() * c * w).eval());
      w = w * esc.eigenvectors();
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      EigenPair pair;
      pair.vector = w.col(j);
      pair.value = pair.vector.dot(a * pair.vector);  // Rayleigh quotient
      out.pairs.push_back(std::move(pair));
    }
    lo = hi;
  }

  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const EigenPair& x, const EigenPair& y) {
              return spectral_precedes(x.value, y.value);
            });
  return out;
}

CMatrix range_basis(const CMatrix& a, double cutoff) {
  if (a.rows() == 0 || a.cols() == 0) return CMatrix(a.rows(), 0);
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU);
  Eigen::Index rank = 0;
  while (rank < svd.singularValues().size() &&
         svd.singularValues()(rank) > cutoff) {
    ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

}  // namespace qloop
