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

#ifndef QLOOP_LINALG_HPP_
#define QLOOP_LINALG_HPP_

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qloop {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

//=========================================================================
// Errors
//=========================================================================

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NormalityError : public Error {
 public:
  using Error::Error;
};

class ContractionError : public Error {
 public:
  using Error::Error;
};

class ApplicabilityError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

//=========================================================================
// Tolerances
//=========================================================================

// Process-wide numeric thresholds. Every routine that takes a tolerance
// defaults to one of these fields, so the whole stack can be retuned in one
// place (the CLI honors the QLOOP_TOL environment variable).
struct Tolerances {
  double structural = 1e-9;  // structural predicates (unitary, hermitian, ...)
  double residual = 1e-10;   // decomposition reconstruction target
  double unit = 1e-8;        // |lambda| >= 1 - unit counts as unit modulus
  double unit_zero = 1e-8;   // nilpotency: every |lambda| below this
  double zero = 1e-12;       // branch probabilities below this are absent
  double spectrum = 1e-8;    // eigenvalue grouping for observables
  double series = 1e-12;     // series truncation threshold
  double inside = 1e-8;      // "lies in H_X" test used by perturbations
  double pnt = 1e-9;         // p_NT below this counts as zero in verdicts
};

Tolerances& tolerances();

// Applies overrides of the form "unit=1e-7,zero=1e-10". Unknown names throw.
void apply_tolerance_overrides(const std::string& spec);

//=========================================================================
// Basic operations and predicates
//=========================================================================

inline CMatrix dagger(const CMatrix& a) { return a.adjoint(); }

Complex trace(const CMatrix& a);

bool is_unitary(const CMatrix& a, double tol = -1);
bool is_hermitian(const CMatrix& a, double tol = -1);
bool is_positive_semidefinite(const CMatrix& a, double tol = -1);

// Largest singular value.
double operator_norm(const CMatrix& a);

// Kronecker product: (A (x) B)(|x>(x)|y>) = A|x> (x) B|y>.
CMatrix tensor_product(const CMatrix& a, const CMatrix& b);

// A^n for n >= 0 by repeated multiplication.
CMatrix matrix_power(const CMatrix& a, int n);

// Square root of a positive semidefinite Hermitian matrix (eigenvalues
// clamped at zero).
CMatrix hermitian_sqrt_psd(const CMatrix& a);

// Deterministic eigenvalue order: decreasing |lambda|, ties broken by
// decreasing real part, then decreasing imaginary part.
bool spectral_precedes(const Complex& a, const Complex& b);

//=========================================================================
// Decompositions
//=========================================================================

// A = V T V^dag with T upper triangular and diag(T) = spec(A) in the
// deterministic order above.
struct SchurData {
  CMatrix V;  // unitary
  CMatrix T;  // upper triangular
  int dim = 0;

  CMatrix reconstruct() const { return V * T * V.adjoint(); }
  CVector eigenvalues() const { return T.diagonal(); }
};

SchurData schur_triangularize(const CMatrix& a);

struct EigenPair {
  Complex value;
  CVector vector;
};

// Complete orthonormal eigensystem of a normal matrix, deterministically
// ordered. Eigenvectors inside a degenerate eigenspace are an arbitrary
// orthonormal basis of it.
struct EigenData {
  std::vector<EigenPair> pairs;

  CVector values() const;
  CMatrix vectors() const;  // eigenvectors as columns, pair order
};

EigenData eig_normal(const CMatrix& a, double tol = -1);

// Orthonormal basis (columns) of the span of the columns of a, keeping only
// directions with singular value above cutoff.
CMatrix range_basis(const CMatrix& a, double cutoff = 1e-9);

}  // namespace qloop

#endif  // QLOOP_LINALG_HPP_
