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

#include <doctest.h>

#include "qloop/gates.hpp"
#include "qloop/linalg.hpp"
#include "test_support.hpp"

using namespace qloop;
using qloop::testing::Rng;

namespace {

CMatrix basis_projector(int dim, int i) {
  CMatrix p = CMatrix::Zero(dim, dim);
  p(i, i) = Complex(1, 0);
  return p;
}

}  // namespace

TEST_CASE("tensor product basics") {
  const CMatrix i2 = gates::identity(2);
  CHECK((tensor_product(i2, i2) - gates::identity(4)).cwiseAbs().maxCoeff() ==
        0.0);

  // |0><0| (x) |1><1| = |01><01|
  const CMatrix p = tensor_product(basis_projector(2, 0), basis_projector(2, 1));
  CHECK((p - basis_projector(4, 1)).cwiseAbs().maxCoeff() == 0.0);

  // (H (x) H)(0,3) = 1/2 by expanding the 4x4 product by hand.
  const CMatrix hh = tensor_product(gates::hadamard(), gates::hadamard());
  CHECK(std::abs(hh(0, 3) - Complex(0.5, 0)) < 1e-15);

  // tr(A (x) B) = tr(A) tr(B)
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = testing::random_ginibre(rng, 3, 3);
    const CMatrix b = testing::random_ginibre(rng, 4, 4);
    CHECK(std::abs(trace(tensor_product(a, b)) - trace(a) * trace(b)) < 1e-10);
  }
}

TEST_CASE("structural predicates") {
  CHECK(is_unitary(gates::hadamard()));
  CHECK(is_unitary(gates::cnot()));
  CHECK_FALSE(is_unitary((2.0 * gates::identity(2)).eval()));

  CMatrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  CHECK(is_positive_semidefinite(plus));
  CHECK(std::abs(trace(plus) - Complex(1, 0)) < 1e-15);

  CMatrix nilpotent(2, 2);
  nilpotent << 0, 1, 0, 0;
  CHECK_FALSE(is_hermitian(nilpotent));

  CHECK_THROWS_AS(trace(CMatrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("operator norm") {
  CHECK(operator_norm(gates::identity(5)) == doctest::Approx(1.0));
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 0.5;
  d(1, 1) = 0.2;
  CHECK(operator_norm(d) == doctest::Approx(0.5));

  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    CHECK(std::abs(operator_norm(testing::haar_unitary(rng, 5)) - 1.0) <
          1e-12);
    // Submultiplicativity.
    const CMatrix a = testing::random_ginibre(rng, 4, 4);
    const CMatrix b = testing::random_ginibre(rng, 4, 4);
    CHECK(operator_norm((a * b).eval()) <=
          operator_norm(a) * operator_norm(b) + 1e-10);
  }
}

TEST_CASE("schur triangularization") {
  SUBCASE("already triangular, reordered") {
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 0.3;
    d(1, 1) = 0.7;
    const SchurData s = schur_triangularize(d);
    CHECK(std::abs(s.T(0, 0) - Complex(0.7, 0)) < 1e-14);
    CHECK(std::abs(s.T(1, 1) - Complex(0.3, 0)) < 1e-14);
    CHECK(operator_norm((s.reconstruct() - d).eval()) < 1e-14);
  }

  SUBCASE("nilpotent block is reproduced") {
    CMatrix n(2, 2);
    n << 0, 1, 0, 0;
    const SchurData s = schur_triangularize(n);
    CHECK(std::abs(s.T(0, 0)) < 1e-14);
    CHECK(std::abs(s.T(1, 1)) < 1e-14);
    CHECK(operator_norm((s.reconstruct() - n).eval()) < 1e-12);
  }

  SUBCASE("random contractions reconstruct") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 15);
      CMatrix a = testing::random_ginibre(rng, n, n);
      a /= (operator_norm(a) + 0.1);
      const SchurData s = schur_triangularize(a);
      CHECK(operator_norm((s.reconstruct() - a).eval()) < 1e-10);
      CHECK(is_unitary(s.V, 1e-10));
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) CHECK(std::abs(s.T(i, j)) == 0.0);
      }
      // Deterministic order.
      for (Eigen::Index i = 1; i < n; ++i) {
        CHECK_FALSE(spectral_precedes(s.T(i, i), s.T(i - 1, i - 1)));
      }
    }
  }

  SUBCASE("diagonal matches the characteristic polynomial roots") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 3);  // dims 2..4
      const CMatrix a = testing::random_ginibre(rng, n, n);
      const SchurData s = schur_triangularize(a);
      std::vector<Complex> diag;
      for (Eigen::Index i = 0; i < n; ++i) diag.push_back(s.T(i, i));
      CHECK(testing::spectrum_distance(diag, testing::charpoly_roots(a)) <
            1e-8);
    }
  }

  SUBCASE("non-square input") {
    CHECK_THROWS_AS(schur_triangularize(CMatrix::Zero(2, 3)), DimensionError);
  }
}

TEST_CASE("eig_normal") {
  SUBCASE("pauli z") {
    const EigenData e = eig_normal(gates::pauli_z());
    REQUIRE(e.pairs.size() == 2);
    CHECK(std::abs(e.pairs[0].value - Complex(1, 0)) < 1e-14);
    CHECK(std::abs(e.pairs[1].value - Complex(-1, 0)) < 1e-14);
    CHECK(std::abs(std::abs(e.pairs[0].vector(0)) - 1.0) < 1e-14);
    CHECK(std::abs(std::abs(e.pairs[1].vector(1)) - 1.0) < 1e-14);
  }

  SUBCASE("hadamard eigenvalues are +1 and -1") {
    // Characteristic polynomial x^2 - tr x + det = x^2 - 0x - 1.
    const EigenData e = eig_normal(gates::hadamard());
    REQUIRE(e.pairs.size() == 2);
    CHECK(std::abs(e.pairs[0].value - Complex(1, 0)) < 1e-12);
    CHECK(std::abs(e.pairs[1].value - Complex(-1, 0)) < 1e-12);
  }

  SUBCASE("identity reconstructs with any orthonormal basis") {
    const EigenData e = eig_normal(gates::identity(3));
    REQUIRE(e.pairs.size() == 3);
    CMatrix v = e.vectors();
    CHECK(is_unitary(v, 1e-12));
    for (const EigenPair& p : e.pairs) {
      CHECK(std::abs(p.value - Complex(1, 0)) < 1e-14);
    }
  }

  SUBCASE("rejects non-normal input") {
    CMatrix n(2, 2);
    n << 0, 1, 0, 0;
    CHECK_THROWS_AS(eig_normal(n), NormalityError);
  }

  SUBCASE("hermitian spectra are real, unitary spectra unimodular") {
    Rng rng(101);
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 7);
      CMatrix g = testing::random_ginibre(rng, n, n);
      const CMatrix herm = ((g + g.adjoint()) / 2.0).eval();
      for (const EigenPair& p : eig_normal(herm).pairs) {
        CHECK(std::abs(p.value.imag()) < 1e-10);
        CHECK((herm * p.vector - p.value * p.vector).norm() < 1e-9);
      }
      const CMatrix u = testing::haar_unitary(rng, n);
      const EigenData e = eig_normal(u);
      CHECK(is_unitary(e.vectors(), 1e-10));
      for (const EigenPair& p : e.pairs) {
        CHECK(std::abs(std::abs(p.value) - 1.0) < 1e-10);
        CHECK((u * p.vector - p.value * p.vector).norm() < 1e-9);
      }
    }
  }

  SUBCASE("degenerate spectra still give an orthonormal basis") {
    Rng rng(55);
    const CMatrix v = testing::haar_unitary(rng, 6);
    CMatrix diag = CMatrix::Zero(6, 6);
    const double values[6] = {2, 2, 2, -1, -1, 5};
    for (int i = 0; i < 6; ++i) diag(i, i) = values[i];
    const CMatrix a = v * diag * v.adjoint();
    const EigenData e = eig_normal(a);
    CHECK(is_unitary(e.vectors(), 1e-9));
    for (const EigenPair& p : e.pairs) {
      CHECK((a * p.vector - p.value * p.vector).norm() < 1e-9);
    }
  }
}

TEST_CASE("tolerance overrides") {
  const Tolerances saved = tolerances();
  apply_tolerance_overrides("unit=1e-6,zero=1e-10");
  CHECK(tolerances().unit == 1e-6);
  CHECK(tolerances().zero == 1e-10);
  CHECK_THROWS_AS(apply_tolerance_overrides("bogus=1"), Error);
  tolerances() = saved;
}
