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

#include <cmath>

#include "qloop/computed_function.hpp"
#include "qloop/gates.hpp"
#include "qloop/termination.hpp"
#include "test_support.hpp"

using namespace qloop;
using qloop::testing::Rng;

namespace {

CVector ket(int dim, int i) {
  CVector v = CVector::Zero(dim);
  v(i) = Complex(1, 0);
  return v;
}

CVector plus_state() {
  CVector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return v;
}

CMatrix scalar(const Complex& z) {
  CMatrix m(1, 1);
  m(0, 0) = z;
  return m;
}

}  // namespace

TEST_CASE("spectral_split") {
  SUBCASE("unit scalar") {
    const SpectralSplit s = spectral_split(scalar(Complex(1, 0)));
    REQUIRE(s.unit_count() == 1);
    CHECK(std::abs(s.unit_eigenpairs[0].value - Complex(1, 0)) < 1e-12);
    CHECK(std::abs(s.pi1(0, 0) - Complex(1, 0)) < 1e-12);
    CHECK(s.stable_radius == doctest::Approx(0.0));
  }

  SUBCASE("hadamard compression is purely stable") {
    const SpectralSplit s =
        spectral_split(scalar(Complex(1.0 / std::sqrt(2.0), 0)));
    CHECK(s.unit_count() == 0);
    CHECK(s.stable_radius == doctest::Approx(1.0 / std::sqrt(2.0)));
  }

  SUBCASE("diagonal mix") {
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = std::exp(Complex(0, M_PI / 4));
    d(1, 1) = 0.5;
    const SpectralSplit s = spectral_split(d);
    REQUIRE(s.unit_count() == 1);
    CHECK(std::abs(s.unit_eigenpairs[0].value - d(0, 0)) < 1e-12);
    CHECK(s.stable_radius == doctest::Approx(0.5));
  }

  SUBCASE("norm violation is rejected") {
    CHECK_THROWS_AS(spectral_split(scalar(Complex(1.5, 0))),
                    ContractionError);
  }

  SUBCASE("invariants on random compressions of unitaries") {
    Rng rng(41);
    for (int trial = 0; trial < 25; ++trial) {
      const int n = 3 + static_cast<int>(rng() % 6);
      const int k = 1 + static_cast<int>(rng() % (n - 1));
      const CMatrix u = testing::haar_unitary(rng, n);
      const CMatrix u_x = u.topLeftCorner(k, k);
      const SpectralSplit s = spectral_split(u_x);
      // Pi1 is an orthogonal projector commuting with U_X.
      CHECK(operator_norm((s.pi1 * s.pi1 - s.pi1).eval()) < 1e-9);
      CHECK(operator_norm((s.pi1 - s.pi1.adjoint()).eval()) < 1e-9);
      CHECK(operator_norm((u_x * s.pi1 - s.pi1 * u_x).eval()) < 1e-8);
      CHECK(s.stable_radius < 1.0 + 1e-9);
      for (const EigenPair& p : s.unit_eigenpairs) {
        CHECK(std::abs(std::abs(p.value) - 1.0) < 1e-8);
        CHECK((u_x * p.vector - p.value * p.vector).norm() < 1e-8);
      }
    }
  }

  SUBCASE("unit eigenvectors lift to eigenvectors of U") {
    // Block-diagonal U: first block unitary on the guard subspace.
    Rng rng(42);
    const CMatrix block = testing::haar_unitary(rng, 2);
    CMatrix u = CMatrix::Zero(4, 4);
    u.topLeftCorner(2, 2) = block;
    u.bottomRightCorner(2, 2) = testing::haar_unitary(rng, 2);
    const CMatrix u_x = u.topLeftCorner(3, 3);  // guard rank 3
    const SpectralSplit s = spectral_split(u_x);
    REQUIRE(s.unit_count() == 2);
    for (const EigenPair& p : s.unit_eigenpairs) {
      CVector lifted = CVector::Zero(4);
      lifted.head(3) = p.vector;
      CHECK((u * lifted - p.value * lifted).norm() < 1e-9);
    }
  }
}

TEST_CASE("classify_loop on the one-qubit catalog") {
  CHECK(classify_loop(testing::qubit_loop(gates::pauli_x())).kind ==
        LoopClass::kTerminating);
  CHECK(classify_loop(testing::qubit_loop(gates::pauli_y())).kind ==
        LoopClass::kTerminating);
  CHECK(classify_loop(testing::qubit_loop(gates::hadamard())).kind ==
        LoopClass::kAlmostTerminating);
  CHECK(classify_loop(testing::qubit_loop(gates::identity(2))).kind ==
        LoopClass::kNotAlmostTerminating);
  CHECK(classify_loop(testing::qubit_loop(gates::pauli_z())).kind ==
        LoopClass::kNotAlmostTerminating);
  CHECK(classify_loop(testing::qubit_loop(gates::phase_s())).kind ==
        LoopClass::kNotAlmostTerminating);
  CHECK(classify_loop(testing::qubit_loop(gates::t_gate())).kind ==
        LoopClass::kNotAlmostTerminating);

  // Almost terminating loops are certified uniformly almost terminating.
  CHECK(classify_loop(testing::qubit_loop(gates::hadamard())).uniform);
}

TEST_CASE("trivial guards") {
  QuantumLoop loop = testing::qubit_loop(gates::hadamard());
  loop.guard = {};
  CHECK(classify_loop(loop).kind == LoopClass::kTerminating);
  CHECK(p_nt(loop, StateInput::pure(ket(2, 0))) == 0.0);
  CHECK(terminates_on(loop, StateInput::pure(ket(2, 0))));

  loop.guard = {"0", "1"};
  CHECK(classify_loop(loop).kind == LoopClass::kNotAlmostTerminating);
  CHECK(p_nt(loop, StateInput::pure(ket(2, 0))) == 1.0);
  CHECK_FALSE(almost_terminates_on(loop, StateInput::pure(ket(2, 0))));
}

TEST_CASE("terminates_on") {
  SUBCASE("CNOT with X = {10} terminates on every input") {
    const QuantumLoop loop = testing::gate_loop(gates::cnot(), {2, 2}, {"10"});
    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
      CHECK(terminates_on(loop,
                          StateInput::pure(testing::random_pure(rng, 4))));
      CHECK(terminates_on(loop,
                          StateInput::mixed(testing::random_density(rng, 4))));
    }
  }

  SUBCASE("identity loop terminates exactly on inputs outside H_X") {
    const QuantumLoop loop = testing::qubit_loop(gates::identity(2));
    CHECK(terminates_on(loop, StateInput::pure(ket(2, 1))));
    CHECK_FALSE(terminates_on(loop, StateInput::pure(ket(2, 0))));
  }

  SUBCASE("Z loop does not terminate on |+>") {
    const QuantumLoop loop = testing::qubit_loop(gates::pauli_z());
    CHECK_FALSE(terminates_on(loop, StateInput::pure(plus_state())));
  }
}

TEST_CASE("almost_terminates_on and p_nt") {
  const QuantumLoop h_loop = testing::qubit_loop(gates::hadamard());
  const QuantumLoop z_loop = testing::qubit_loop(gates::pauli_z());
  const QuantumLoop i_loop = testing::qubit_loop(gates::identity(2));

  Rng rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const CVector psi = testing::random_pure(rng, 2);
    CHECK(almost_terminates_on(h_loop, StateInput::pure(psi)));
    CHECK(p_nt(h_loop, StateInput::pure(psi)) == 0.0);
    // For the nonterminating gates p_NT is the |0> population.
    const double expected = std::norm(psi(0));
    CHECK(std::abs(p_nt(i_loop, StateInput::pure(psi)) - expected) < 1e-12);
    CHECK(std::abs(p_nt(z_loop, StateInput::pure(psi)) - expected) < 1e-12);
  }

  CHECK(almost_terminates_on(z_loop, StateInput::pure(ket(2, 1))));
  CHECK_FALSE(almost_terminates_on(z_loop, StateInput::pure(plus_state())));

  SUBCASE("CNOT with X = {00}: p_NT = |a00|^2") {
    const QuantumLoop loop = testing::gate_loop(gates::cnot(), {2, 2}, {"00"});
    for (int trial = 0; trial < 5; ++trial) {
      const CVector psi = testing::random_pure(rng, 4);
      CHECK(std::abs(p_nt(loop, StateInput::pure(psi)) - std::norm(psi(0))) <
            1e-12);
    }
  }
}

TEST_CASE("input_verdict") {
  const QuantumLoop x_loop = testing::qubit_loop(gates::pauli_x());
  const InputVerdict v = input_verdict(x_loop, StateInput::pure(ket(2, 0)));
  CHECK(v.kind == InputClass::kTerminates);
  CHECK(v.at_step == 2);  // run_trace detects extinction at step 2
  CHECK(v.p_nt == 0.0);

  const QuantumLoop z_loop = testing::qubit_loop(gates::pauli_z());
  const InputVerdict nt = input_verdict(z_loop, StateInput::pure(plus_state()));
  CHECK(nt.kind == InputClass::kNonTerminating);
  CHECK(nt.p_nt == doctest::Approx(0.5));
}

TEST_CASE("verdict properties on random loops") {
  Rng rng(1234);
  int seen_terminating = 0, seen_almost = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const QuantumLoop loop = testing::random_loop(rng, {.max_dim = 6});
    const LoopVerdict verdict = classify_loop(loop);
    const GuardProjectors g = guard_projectors(loop);

    if (verdict.kind == LoopClass::kTerminating) {
      ++seen_terminating;
      for (int i = 0; i < 8; ++i) {
        const StateInput input =
            StateInput::pure(testing::random_pure(rng, loop.dim()));
        CHECK(terminates_on(loop, input));
        if (g.k > 0) {
          const LoopTrace t = run_trace(loop, input, g.k + 1);
          CHECK(t.termination_detected);
        }
      }
    } else if (verdict.kind == LoopClass::kAlmostTerminating) {
      ++seen_almost;
      // Uniformity: one bound works for a whole batch.
      int common_bound = 0;
      std::vector<StateInput> batch;
      for (int i = 0; i < 8; ++i) {
        batch.push_back(StateInput::pure(testing::random_pure(rng, loop.dim())));
      }
      for (const StateInput& input : batch) {
        const LoopTrace t = run_trace(loop, input, 4000);
        bool fell = false;
        for (const LoopTraceStep& s : t.steps) {
          if (s.p_nt_cumulative < 1e-6) {
            common_bound = std::max(common_bound, s.n);
            fell = true;
            break;
          }
        }
        CHECK(fell);
      }
      for (const StateInput& input : batch) {
        const std::vector<double> p = run_trace_pure(
            loop, input.psi, common_bound + 1);
        CHECK(p[common_bound] < 1e-5);
      }
    }
  }
  // The generator should exercise both interesting classes.
  CHECK(seen_terminating > 0);
  CHECK(seen_almost > 0);
}

TEST_CASE("p_nt agrees with long simulations for contractive loops") {
  Rng rng(4321);
  int used = 0;
  for (int trial = 0; trial < 40 && used < 15; ++trial) {
    const QuantumLoop loop =
        testing::random_loop(rng, {.max_dim = 6, .proper_guard_only = true});
    const GuardProjectors g = guard_projectors(loop);
    const SpectralSplit split = spectral_split(g.compress(loop.unitary));
    if (split.stable_radius > 0.9) continue;
    ++used;
    const StateInput input =
        StateInput::mixed(testing::random_density(rng, loop.dim()));
    const LoopTrace t = run_trace(loop, input, 200);
    const double tail = t.steps.size() >= 200
                            ? t.steps.back().p_nt_formula
                            : t.steps.back().p_nt_cumulative;
    CHECK(std::abs(p_nt(loop, input) - tail) < 1e-6);
  }
  CHECK(used > 0);
}

TEST_CASE("termination respects mixtures") {
  Rng rng(999);
  for (int trial = 0; trial < 15; ++trial) {
    const QuantumLoop loop = testing::random_loop(rng, {.max_dim = 6});
    std::vector<CVector> parts;
    const int m = 2 + static_cast<int>(rng() % 3);
    CMatrix rho = CMatrix::Zero(loop.dim(), loop.dim());
    for (int i = 0; i < m; ++i) {
      parts.push_back(testing::random_pure(rng, loop.dim()));
      rho += parts.back() * parts.back().adjoint() / double(m);
    }
    bool all_terminate = true, all_almost = true;
    for (const CVector& psi : parts) {
      all_terminate =
          all_terminate && terminates_on(loop, StateInput::pure(psi));
      all_almost =
          all_almost && almost_terminates_on(loop, StateInput::pure(psi));
    }
    CHECK(terminates_on(loop, StateInput::mixed(rho)) == all_terminate);
    CHECK(almost_terminates_on(loop, StateInput::mixed(rho)) == all_almost);
  }
}

TEST_CASE("jordan block powers") {
  SUBCASE("nilpotent square") {
    const CMatrix j2 = jordan_block_power(Complex(0, 0), 2, 2);
    CHECK(operator_norm(j2) == doctest::Approx(0.0));
  }

  SUBCASE("superdiagonal pattern N lambda^(N-1)") {
    for (int n = 1; n <= 20; ++n) {
      const Complex lambda(0.3, 0.4);
      const CMatrix p = jordan_block_power(lambda, 2, n);
      const Complex expected =
          static_cast<double>(n) * std::pow(lambda, n - 1);
      CHECK(std::abs(p(0, 1) - expected) < 1e-12);
    }
  }

  SUBCASE("closed form vs repeated multiplication") {
    Rng rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
      const int r = 1 + static_cast<int>(rng() % 5);
      const int n = static_cast<int>(rng() % 21);
      const Complex lambda(u(rng), u(rng));
      const CMatrix direct = matrix_power(jordan_block(lambda, r), n);
      const CMatrix closed = jordan_block_power(lambda, r, n);
      CHECK((direct - closed).cwiseAbs().maxCoeff() < 1e-10);

      const CVector v = testing::random_pure(rng, r);
      CHECK((jordan_block_apply(lambda, r, n, v) - direct * v).norm() < 1e-10);
    }
  }

  SUBCASE("argument guards") {
    CHECK_THROWS_AS(jordan_block_power(Complex(1, 0), 0, 1), Error);
    CHECK_THROWS_AS(jordan_block_power(Complex(1, 0), 2, -1), Error);
    CHECK_THROWS_AS(jordan_block_power(Complex(1, 0), 2, 65), Error);
  }
}

TEST_CASE("similarity-invariant termination on synthetic Jordan loops") {
  // For U_X = S J S^-1 the loop terminates on |psi> iff every Jordan
  // component of S^-1 psi_X with lambda != 0 vanishes.
  Rng rng(31337);
  for (int trial = 0; trial < 20; ++trial) {
    const JordanSpec spec = testing::random_jordan_spec(
        rng, static_cast<int>(rng() % 2), 2 + static_cast<int>(rng() % 3));
    const SyntheticJordanLoop synth = build_synthetic_loop(spec);
    const GuardProjectors g = guard_projectors(synth.loop);
    const int k = spec.dim();

    for (int input_trial = 0; input_trial < 6; ++input_trial) {
      // Draw a random Jordan-coordinate vector, sometimes supported only on
      // the nilpotent blocks.
      CVector v = CVector::Zero(k);
      const bool nilpotent_only = input_trial % 2 == 0;
      int offset = 0;
      for (const JordanSpec::Block& b : spec.blocks) {
        const bool zero_block = std::abs(b.lambda) < 1e-12;
        if (!nilpotent_only || zero_block) {
          for (int j = 0; j < b.size; ++j) {
            v(offset + j) = Complex(1.0 + double(j), -0.5);
          }
        }
        offset += b.size;
      }
      if (v.norm() == 0.0) continue;

      // Expected verdict straight from Thm-style Jordan data.
      bool expected = true;
      offset = 0;
      for (const JordanSpec::Block& b : spec.blocks) {
        const bool zero_block = std::abs(b.lambda) < 1e-12;
        const double mass = v.segment(offset, b.size).norm();
        if (!zero_block && mass > 1e-12) expected = false;
        offset += b.size;
      }

      CVector psi = CVector::Zero(2 * k);
      psi.head(k) = spec.s * v;
      psi.normalize();
      CHECK(terminates_on(synth.loop, StateInput::pure(psi)) == expected);
    }
  }
}
