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

#include "qloop/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qloop {

namespace {

constexpr int kMaxAttempts = 32;

struct Cluster {
  Complex value;
  std::vector<int> members;
};

// Groups indices whose values agree within the spectrum tolerance. The input
// order is preserved inside a cluster.
std::vector<Cluster> cluster_values(const std::vector<Complex>& values) {
  std::vector<Cluster> clusters;
  std::vector<bool> used(values.size(), false);
  const double tol = tolerances().spectrum;
  for (size_t i = 0; i < values.size(); ++i) {
    if (used[i]) continue;
    Cluster c;
    c.value = values[i];
    for (size_t j = i; j < values.size(); ++j) {
      if (!used[j] && std::abs(values[j] - values[i]) <= tol) {
        used[j] = true;
        c.members.push_back(static_cast<int>(j));
      }
    }
    clusters.push_back(std::move(c));
  }
  return clusters;
}

// Smallest singular value of P_Xbar restricted to the span of the given
// columns, together with the combination achieving it. Near-zero means the
// span intersects H_X.
struct IntersectionWitness {
  double sigma_min = 1.0;
  CVector combo;  // coefficients over the supplied columns
};

IntersectionWitness intersection_witness(const CMatrix& p_xbar,
                                         const CMatrix& columns) {
  IntersectionWitness w;
  if (columns.cols() == 0) return w;
  Eigen::JacobiSVD<CMatrix> svd(p_xbar * columns, Eigen::ComputeFullV);
  const Eigen::Index last = columns.cols() - 1;
  w.sigma_min = last < svd.singularValues().size()
                    ? svd.singularValues()(last)
                    : 0.0;
  w.combo = svd.matrixV().col(last);
  return w;
}

// Counts intersection dimensions of each eigenvalue cluster with H_X.
int total_intersection(const CMatrix& p_xbar,
                       const std::vector<Cluster>& clusters,
                       const std::vector<CVector>& vectors) {
  int total = 0;
  for (const Cluster& c : clusters) {
    CMatrix cols(p_xbar.rows(), c.members.size());
    for (size_t j = 0; j < c.members.size(); ++j) {
      cols.col(j) = vectors[c.members[j]];
    }
    Eigen::JacobiSVD<CMatrix> svd(p_xbar * cols);
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()(i) < tolerances().inside) ++total;
    }
  }
  return total;
}

bool loop_is_fixed(const LoopVerdict& v) {
  return v.kind == LoopClass::kTerminating ||
         v.kind == LoopClass::kAlmostTerminating;
}

}  // namespace

//=========================================================================
// perturb_unitary
//=========================================================================

PerturbationResult perturb_unitary(const QuantumLoop& loop, double eps,
                                   std::uint64_t rng_seed) {
  if (eps <= 0) throw Error("perturb_unitary: eps must be positive");
  if (loop.guard_is_full()) {
    throw UnsupportedGuardError(
        "perturb_unitary: X = spec(M) loops forever under every body");
  }

  PerturbationResult result;
  result.target = PerturbationResult::Target::kUnitary;
  result.verified_verdict = classify_loop(loop);
  if (loop_is_fixed(result.verified_verdict)) {
    result.perturbed_unitary = loop.unitary;
    result.distance = 0.0;
    return result;
  }

  const int dim = loop.dim();
  const GuardProjectors g = guard_projectors(loop);
  const EigenData eig = eig_normal(loop.unitary);
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> jitter(0.5, 1.0);

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const double scale = std::ldexp(1.0, -attempt);
    const double budget = eps * scale / (2.0 * dim + 2.0);

    std::vector<Complex> values;
    std::vector<CVector> vectors;
    for (const EigenPair& p : eig.pairs) {
      values.push_back(p.value);
      vectors.push_back(p.vector);
    }
    std::vector<double> deltas;
    int steps = 0;
    bool stuck = false;

    for (int round = 0; round < 2 * dim + 2; ++round) {
      // A unit eigenvalue of U'_X needs an eigenvector of U' inside H_X, so
      // scan each eigenspace for an intersection with H_X.
      std::vector<Cluster> clusters = cluster_values(values);
      int i0 = -1;
      for (const Cluster& c : clusters) {
        CMatrix cols(dim, c.members.size());
        for (size_t j = 0; j < c.members.size(); ++j) {
          cols.col(j) = vectors[c.members[j]];
        }
        const IntersectionWitness w = intersection_witness(g.p_xbar, cols);
        if (w.sigma_min < tolerances().inside) {
          // Rotate the cluster basis so the witness is an explicit member.
          Eigen::HouseholderQR<CMatrix> qr(w.combo);
          CMatrix rot = qr.householderQ() * CMatrix::Identity(
                                                w.combo.size(), w.combo.size());
          // Column 0 of rot spans the witness direction.
          const CMatrix rotated = cols * rot;
          for (size_t j = 0; j < c.members.size(); ++j) {
            vectors[c.members[j]] = rotated.col(j);
          }
          i0 = c.members[0];
          break;
        }
      }
      if (i0 < 0) break;  // no eigenvector left inside H_X

      // Partner: the eigenvector farthest from H_X, preferring a distinct
      // eigenvalue (mixing inside one eigenspace would not change U').
      int j0 = -1, j0_any = -1;
      double best = -1.0, best_any = -1.0;
      for (size_t j = 0; j < vectors.size(); ++j) {
        if (static_cast<int>(j) == i0) continue;
        const double outside = (g.p_xbar * vectors[j]).norm();
        if (outside < tolerances().inside) continue;
        if (outside > best_any) {
          best_any = outside;
          j0_any = static_cast<int>(j);
        }
        if (std::abs(values[j] - values[i0]) > tolerances().spectrum &&
            outside > best) {
          best = outside;
          j0 = static_cast<int>(j);
        }
      }
      if (j0 < 0 && j0_any < 0) {
        stuck = true;  // everything lies in H_X; cannot happen for X != spec(M)
        break;
      }
      if (j0 < 0) {
        // Degenerate case (the identity body is the extreme example): all
        // partners share the witness eigenvalue, so rotating eigenvectors
        // alone is a no-op. Split the partner eigenvalue by a small phase
        // first; the loop guard never constrains spec(U).
        j0 = j0_any;
        const double eta = std::min(budget / 2.0, 0.1) * jitter(rng);
        values[j0] *= std::exp(Complex(0, eta));
        ++steps;
        deltas.push_back(eta);
      }

      // Rotate the witness against the partner, halving delta until the
      // round fits its share of the norm budget.
      const CVector vi = vectors[i0];
      const CVector vj = vectors[j0];
      double delta = 0.49 * jitter(rng);
      for (int halving = 0; halving < 60; ++halving) {
        const double root_keep = std::sqrt(1.0 - delta);
        const double root_mix = std::sqrt(delta);
        const CVector wi = root_keep * vi + root_mix * vj;
        const CVector wj = root_keep * vj - root_mix * vi;
        const CMatrix change = values[i0] * (wi * wi.adjoint() -
                                             vi * vi.adjoint()) +
                               values[j0] * (wj * wj.adjoint() -
                                             vj * vj.adjoint());
        if (operator_norm(change) <= budget) {
          vectors[i0] = wi;
          vectors[j0] = wj;
          break;
        }
        delta /= 2.0;
      }
      deltas.push_back(delta);
      ++steps;
    }
    if (stuck) continue;

    CMatrix perturbed = CMatrix::Zero(dim, dim);
    for (size_t i = 0; i < vectors.size(); ++i) {
      perturbed += values[i] * (vectors[i] * vectors[i].adjoint());
    }

    QuantumLoop candidate = loop;
    candidate.unitary = perturbed;
    const LoopVerdict verdict = classify_loop(candidate);
    const double distance =
        operator_norm((loop.unitary - perturbed).eval());
    if (loop_is_fixed(verdict) && distance < eps) {
      result.perturbed_unitary = perturbed;
      result.distance = distance;
      result.verified_verdict = verdict;
      result.steps_taken = steps;
      result.deltas_used = deltas;
      return result;
    }
  }
  throw NumericalError(
      "perturb_unitary: no verified perturbation within the attempt budget");
}

//=========================================================================
// perturb_measurement
//=========================================================================

PerturbationResult perturb_measurement(const QuantumLoop& loop, double eps,
                                       std::uint64_t rng_seed) {
  if (eps <= 0) throw Error("perturb_measurement: eps must be positive");
  if (loop.guard_is_full()) {
    throw UnsupportedGuardError(
        "perturb_measurement: X = spec(M) loops forever under every guard "
        "basis");
  }

  PerturbationResult result;
  result.target = PerturbationResult::Target::kMeasurement;
  result.verified_verdict = classify_loop(loop);
  if (loop_is_fixed(result.verified_verdict)) {
    result.perturbed_measurement = loop.measurement;
    result.distance = 0.0;
    return result;
  }

  const int dim = loop.dim();
  const GuardProjectors g0 = guard_projectors(loop);
  const int k = g0.k;
  const EigenData eig = eig_normal(loop.unitary);

  std::vector<Complex> values;
  std::vector<CVector> vectors;
  for (const EigenPair& p : eig.pairs) {
    values.push_back(p.value);
    vectors.push_back(p.vector);
  }
  const std::vector<Cluster> clusters = cluster_values(values);
  for (const Cluster& c : clusters) {
    if (static_cast<int>(c.members.size()) > dim - k) {
      throw ApplicabilityError(
          "perturb_measurement: an eigenspace of U has dimension " +
          std::to_string(c.members.size()) + " > K - k = " +
          std::to_string(dim - k) +
          "; every spectrum-preserving guard of rank k still contains one of "
          "its eigenvectors, so no such M' exists");
    }
  }

  const CMatrix observable = loop.measurement.observable();
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unif(0.25, 1.0);

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const double scale = std::ldexp(1.0, -attempt);
    const double budget = eps * scale / (dim + 1.0);

    CMatrix basis = g0.basis;
    std::vector<double> deltas;
    int steps = 0;
    bool failed = false;

    auto p_xbar_of = [&](const CMatrix& b) {
      const auto bx = b.leftCols(k);
      return (CMatrix::Identity(dim, dim) - bx * bx.adjoint()).eval();
    };

    int intersections =
        total_intersection(p_xbar_of(basis), clusters, vectors);

    for (int round = 0; round < 2 * dim + 2 && intersections > 0; ++round) {
      const CMatrix p_xbar = p_xbar_of(basis);
      // Locate one trapped eigenvector.
      CVector witness;
      for (const Cluster& c : clusters) {
        CMatrix cols(dim, c.members.size());
        for (size_t j = 0; j < c.members.size(); ++j) {
          cols.col(j) = vectors[c.members[j]];
        }
        const IntersectionWitness w = intersection_witness(p_xbar, cols);
        if (w.sigma_min < tolerances().inside) {
          witness = cols * w.combo;
          break;
        }
      }
      if (witness.size() == 0) break;

      // Guard basis vector with the largest overlap against the witness.
      int i0 = 0;
      double best = -1.0;
      for (int i = 0; i < k; ++i) {
        const double overlap = std::abs(basis.col(i).dot(witness));
        if (overlap > best) {
          best = overlap;
          i0 = i;
        }
      }

      // The finitely many bad deltas are rejected by re-verifying progress.
      bool progressed = false;
      for (int trial = 0; trial < kMaxAttempts && !progressed; ++trial) {
        const int i1 = k + static_cast<int>(rng() % (dim - k));
        double delta = unif(rng);
        for (int halving = 0; halving < 60; ++halving) {
          const double root_keep = std::sqrt(1.0 - delta);
          const double root_mix = std::sqrt(delta);
          CMatrix candidate = basis;
          candidate.col(i0) =
              root_keep * basis.col(i0) + root_mix * basis.col(i1);
          candidate.col(i1) =
              root_keep * basis.col(i1) - root_mix * basis.col(i0);
          CMatrix m_candidate = CMatrix::Zero(dim, dim);
          for (int c = 0; c < dim; ++c) {
            const double value =
                loop.measurement.outcomes[g0.basis_outcome[c]].value;
            m_candidate += value * (candidate.col(c) * candidate.col(c).adjoint());
          }
          // Track the round's move against the previous basis, not the
          // original, so the budget telescopes.
          CMatrix m_previous = CMatrix::Zero(dim, dim);
          for (int c = 0; c < dim; ++c) {
            const double value =
                loop.measurement.outcomes[g0.basis_outcome[c]].value;
            m_previous += value * (basis.col(c) * basis.col(c).adjoint());
          }
          if (operator_norm((m_candidate - m_previous).eval()) > budget) {
            delta /= 2.0;
            continue;
          }
          const int after =
              total_intersection(p_xbar_of(candidate), clusters, vectors);
          if (after < intersections) {
            basis = candidate;
            intersections = after;
            deltas.push_back(delta);
            ++steps;
            progressed = true;
          }
          break;
        }
      }
      if (!progressed) {
        failed = true;
        break;
      }
    }
    if (failed || intersections > 0) continue;

    // Reassemble the projector family with the original labels and values.
    ProjectiveMeasurement perturbed;
    perturbed.dim = dim;
    for (size_t oi = 0; oi < loop.measurement.outcomes.size(); ++oi) {
      Outcome o;
      o.label = loop.measurement.outcomes[oi].label;
      o.value = loop.measurement.outcomes[oi].value;
      o.projector = CMatrix::Zero(dim, dim);
      for (int c = 0; c < dim; ++c) {
        if (g0.basis_outcome[c] == static_cast<int>(oi)) {
          o.projector += basis.col(c) * basis.col(c).adjoint();
        }
      }
      perturbed.outcomes.push_back(std::move(o));
    }

    QuantumLoop candidate = loop;
    candidate.measurement = perturbed;
    const LoopVerdict verdict = classify_loop(candidate);
    const double distance =
        operator_norm((observable - perturbed.observable()).eval());
    if (loop_is_fixed(verdict) && distance < eps &&
        !has_errors(validate_measurement(perturbed))) {
      result.perturbed_measurement = perturbed;
      result.distance = distance;
      result.verified_verdict = verdict;
      result.steps_taken = steps;
      result.deltas_used = deltas;
      return result;
    }
  }
  throw NumericalError(
      "perturb_measurement: no verified perturbation within the attempt "
      "budget");
}

}  // namespace qloop
