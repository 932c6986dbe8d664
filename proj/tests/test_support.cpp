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

#include "test_support.hpp"

#include <algorithm>
#include <cmath>

namespace qloop::testing {

CMatrix random_ginibre(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(normal(rng), normal(rng));
  }
  return m;
}

CMatrix haar_unitary(Rng& rng, int n) {
  const CMatrix g = random_ginibre(rng, n, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase ambiguity so the distribution is Haar.
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    q.col(j) *= std::abs(d) > 0 ? d / std::abs(d) : Complex(1, 0);
  }
  return q;
}

CMatrix random_density(Rng& rng, int n, int rank) {
  if (rank <= 0 || rank > n) rank = n;
  const CMatrix g = random_ginibre(rng, n, rank);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace();
  return rho;
}

CVector random_pure(Rng& rng, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(normal(rng), normal(rng));
  v.normalize();
  return v;
}

QuantumLoop gate_loop(const CMatrix& u, const std::vector<int>& dims,
                      const std::set<std::string>& guard) {
  QuantumLoop loop;
  loop.subsystem_dims = dims;
  loop.unitary = u;
  loop.measurement = ProjectiveMeasurement::computational(dims);
  loop.guard = guard;
  return loop;
}

QuantumLoop qubit_loop(const CMatrix& u) { return gate_loop(u, {2}, {"0"}); }

QuantumLoop rotate_loop(const QuantumLoop& loop, const CMatrix& w) {
  QuantumLoop rotated = loop;
  rotated.unitary = w * loop.unitary * w.adjoint();
  for (Outcome& o : rotated.measurement.outcomes) {
    o.projector = w * o.projector * w.adjoint();
  }
  return rotated;
}

QuantumLoop random_loop(Rng& rng, const RandomLoopOptions& opts) {
  static const std::vector<std::vector<int>> kDims = {
      {2}, {3}, {4}, {5}, {6}, {7}, {8}, {2, 2}, {2, 3}, {2, 4}, {2, 2, 2}};
  std::vector<std::vector<int>> dims_pool;
  for (const auto& d : kDims) {
    int k = 1;
    for (int x : d) k *= x;
    if (k <= opts.max_dim) dims_pool.push_back(d);
  }
  const std::vector<int> dims = dims_pool[rng() % dims_pool.size()];
  int k = 1;
  for (int x : dims) k *= x;

  QuantumLoop loop;
  loop.subsystem_dims = dims;

  if (!opts.haar_body_only && rng() % 4 == 0) {
    // Occasionally a structured body: permutation-with-phases.
    std::vector<int> perm(k);
    for (int i = 0; i < k; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
    CMatrix u = CMatrix::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      u(perm[i], i) = std::exp(Complex(0, angle(rng)));
    }
    loop.unitary = u;
  } else {
    loop.unitary = haar_unitary(rng, k);
  }

  const int style = opts.computational_only ? 0 : static_cast<int>(rng() % 3);
  if (style == 2 && dims.size() > 1) {
    loop.measurement = ProjectiveMeasurement::computational_on(
        dims, static_cast<int>(rng() % dims.size()));
  } else if (style == 1) {
    // Observable with a possibly degenerate integer spectrum.
    const CMatrix v = haar_unitary(rng, k);
    CMatrix diag = CMatrix::Zero(k, k);
    const int levels = 2 + static_cast<int>(rng() % std::max(1, k - 1));
    for (int i = 0; i < k; ++i) {
      diag(i, i) = static_cast<double>(rng() % levels);
    }
    loop.measurement =
        ProjectiveMeasurement::from_observable((v * diag * v.adjoint()).eval());
  } else {
    loop.measurement = ProjectiveMeasurement::computational(dims);
  }

  if (opts.proper_guard_only && loop.measurement.outcomes.size() < 2) {
    // A degenerate observable can collapse to one outcome; fall back to the
    // computational measurement so a proper guard exists.
    loop.measurement = ProjectiveMeasurement::computational(dims);
  }
  const std::vector<std::string> labels = loop.measurement.labels();
  const size_t n_outcomes = labels.size();
  while (true) {
    loop.guard.clear();
    for (const std::string& l : labels) {
      if (rng() % 2 == 0) loop.guard.insert(l);
    }
    if (!opts.proper_guard_only) break;
    if (!loop.guard.empty() && loop.guard.size() < n_outcomes) break;
  }
  return loop;
}

QuantumLoop trapped_loop(Rng& rng, int max_dim, int trapped,
                         bool degenerate_pair) {
  for (int tries = 0; tries < 100; ++tries) {
    QuantumLoop loop = random_loop(
        rng, {.max_dim = max_dim, .haar_body_only = true,
              .proper_guard_only = true});
    const GuardProjectors g = guard_projectors(loop);
    const int dim = loop.dim();
    const int k = g.k;
    const int planted = std::min(trapped, k);
    if (degenerate_pair && (planted < 2 || dim - k < 2)) continue;

    // Orthonormal eigenbasis: `planted` vectors inside H_X, the rest a Haar
    // rotation of the orthogonal complement (generically nothing of it lies
    // in H_X).
    const CMatrix inside =
        g.basis.leftCols(k) * haar_unitary(rng, k).leftCols(planted);
    Eigen::HouseholderQR<CMatrix> qr(inside);
    const CMatrix full = qr.householderQ() * CMatrix::Identity(dim, dim);
    CMatrix frame(dim, dim);
    frame.leftCols(planted) = inside;
    frame.rightCols(dim - planted) =
        full.rightCols(dim - planted) * haar_unitary(rng, dim - planted);

    std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
    CMatrix u = CMatrix::Zero(dim, dim);
    std::vector<double> phases(dim);
    for (int j = 0; j < dim; ++j) phases[j] = angle(rng);
    if (degenerate_pair) phases[1] = phases[0];
    for (int j = 0; j < dim; ++j) {
      u += std::exp(Complex(0, phases[j])) * (frame.col(j) * frame.col(j).adjoint());
    }
    loop.unitary = u;
    if (!has_errors(validate_loop(loop))) return loop;
  }
  throw Error("trapped_loop: could not build a loop");
}

//=========================================================================
// Oracles
//=========================================================================

std::vector<Complex> charpoly_roots(const CMatrix& a) {
  const int n = static_cast<int>(a.rows());
  // Faddeev-LeVerrier: p(x) = x^n + c[n-1] x^(n-1) + ... + c[0].
  std::vector<Complex> c(n + 1);
  c[n] = Complex(1, 0);
  CMatrix m = CMatrix::Zero(n, n);
  for (int step = 1; step <= n; ++step) {
    m = (a * (m + c[n - step + 1] * CMatrix::Identity(n, n))).eval();
    c[n - step] = -m.trace() / static_cast<double>(step);
  }

  // Durand-Kerner from a non-real seed spiral.
  std::vector<Complex> roots(n);
  const Complex seed(0.4, 0.9);
  Complex acc(1, 0);
  for (int i = 0; i < n; ++i) {
    acc *= seed;
    roots[i] = acc;
  }
  auto eval = [&](const Complex& x) {
    Complex value = c[n];
    for (int i = n - 1; i >= 0; --i) value = value * x + c[i];
    return value;
  };
  for (int iter = 0; iter < 500; ++iter) {
    double moved = 0.0;
    for (int i = 0; i < n; ++i) {
      Complex denom(1, 0);
      for (int j = 0; j < n; ++j) {
        if (j != i) denom *= roots[i] - roots[j];
      }
      const Complex delta = eval(roots[i]) / denom;
      roots[i] -= delta;
      moved = std::max(moved, std::abs(delta));
    }
    if (moved < 1e-14) break;
  }
  return roots;
}

double spectrum_distance(std::vector<Complex> a, std::vector<Complex> b) {
  double worst = 0.0;
  for (const Complex& x : a) {
    double best = 1e300;
    size_t best_j = 0;
    for (size_t j = 0; j < b.size(); ++j) {
      const double d = std::abs(x - b[j]);
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    worst = std::max(worst, best);
    if (!b.empty()) b.erase(b.begin() + best_j);
  }
  return worst;
}

CMatrix brute_force_series(const CMatrix& u, const CMatrix& rho, int terms) {
  CMatrix sum = CMatrix::Zero(rho.rows(), rho.cols());
  CMatrix term = rho;
  for (int n = 0; n < terms; ++n) {
    sum += term;
    term = (u * term * u.adjoint()).eval();
  }
  return sum;
}

JordanSpec random_jordan_spec(Rng& rng, int unit_blocks, int stable_dim) {
  std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
  // Nonzero stable eigenvalues are kept away from 0 so the thresholded
  // termination test can tell them apart from exact nilpotency.
  std::uniform_real_distribution<double> radius(0.3, 0.75);
  std::uniform_real_distribution<double> small(-0.12, 0.12);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int tries = 0; tries < 500; ++tries) {
    JordanSpec spec;
    for (int i = 0; i < unit_blocks; ++i) {
      spec.blocks.push_back({std::exp(Complex(0, angle(rng))), 1});
    }
    int left = stable_dim;
    while (left > 0) {
      int size = 1 + static_cast<int>(rng() % std::min(left, 3));
      Complex lambda;
      switch (rng() % 3) {
        case 0:
          lambda = Complex(0, 0);
          break;
        case 1:
          lambda = std::polar(radius(rng), angle(rng));
          break;
        default: {
          // Point on the circle Re l = |l|^2, where branch amplitudes of an
          // eigendirection input interfere away exactly. Kept at size 1 and
          // 0.2 <= |l| = |cos(phi/2)| <= 0.8.
          double phi = 1.3 + unif(rng) * (2.74 - 1.3);
          if (rng() % 2) phi = 2 * M_PI - phi;
          lambda = (Complex(1, 0) + std::exp(Complex(0, phi))) / 2.0;
          size = 1;
          break;
        }
      }
      spec.blocks.push_back({lambda, size});
      left -= size;
    }

    const int k = spec.dim();
    const int t = unit_blocks;
    // S = Q (I_t + mild stable distortion) D, with D shrinking each stable
    // block's superdiagonal so the whole thing stays a contraction. Unit
    // directions stay orthogonal to the stable ones.
    CMatrix s_inner = CMatrix::Identity(k, k);
    for (int i = t; i < k; ++i) {
      for (int j = t; j < k; ++j) {
        if (i != j) s_inner(i, j) += Complex(small(rng), small(rng));
      }
    }
    // D J D^-1 multiplies the superdiagonal of each block by d_i / d_{i+1},
    // so growing diagonals shrink the off-diagonal coupling.
    CMatrix d = CMatrix::Identity(k, k);
    int offset = 0;
    for (const JordanSpec::Block& b : spec.blocks) {
      if (std::abs(b.lambda) < 1.0 - 1e-8) {
        double scale = 1.0;
        for (int j = 0; j < b.size; ++j) {
          d(offset + j, offset + j) = scale;
          scale /= 0.15;
        }
      }
      offset += b.size;
    }
    spec.s = haar_unitary(rng, k) * s_inner * d;

    try {
      const CMatrix u_x = spec.u_x();
      // Unit directions contribute singular value 1; the stable block must
      // stay safely inside the ball so the split is unambiguous.
      Eigen::JacobiSVD<CMatrix> svd(u_x);
      bool ok = true;
      for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        const double limit = i < t ? 1.0 + 1e-12 : 0.999;
        ok = ok && svd.singularValues()(i) <= limit;
      }
      if (ok) return spec;
    } catch (const Error&) {
    }
  }
  throw Error("random_jordan_spec: could not draw a contraction");
}

}  // namespace qloop::testing
