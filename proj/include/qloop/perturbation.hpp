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

#ifndef QLOOP_PERTURBATION_HPP_
#define QLOOP_PERTURBATION_HPP_

#include <cstdint>
#include <vector>

#include "qloop/linalg.hpp"
#include "qloop/loop.hpp"
#include "qloop/termination.hpp"

namespace qloop {

class UnsupportedGuardError : public Error {
 public:
  using Error::Error;
};

struct PerturbationResult {
  enum class Target { kUnitary, kMeasurement };
  Target target = Target::kUnitary;
  CMatrix perturbed_unitary;                    // target == kUnitary
  ProjectiveMeasurement perturbed_measurement;  // target == kMeasurement
  double distance = 0.0;
  LoopVerdict verified_verdict;
  int steps_taken = 0;
  std::vector<double> deltas_used;
};

// Returns a unitary U' with |U - U'| < eps whose loop is almost
// terminating, by rotating eigenvectors of U out of H_X against eigenvectors
// outside it. Deterministic for a fixed (loop, eps, seed). Loops that are
// already almost terminating come back unchanged with distance 0.
PerturbationResult perturb_unitary(const QuantumLoop& loop, double eps,
                                   std::uint64_t rng_seed);

// Returns an observable M' with spec(M') = spec(M), unchanged outcome
// labels, and |M - M'| < eps whose loop is almost terminating, by rotating
// the measurement basis vectors spanning H_X against vectors outside it.
// Throws ApplicabilityError when some eigenspace of U has dimension above
// K - k, in which case every such rotated guard still traps an eigenvector
// (the identity body is the extreme case).
PerturbationResult perturb_measurement(const QuantumLoop& loop, double eps,
                                       std::uint64_t rng_seed);

}  // namespace qloop

#endif  // QLOOP_PERTURBATION_HPP_
