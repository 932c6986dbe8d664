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

#ifndef QLOOP_ELABORATE_HPP_
#define QLOOP_ELABORATE_HPP_

#include <optional>
#include <string>

#include "qloop/loop.hpp"
#include "qloop/parser.hpp"

namespace qloop {

class ElaborateError : public Error {
 public:
  ElaborateError(const std::string& message, SourcePos pos)
      : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) +
              ": " + message),
        pos(pos) {}
  SourcePos pos;
};

struct Elaborated {
  QuantumLoop loop;
  std::optional<StateInput> input;
};

// Turns a parsed source into concrete matrices. Structural problems (unknown
// gates, dimension mismatches, out-of-range guard labels) throw with the
// offending source position; semantic residuals are left to validate_loop.
Elaborated elaborate(const LoopSource& source);

// Evaluates a gate expression on its own.
CMatrix evaluate_gate(const GateExpr& expr);

// Coined quantum walk on an n-cycle with the absorbing guard at position 1:
// dims [n, 2], U = S (I_n (x) H), position-register measurement, guard all
// positions except 1, default input |0>|0>.
LoopSource gen_walk(int n);

// LoopSource copies with a literal body / measurement, used to emit
// perturbed programs that re-parse to the same loop.
LoopSource with_unitary_literal(const LoopSource& src, const CMatrix& u);
LoopSource with_observable_literal(const LoopSource& src,
                                   const ProjectiveMeasurement& m);

}  // namespace qloop

#endif  // QLOOP_ELABORATE_HPP_
