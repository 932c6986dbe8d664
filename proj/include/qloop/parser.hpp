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

#ifndef QLOOP_PARSER_HPP_
#define QLOOP_PARSER_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qloop/linalg.hpp"

namespace qloop {

struct SourcePos {
  int line = 0;
  int column = 0;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, SourcePos pos)
      : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) +
              ": " + message),
        pos(pos) {}
  SourcePos pos;
};

//=========================================================================
// AST
//=========================================================================

struct GateExpr;
using GateExprPtr = std::shared_ptr<const GateExpr>;

// Gate expression tree. Scalar subexpressions (angles, matrix entries, ket
// coefficients) are evaluated during parsing; the tree keeps their values.
struct GateExpr {
  enum class Kind {
    kNamed,       // I2 X Y Z H S T CNOT
    kIdentity,    // ident(n)
    kRy,          // Ry(theta)
    kRz,          // Rz(theta)
    kPhase,       // phase(alpha): 1x1 global phase factor
    kKron,        // kron(a, b)
    kControlled,  // controlled(a)
    kMatrix,      // [[...],...]
    kProduct      // a * b * ...
  };

  Kind kind = Kind::kNamed;
  SourcePos pos;
  std::string name;              // kNamed
  double angle = 0.0;            // kRy / kRz / kPhase
  int n = 0;                     // kIdentity
  CMatrix matrix;                // kMatrix
  std::vector<GateExprPtr> children;  // kKron / kControlled / kProduct

  bool equals(const GateExpr& other) const;
};

struct MeasureSpec {
  enum class Kind { kComputational, kComputationalOn, kObservable };
  Kind kind = Kind::kComputational;
  int reg = 0;  // kComputationalOn, zero-based
  GateExprPtr observable;
  std::vector<std::string> labels;  // optional labels {...} clause
  SourcePos pos;
};

struct KetTerm {
  Complex coeff{1.0, 0.0};
  std::string digits;  // one digit per register
  SourcePos pos;
};

struct InputSpec {
  enum class Kind { kKet, kMatrix };
  Kind kind = Kind::kKet;
  std::vector<KetTerm> terms;
  CMatrix matrix;
  SourcePos pos;
};

struct LoopSource {
  std::string name;
  std::vector<int> dims;
  SourcePos dims_pos;
  GateExprPtr gate;
  SourcePos gate_pos;
  MeasureSpec measure;
  std::vector<std::string> guard;  // declaration order preserved
  SourcePos guard_pos;
  std::optional<InputSpec> input;

  bool structurally_equal(const LoopSource& other) const;
};

//=========================================================================
// Entry points
//=========================================================================

LoopSource parse(const std::string& text);
LoopSource parse_file(const std::string& path);

// Canonical text form; parse(pretty_print(s)) is structurally equal to s.
std::string pretty_print(const LoopSource& source);

}  // namespace qloop

#endif  // QLOOP_PARSER_HPP_
