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

#include "qloop/elaborate.hpp"

#include <algorithm>
#include <cmath>

#include "qloop/gates.hpp"

namespace qloop {

namespace {

CMatrix eval_named(const GateExpr& e) {
  if (e.name == "I2") return gates::identity(2);
  if (e.name == "X") return gates::pauli_x();
  if (e.name == "Y") return gates::pauli_y();
  if (e.name == "Z") return gates::pauli_z();
  if (e.name == "H") return gates::hadamard();
  if (e.name == "S") return gates::phase_s();
  if (e.name == "T") return gates::t_gate();
  if (e.name == "CNOT") return gates::cnot();
  throw ElaborateError("unknown gate '" + e.name + "'", e.pos);
}

CMatrix multiply(const CMatrix& a, const CMatrix& b, SourcePos pos) {
  // 1x1 factors act as scalars so global phases compose with real gates.
  if (a.rows() == 1 && a.cols() == 1) return (a(0, 0) * b).eval();
  if (b.rows() == 1 && b.cols() == 1) return (b(0, 0) * a).eval();
  if (a.cols() != b.rows()) {
    throw ElaborateError(
        "cannot multiply a " + std::to_string(a.rows()) + "x" +
            std::to_string(a.cols()) + " matrix by a " +
            std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + " one",
        pos);
  }
  return (a * b).eval();
}

std::vector<int> ket_digits(const std::string& raw,
                            const std::vector<int>& dims, SourcePos pos) {
  std::vector<int> digits;
  if (raw.find(',') != std::string::npos) {
    std::string acc;
    for (char c : raw + ",") {
      if (c == ',') {
        if (acc.empty()) throw ElaborateError("empty ket digit", pos);
        digits.push_back(std::stoi(acc));
        acc.clear();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        acc += c;
      } else {
        throw ElaborateError("ket digits must be numeric", pos);
      }
    }
  } else {
    for (char c : raw) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        throw ElaborateError("ket digits must be numeric", pos);
      }
      digits.push_back(c - '0');
    }
  }
  if (digits.size() != dims.size()) {
    throw ElaborateError("ket |" + raw + "> has " +
                             std::to_string(digits.size()) +
                             " digits but the loop declares " +
                             std::to_string(dims.size()) + " registers",
                         pos);
  }
  for (size_t r = 0; r < digits.size(); ++r) {
    if (digits[r] < 0 || digits[r] >= dims[r]) {
      throw ElaborateError("ket digit " + std::to_string(digits[r]) +
                               " is out of range for register " +
                               std::to_string(r + 1) + " of dimension " +
                               std::to_string(dims[r]),
                           pos);
    }
  }
  return digits;
}

int ket_index(const std::vector<int>& digits, const std::vector<int>& dims) {
  int index = 0;
  for (size_t r = 0; r < dims.size(); ++r) index = index * dims[r] + digits[r];
  return index;
}

}  // namespace

CMatrix evaluate_gate(const GateExpr& e) {
  switch (e.kind) {
    case GateExpr::Kind::kNamed:
      return eval_named(e);
    case GateExpr::Kind::kIdentity:
      return gates::identity(e.n);
    case GateExpr::Kind::kRy:
      return gates::ry(e.angle);
    case GateExpr::Kind::kRz:
      return gates::rz(e.angle);
    case GateExpr::Kind::kPhase:
      return gates::global_phase(e.angle);
    case GateExpr::Kind::kKron:
      return tensor_product(evaluate_gate(*e.children[0]),
                            evaluate_gate(*e.children[1]));
    case GateExpr::Kind::kControlled: {
      const CMatrix u = evaluate_gate(*e.children[0]);
      if (u.rows() != u.cols()) {
        throw ElaborateError("controlled() needs a square gate", e.pos);
      }
      return gates::controlled(u);
    }
    case GateExpr::Kind::kMatrix:
      return e.matrix;
    case GateExpr::Kind::kProduct: {
      CMatrix acc = evaluate_gate(*e.children[0]);
      for (size_t i = 1; i < e.children.size(); ++i) {
        acc = multiply(acc, evaluate_gate(*e.children[i]), e.pos);
      }
      return acc;
    }
  }
  throw ElaborateError("unhandled gate expression", e.pos);
}

Elaborated elaborate(const LoopSource& source) {
  Elaborated out;
  out.loop.subsystem_dims = source.dims;
  const int k_total = out.loop.dim();

  CMatrix u = evaluate_gate(*source.gate);
  if (u.rows() == 1 && u.cols() == 1 && k_total != 1) {
    u = (u(0, 0) * CMatrix::Identity(k_total, k_total)).eval();
  }
  if (u.rows() != k_total || u.cols() != k_total) {
    throw ElaborateError(
        "gate is " + std::to_string(u.rows()) + "x" +
            std::to_string(u.cols()) + " but the registers span dimension " +
            std::to_string(k_total),
        source.gate_pos);
  }
  out.loop.unitary = u;

  switch (source.measure.kind) {
    case MeasureSpec::Kind::kComputational:
      out.loop.measurement = ProjectiveMeasurement::computational(source.dims);
      break;
    case MeasureSpec::Kind::kComputationalOn:
      if (source.measure.reg >= static_cast<int>(source.dims.size())) {
        throw ElaborateError(
            "measurement register q" + std::to_string(source.measure.reg + 1) +
                " does not exist",
            source.measure.pos);
      }
      out.loop.measurement = ProjectiveMeasurement::computational_on(
          source.dims, source.measure.reg);
      break;
    case MeasureSpec::Kind::kObservable: {
      const CMatrix m = evaluate_gate(*source.measure.observable);
      if (m.rows() != k_total || m.cols() != k_total) {
        throw ElaborateError("observable does not match the loop dimension",
                             source.measure.pos);
      }
      if (!is_hermitian(m)) {
        throw ElaborateError("observable must be Hermitian",
                             source.measure.pos);
      }
      try {
        out.loop.measurement =
            ProjectiveMeasurement::from_observable(m, source.measure.labels);
      } catch (const Error& e) {
        throw ElaborateError(e.what(), source.measure.pos);
      }
      break;
    }
  }

  for (const std::string& label : source.guard) {
    if (!out.loop.measurement.find(label)) {
      std::string known;
      for (const std::string& l : out.loop.measurement.labels()) {
        if (!known.empty()) known += ", ";
        known += l;
      }
      throw ElaborateError("guard label '" + label +
                               "' is not a measurement outcome (outcomes: " +
                               known + ")",
                           source.guard_pos);
    }
    out.loop.guard.insert(label);
  }

  if (source.input) {
    if (source.input->kind == InputSpec::Kind::kMatrix) {
      const CMatrix& rho = source.input->matrix;
      if (rho.rows() != k_total || rho.cols() != k_total) {
        throw ElaborateError("input density does not match the loop dimension",
                             source.input->pos);
      }
      out.input = StateInput::mixed(rho);
    } else {
      CVector psi = CVector::Zero(k_total);
      for (const KetTerm& term : source.input->terms) {
        const std::vector<int> digits =
            ket_digits(term.digits, source.dims, term.pos);
        psi(ket_index(digits, source.dims)) += term.coeff;
      }
      out.input = StateInput::pure(psi);
    }
  }
  return out;
}

//=========================================================================
// Walk generator
//=========================================================================

LoopSource gen_walk(int n) {
  if (n < 3) throw Error("gen_walk: the cycle needs at least 3 positions");

  LoopSource src;
  src.name = "walk" + std::to_string(n);
  src.dims = {n, 2};

  auto shift = std::make_shared<GateExpr>();
  shift->kind = GateExpr::Kind::kMatrix;
  shift->matrix = gates::walk_shift(n);

  auto eye = std::make_shared<GateExpr>();
  eye->kind = GateExpr::Kind::kIdentity;
  eye->n = n;

  auto had = std::make_shared<GateExpr>();
  had->kind = GateExpr::Kind::kNamed;
  had->name = "H";

  auto coin = std::make_shared<GateExpr>();
  coin->kind = GateExpr::Kind::kKron;
  coin->children = {eye, had};

  auto body = std::make_shared<GateExpr>();
  body->kind = GateExpr::Kind::kProduct;
  body->children = {shift, coin};
  src.gate = body;

  src.measure.kind = MeasureSpec::Kind::kComputationalOn;
  src.measure.reg = 0;

  for (int i = 0; i < n; ++i) {
    if (i != 1) src.guard.push_back(std::to_string(i));
  }

  InputSpec input;
  input.kind = InputSpec::Kind::kKet;
  KetTerm term;
  term.coeff = Complex(1.0, 0.0);
  term.digits = n <= 9 ? "00" : "0,0";
  input.terms.push_back(term);
  src.input = input;
  return src;
}

//=========================================================================
// Literal rewrites for emitted programs
//=========================================================================

LoopSource with_unitary_literal(const LoopSource& src, const CMatrix& u) {
  LoopSource out = src;
  auto lit = std::make_shared<GateExpr>();
  lit->kind = GateExpr::Kind::kMatrix;
  lit->matrix = u;
  out.gate = lit;
  return out;
}

LoopSource with_observable_literal(const LoopSource& src,
                                   const ProjectiveMeasurement& m) {
  // Outcomes keyed by eigenvalue: emit the observable matrix plus a labels
  // clause in the deterministic eigenvalue order so the file elaborates back
  // to the same labeled family.
  std::vector<const Outcome*> ordered;
  for (const Outcome& o : m.outcomes) ordered.push_back(&o);
  std::sort(ordered.begin(), ordered.end(), [](const Outcome* a,
                                               const Outcome* b) {
    return spectral_precedes(Complex(a->value, 0), Complex(b->value, 0));
  });
  for (size_t i = 1; i < ordered.size(); ++i) {
    if (ordered[i]->value == ordered[i - 1]->value) {
      throw Error(
          "cannot serialize a measurement with two outcomes of equal "
          "eigenvalue");
    }
  }

  LoopSource out = src;
  out.measure.kind = MeasureSpec::Kind::kObservable;
  auto lit = std::make_shared<GateExpr>();
  lit->kind = GateExpr::Kind::kMatrix;
  lit->matrix = m.observable();
  out.measure.observable = lit;
  out.measure.labels.clear();
  for (const Outcome* o : ordered) out.measure.labels.push_back(o->label);
  return out;
}

}  // namespace qloop
