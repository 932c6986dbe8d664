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

#include "qloop/parser.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qloop {

namespace {

//=========================================================================
// Lexer
//=========================================================================

enum class TokKind { kIdent, kNumber, kKet, kPunct, kEnd };

struct Token {
  TokKind kind = TokKind::kEnd;
  std::string text;
  double number = 0.0;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_space_and_comments();
    current_.pos = pos();
    if (at_ >= text_.size()) {
      current_ = {TokKind::kEnd, "", 0.0, pos()};
      return;
    }
    const char c = text_[at_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = at_;
      while (at_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[at_])) ||
              text_[at_] == '_')) {
        bump();
      }
      current_.kind = TokKind::kIdent;
      current_.text = text_.substr(start, at_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && at_ + 1 < text_.size() &&
         std::isdigit(static_cast<unsigned char>(text_[at_ + 1])))) {
      size_t start = at_;
      while (at_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[at_])) ||
              text_[at_] == '.')) {
        bump();
      }
      if (at_ < text_.size() && (text_[at_] == 'e' || text_[at_] == 'E')) {
        size_t mark = at_;
        bump();
        if (at_ < text_.size() && (text_[at_] == '+' || text_[at_] == '-')) {
          bump();
        }
        if (at_ < text_.size() &&
            std::isdigit(static_cast<unsigned char>(text_[at_]))) {
          while (at_ < text_.size() &&
                 std::isdigit(static_cast<unsigned char>(text_[at_]))) {
            bump();
          }
        } else {
          at_ = mark;  // not an exponent after all (e.g. label "0e" never
                       // occurs, but be safe)
        }
      }
      current_.kind = TokKind::kNumber;
      current_.text = text_.substr(start, at_ - start);
      current_.number = std::stod(current_.text);
      return;
    }
    if (c == '|') {
      // Ket literal: |digits>, raw digits preserved (leading zeros matter).
      const SourcePos start_pos = pos();
      bump();
      std::string digits;
      while (at_ < text_.size() && text_[at_] != '>') {
        digits += text_[at_];
        bump();
      }
      if (at_ >= text_.size()) {
        throw ParseError("unterminated ket literal", start_pos);
      }
      bump();  // consume '>'
      current_.kind = TokKind::kKet;
      current_.text = digits;
      current_.pos = start_pos;
      return;
    }
    current_.kind = TokKind::kPunct;
    current_.text = std::string(1, c);
    bump();
  }

  void skip_space_and_comments() {
    while (at_ < text_.size()) {
      const char c = text_[at_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
      } else if (c == '#' ||
                 (c == '/' && at_ + 1 < text_.size() &&
                  text_[at_ + 1] == '/')) {
        while (at_ < text_.size() && text_[at_] != '\n') bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (text_[at_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++at_;
  }

  SourcePos pos() const { return {line_, column_}; }

  const std::string& text_;
  size_t at_ = 0;
  int line_ = 1;
  int column_ = 1;
  Token current_;
};

//=========================================================================
// Parser
//=========================================================================

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  LoopSource parse_loop() {
    LoopSource out;
    expect_ident("loop");
    out.name = expect(TokKind::kIdent, "loop name").text;
    expect_punct("{");
    bool saw_dims = false, saw_gate = false, saw_measure = false,
         saw_guard = false;
    while (!peek_punct("}")) {
      const Token head = expect(TokKind::kIdent, "declaration");
      if (head.text == "dims") {
        expect_punct(":");
        out.dims = parse_dims();
        out.dims_pos = head.pos;
        saw_dims = true;
      } else if (head.text == "gate") {
        expect(TokKind::kIdent, "gate name");
        expect_punct("=");
        out.gate_pos = lex_.peek().pos;
        out.gate = parse_gate_expr();
        saw_gate = true;
      } else if (head.text == "measure") {
        expect(TokKind::kIdent, "measurement name");
        expect_punct("=");
        out.measure = parse_measure();
        out.measure.pos = head.pos;
        saw_measure = true;
      } else if (head.text == "guard") {
        expect(TokKind::kIdent, "guard name");
        expect_punct("=");
        out.guard = parse_label_set();
        out.guard_pos = head.pos;
        saw_guard = true;
      } else if (head.text == "input") {
        expect_punct(":");
        out.input = parse_input();
      } else {
        throw ParseError("unknown declaration '" + head.text + "'", head.pos);
      }
      expect_punct(";");
    }
    expect_punct("}");
    if (!saw_dims) throw ParseError("loop is missing a dims declaration", {1, 1});
    if (!saw_gate) throw ParseError("loop is missing a gate declaration", {1, 1});
    if (!saw_measure) {
      throw ParseError("loop is missing a measure declaration", {1, 1});
    }
    if (!saw_guard) {
      throw ParseError("loop is missing a guard declaration", {1, 1});
    }
    return out;
  }

 private:
  //--- token helpers ----------------------------------------------------

  Token expect(TokKind kind, const std::string& what) {
    if (lex_.peek().kind != kind) {
      throw ParseError("expected " + what + ", got '" + lex_.peek().text + "'",
                       lex_.peek().pos);
    }
    return lex_.take();
  }

  void expect_ident(const std::string& word) {
    const Token t = expect(TokKind::kIdent, "'" + word + "'");
    if (t.text != word) {
      throw ParseError("expected '" + word + "', got '" + t.text + "'", t.pos);
    }
  }

  void expect_punct(const std::string& p) {
    if (!peek_punct(p)) {
      throw ParseError("expected '" + p + "', got '" + lex_.peek().text + "'",
                       lex_.peek().pos);
    }
    lex_.take();
  }

  bool peek_punct(const std::string& p) const {
    return lex_.peek().kind == TokKind::kPunct && lex_.peek().text == p;
  }

  bool peek_ident(const std::string& word) const {
    return lex_.peek().kind == TokKind::kIdent && lex_.peek().text == word;
  }

  //--- declarations -----------------------------------------------------

  std::vector<int> parse_dims() {
    expect_punct("[");
    std::vector<int> dims;
    while (true) {
      const Token t = expect(TokKind::kNumber, "register dimension");
      const int d = static_cast<int>(t.number);
      if (d <= 0 || t.number != d) {
        throw ParseError("register dimension must be a positive integer",
                         t.pos);
      }
      dims.push_back(d);
      if (peek_punct(",")) {
        lex_.take();
        continue;
      }
      break;
    }
    expect_punct("]");
    return dims;
  }

  MeasureSpec parse_measure() {
    MeasureSpec m;
    m.pos = lex_.peek().pos;
    if (peek_ident("computational")) {
      lex_.take();
      if (peek_punct("(")) {
        lex_.take();
        const Token reg = expect(TokKind::kIdent, "register (q1, q2, ...)");
        if (reg.text.size() < 2 || reg.text[0] != 'q') {
          throw ParseError("expected a register like q1", reg.pos);
        }
        int index = 0;
        for (size_t i = 1; i < reg.text.size(); ++i) {
          if (!std::isdigit(static_cast<unsigned char>(reg.text[i]))) {
            throw ParseError("expected a register like q1", reg.pos);
          }
          index = index * 10 + (reg.text[i] - '0');
        }
        if (index < 1) {
          throw ParseError("registers are numbered from q1", reg.pos);
        }
        expect_punct(")");
        m.kind = MeasureSpec::Kind::kComputationalOn;
        m.reg = index - 1;
      } else {
        m.kind = MeasureSpec::Kind::kComputational;
      }
      return m;
    }
    m.kind = MeasureSpec::Kind::kObservable;
    m.observable = parse_gate_expr();
    if (peek_ident("labels")) {
      lex_.take();
      m.labels = parse_label_set();
    }
    return m;
  }

  std::vector<std::string> parse_label_set() {
    expect_punct("{");
    std::vector<std::string> labels;
    while (!peek_punct("}")) {
      const Token t = lex_.take();
      if (t.kind != TokKind::kIdent && t.kind != TokKind::kNumber) {
        throw ParseError("expected an outcome label", t.pos);
      }
      labels.push_back(t.text);  // raw text: "00" keeps its leading zero
      if (peek_punct(",")) lex_.take();
    }
    expect_punct("}");
    return labels;
  }

  InputSpec parse_input() {
    InputSpec in;
    in.pos = lex_.peek().pos;
    if (peek_punct("[")) {
      in.kind = InputSpec::Kind::kMatrix;
      in.matrix = parse_matrix_literal();
      return in;
    }
    in.kind = InputSpec::Kind::kKet;
    bool negate = false;
    while (true) {
      KetTerm term;
      term.pos = lex_.peek().pos;
      term.coeff = parse_ket_coefficient(&term.digits);
      if (negate) term.coeff = -term.coeff;
      in.terms.push_back(std::move(term));
      if (peek_punct("+")) {
        lex_.take();
        negate = false;
        continue;
      }
      if (peek_punct("-")) {
        lex_.take();
        negate = true;
        continue;
      }
      break;
    }
    return in;
  }

  // A ket term is a '*'-chain of scalar factors ending in one ket literal.
  Complex parse_ket_coefficient(std::string* digits) {
    Complex coeff(1.0, 0.0);
    while (true) {
      if (lex_.peek().kind == TokKind::kKet) {
        *digits = lex_.take().text;
        return coeff;
      }
      coeff *= parse_scalar_factor();
      if (peek_punct("*")) {
        lex_.take();
        continue;
      }
      if (lex_.peek().kind == TokKind::kKet) continue;  // "0.5|0>" style
      throw ParseError("expected '*' and a ket in the input term",
                       lex_.peek().pos);
    }
  }

  //--- scalar expressions ------------------------------------------------

  Complex parse_scalar_expr() {
    Complex v = parse_scalar_term();
    while (peek_punct("+") || peek_punct("-")) {
      const bool minus = lex_.take().text == "-";
      const Complex rhs = parse_scalar_term();
      v = minus ? v - rhs : v + rhs;
    }
    return v;
  }

  Complex parse_scalar_term() {
    Complex v = parse_scalar_factor();
    while (peek_punct("*") || peek_punct("/")) {
      const bool div = lex_.take().text == "/";
      const Complex rhs = parse_scalar_factor();
      v = div ? v / rhs : v * rhs;
    }
    return v;
  }

  Complex parse_scalar_factor() {
    if (peek_punct("-")) {
      lex_.take();
      return -parse_scalar_factor();
    }
    if (peek_punct("+")) {
      lex_.take();
      return parse_scalar_factor();
    }
    return parse_scalar_atom();
  }

  Complex parse_scalar_atom() {
    const Token t = lex_.peek();
    if (t.kind == TokKind::kNumber) {
      lex_.take();
      return Complex(t.number, 0.0);
    }
    if (t.kind == TokKind::kIdent) {
      if (t.text == "pi") {
        lex_.take();
        return Complex(M_PI, 0.0);
      }
      if (t.text == "i") {
        lex_.take();
        return Complex(0.0, 1.0);
      }
      if (t.text == "sqrt" || t.text == "exp" || t.text == "cos" ||
          t.text == "sin") {
        lex_.take();
        expect_punct("(");
        const Complex arg = parse_scalar_expr();
        expect_punct(")");
        if (t.text == "sqrt") return std::sqrt(arg);
        if (t.text == "exp") return std::exp(arg);
        if (t.text == "cos") return std::cos(arg);
        return std::sin(arg);
      }
      throw ParseError("unknown scalar '" + t.text + "'", t.pos);
    }
    if (peek_punct("(")) {
      lex_.take();
      const Complex v = parse_scalar_expr();
      expect_punct(")");
      return v;
    }
    throw ParseError("expected a scalar expression, got '" + t.text + "'",
                     t.pos);
  }

  //--- gate expressions --------------------------------------------------

  GateExprPtr parse_gate_expr() {
    const SourcePos pos = lex_.peek().pos;
    std::vector<GateExprPtr> factors;
    factors.push_back(parse_gate_term());
    while (peek_punct("*")) {
      lex_.take();
      factors.push_back(parse_gate_term());
    }
    if (factors.size() == 1) return factors[0];
    auto node = std::make_shared<GateExpr>();
    node->kind = GateExpr::Kind::kProduct;
    node->pos = pos;
    node->children = std::move(factors);
    return node;
  }

  GateExprPtr parse_gate_term() {
    const Token t = lex_.peek();
    if (t.kind == TokKind::kPunct && t.text == "[") {
      auto node = std::make_shared<GateExpr>();
      node->kind = GateExpr::Kind::kMatrix;
      node->pos = t.pos;
      node->matrix = parse_matrix_literal();
      return node;
    }
    if (t.kind == TokKind::kPunct && t.text == "(") {
      lex_.take();
      GateExprPtr inner = parse_gate_expr();
      expect_punct(")");
      return inner;
    }
    if (t.kind != TokKind::kIdent) {
      throw ParseError("expected a gate expression, got '" + t.text + "'",
                       t.pos);
    }
    lex_.take();
    auto node = std::make_shared<GateExpr>();
    node->pos = t.pos;
    if (t.text == "kron") {
      node->kind = GateExpr::Kind::kKron;
      expect_punct("(");
      node->children.push_back(parse_gate_expr());
      expect_punct(",");
      node->children.push_back(parse_gate_expr());
      expect_punct(")");
      return node;
    }
    if (t.text == "controlled") {
      node->kind = GateExpr::Kind::kControlled;
      expect_punct("(");
      node->children.push_back(parse_gate_expr());
      expect_punct(")");
      return node;
    }
    if (t.text == "ident") {
      node->kind = GateExpr::Kind::kIdentity;
      expect_punct("(");
      const Token n = expect(TokKind::kNumber, "dimension");
      node->n = static_cast<int>(n.number);
      if (node->n <= 0 || n.number != node->n) {
        throw ParseError("ident() needs a positive integer", n.pos);
      }
      expect_punct(")");
      return node;
    }
    if (t.text == "Ry" || t.text == "Rz" || t.text == "phase") {
      node->kind = t.text == "Ry"   ? GateExpr::Kind::kRy
                   : t.text == "Rz" ? GateExpr::Kind::kRz
                                    : GateExpr::Kind::kPhase;
      expect_punct("(");
      const Complex angle = parse_scalar_expr();
      expect_punct(")");
      if (std::abs(angle.imag()) > 1e-12) {
        throw ParseError("angle must be real", t.pos);
      }
      node->angle = angle.real();
      return node;
    }
    node->kind = GateExpr::Kind::kNamed;
    node->name = t.text;
    return node;
  }

  CMatrix parse_matrix_literal() {
    const SourcePos pos = lex_.peek().pos;
    expect_punct("[");
    std::vector<std::vector<Complex>> rows;
    while (true) {
      expect_punct("[");
      std::vector<Complex> row;
      while (!peek_punct("]")) {
        row.push_back(parse_scalar_expr());
        if (peek_punct(",")) lex_.take();
      }
      expect_punct("]");
      rows.push_back(std::move(row));
      if (peek_punct(",")) {
        lex_.take();
        continue;
      }
      break;
    }
    expect_punct("]");
    if (rows.empty()) throw ParseError("empty matrix literal", pos);
    const size_t cols = rows[0].size();
    for (const auto& r : rows) {
      if (r.size() != cols) {
        throw ParseError("matrix rows have unequal lengths", pos);
      }
    }
    CMatrix m(rows.size(), cols);
    for (size_t i = 0; i < rows.size(); ++i) {
      for (size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  Lexer lex_;
};

//=========================================================================
// Printing
//=========================================================================

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_complex(const Complex& c) {
  if (c.imag() == 0.0) return format_double(c.real());
  if (c.real() == 0.0) return format_double(c.imag()) + "*i";
  const std::string op = c.imag() < 0 ? "-" : "+";
  return "(" + format_double(c.real()) + op +
         format_double(std::abs(c.imag())) + "*i)";
}

std::string format_matrix(const CMatrix& m) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) out += ", ";
    out += "[";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ", ";
      out += format_complex(m(i, j));
    }
    out += "]";
  }
  out += "]";
  return out;
}

std::string format_gate(const GateExpr& e) {
  switch (e.kind) {
    case GateExpr::Kind::kNamed:
      return e.name;
    case GateExpr::Kind::kIdentity:
      return "ident(" + std::to_string(e.n) + ")";
    case GateExpr::Kind::kRy:
      return "Ry(" + format_double(e.angle) + ")";
    case GateExpr::Kind::kRz:
      return "Rz(" + format_double(e.angle) + ")";
    case GateExpr::Kind::kPhase:
      return "phase(" + format_double(e.angle) + ")";
    case GateExpr::Kind::kKron:
      return "kron(" + format_gate(*e.children[0]) + ", " +
             format_gate(*e.children[1]) + ")";
    case GateExpr::Kind::kControlled:
      return "controlled(" + format_gate(*e.children[0]) + ")";
    case GateExpr::Kind::kMatrix:
      return format_matrix(e.matrix);
    case GateExpr::Kind::kProduct: {
      std::string out;
      for (size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += " * ";
        const bool wrap = e.children[i]->kind == GateExpr::Kind::kProduct;
        out += wrap ? "(" + format_gate(*e.children[i]) + ")"
                    : format_gate(*e.children[i]);
      }
      return out;
    }
  }
  return "?";
}

}  // namespace

//=========================================================================
// AST equality
//=========================================================================

bool GateExpr::equals(const GateExpr& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::kNamed:
      return name == other.name;
    case Kind::kIdentity:
      return n == other.n;
    case Kind::kRy:
    case Kind::kRz:
    case Kind::kPhase:
      return angle == other.angle;
    case Kind::kMatrix:
      return matrix.rows() == other.matrix.rows() &&
             matrix.cols() == other.matrix.cols() && matrix == other.matrix;
    case Kind::kKron:
    case Kind::kControlled:
    case Kind::kProduct:
      if (children.size() != other.children.size()) return false;
      for (size_t i = 0; i < children.size(); ++i) {
        if (!children[i]->equals(*other.children[i])) return false;
      }
      return true;
  }
  return false;
}

bool LoopSource::structurally_equal(const LoopSource& other) const {
  if (name != other.name || dims != other.dims || guard != other.guard) {
    return false;
  }
  if (!gate || !other.gate || !gate->equals(*other.gate)) return false;
  if (measure.kind != other.measure.kind || measure.reg != other.measure.reg ||
      measure.labels != other.measure.labels) {
    return false;
  }
  if (measure.kind == MeasureSpec::Kind::kObservable &&
      !measure.observable->equals(*other.measure.observable)) {
    return false;
  }
  if (input.has_value() != other.input.has_value()) return false;
  if (input) {
    if (input->kind != other.input->kind) return false;
    if (input->kind == InputSpec::Kind::kMatrix) {
      if (input->matrix.rows() != other.input->matrix.rows() ||
          input->matrix != other.input->matrix) {
        return false;
      }
    } else {
      if (input->terms.size() != other.input->terms.size()) return false;
      for (size_t i = 0; i < input->terms.size(); ++i) {
        if (input->terms[i].coeff != other.input->terms[i].coeff ||
            input->terms[i].digits != other.input->terms[i].digits) {
          return false;
        }
      }
    }
  }
  return true;
}

//=========================================================================
// Entry points
//=========================================================================

LoopSource parse(const std::string& text) {
  Parser parser(text);
  return parser.parse_loop();
}

LoopSource parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string pretty_print(const LoopSource& source) {
  std::string out = "loop " + source.name + " {\n";
  out += "  dims: [";
  for (size_t i = 0; i < source.dims.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(source.dims[i]);
  }
  out += "];\n";
  out += "  gate U = " + format_gate(*source.gate) + ";\n";
  out += "  measure M = ";
  switch (source.measure.kind) {
    case MeasureSpec::Kind::kComputational:
      out += "computational";
      break;
    case MeasureSpec::Kind::kComputationalOn:
      out += "computational(q" + std::to_string(source.measure.reg + 1) + ")";
      break;
    case MeasureSpec::Kind::kObservable:
      out += format_gate(*source.measure.observable);
      if (!source.measure.labels.empty()) {
        out += " labels {";
        for (size_t i = 0; i < source.measure.labels.size(); ++i) {
          if (i) out += ", ";
          out += source.measure.labels[i];
        }
        out += "}";
      }
      break;
  }
  out += ";\n";
  out += "  guard X = {";
  for (size_t i = 0; i < source.guard.size(); ++i) {
    if (i) out += ", ";
    out += source.guard[i];
  }
  out += "};\n";
  if (source.input) {
    out += "  input: ";
    if (source.input->kind == InputSpec::Kind::kMatrix) {
      out += format_matrix(source.input->matrix);
    } else {
      for (size_t i = 0; i < source.input->terms.size(); ++i) {
        const KetTerm& t = source.input->terms[i];
        if (i) out += " + ";
        if (t.coeff != Complex(1.0, 0.0)) {
          out += format_complex(t.coeff) + "*";
        }
        out += "|" + t.digits + ">";
      }
    }
    out += ";\n";
  }
  out += "}\n";
  return out;
}

}  // namespace qloop
