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

#include "qloop/report.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace qloop {

AnalysisReport analyze(const std::string& name, const QuantumLoop& loop,
                       const std::optional<StateInput>& input,
                       int trace_steps) {
  const auto start = std::chrono::steady_clock::now();

  AnalysisReport r;
  r.loop_name = name;
  r.dims = loop.subsystem_dims;
  r.total_dim = loop.dim();
  r.guard.assign(loop.guard.begin(), loop.guard.end());
  r.diagnostics = validate_loop(loop);
  if (has_errors(r.diagnostics)) return r;

  const GuardProjectors g = guard_projectors(loop);
  r.guard_rank = g.k;
  r.loop_verdict = classify_loop(loop);
  if (!loop.guard_is_empty() && !loop.guard_is_full()) {
    const SpectralSplit split = spectral_split(g.compress(loop.unitary));
    for (const EigenPair& p : split.unit_eigenpairs) {
      r.unit_eigenvalues.push_back(p.value);
    }
  }

  if (input) {
    for (const Diagnostic& d : validate_input(*input)) r.diagnostics.push_back(d);
    if (!has_errors(r.diagnostics)) {
      r.input_verdict = input_verdict(loop, *input);
      r.f = computed_function(loop, *input);
      if (trace_steps > 0) {
        const LoopTrace t = run_trace(loop, *input, trace_steps);
        r.trace_excerpt = t.steps;
        for (LoopTraceStep& s : r.trace_excerpt) {
          s.rho_out.reset();  // keep the excerpt light
          s.rho_in.reset();
        }
      }
      const double law =
          std::abs(r.f->trace_value + r.input_verdict->p_nt - 1.0);
      if (law > 1e-6) {
        r.diagnostics.push_back({Diagnostic::Severity::kWarning, "trace-law",
                                 "tr(F) + p_NT deviates from 1", law});
      }
    }
  }

  r.timing_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return r;
}

//=========================================================================
// JSON
//=========================================================================

nlohmann::json complex_json(const Complex& c) {
  return nlohmann::json::array({c.real(), c.imag()});
}

nlohmann::json matrix_json(const CMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(complex_json(m(i, j)));
    }
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json to_json(const Diagnostic& d) {
  return {{"severity",
           d.severity == Diagnostic::Severity::kError ? "error" : "warning"},
          {"code", d.code},
          {"message", d.message},
          {"residual", d.residual}};
}

nlohmann::json to_json(const PartialDensity& f) {
  return {{"matrix", matrix_json(f.matrix)},
          {"trace", f.trace_value},
          {"method", f.method},
          {"truncation_bound", f.truncation_bound}};
}

nlohmann::json to_json(const AnalysisReport& r) {
  nlohmann::json j;
  j["schema"] = kJsonSchema;
  j["kind"] = "analysis";
  j["loop"] = r.loop_name;
  j["dims"] = r.dims;
  j["dim"] = r.total_dim;
  j["guard"] = r.guard;
  j["guard_rank"] = r.guard_rank;
  j["verdict"] = to_string(r.loop_verdict.kind);
  j["spectral_radius"] = r.loop_verdict.spectral_radius;
  j["nilpotent"] = r.loop_verdict.nilpotency_checked;
  j["uniformly_almost_terminating"] = r.loop_verdict.uniform;
  nlohmann::json units = nlohmann::json::array();
  for (const Complex& c : r.unit_eigenvalues) units.push_back(complex_json(c));
  j["unit_eigenvalues"] = units;
  if (r.input_verdict) {
    j["input_verdict"] = to_string(r.input_verdict->kind);
    j["p_nt"] = r.input_verdict->p_nt;
    if (r.input_verdict->kind == InputClass::kTerminates) {
      j["terminates_at_step"] = r.input_verdict->at_step;
    }
    j["marginal"] = r.input_verdict->marginal;
  }
  if (r.f) j["f"] = to_json(*r.f);
  if (!r.trace_excerpt.empty()) {
    nlohmann::json steps = nlohmann::json::array();
    for (const LoopTraceStep& s : r.trace_excerpt) {
      steps.push_back({{"n", s.n},
                       {"p_t", s.p_t},
                       {"p_nt", s.p_nt},
                       {"p_nt_cumulative", s.p_nt_cumulative},
                       {"p_nt_formula", s.p_nt_formula}});
    }
    j["trace"] = steps;
  }
  nlohmann::json diags = nlohmann::json::array();
  for (const Diagnostic& d : r.diagnostics) diags.push_back(to_json(d));
  j["diagnostics"] = diags;
  j["timing_ms"] = r.timing_ms;
  return j;
}

nlohmann::json to_json(const LoopTrace& t) {
  nlohmann::json j;
  j["schema"] = kJsonSchema;
  j["kind"] = "trace";
  nlohmann::json steps = nlohmann::json::array();
  for (const LoopTraceStep& s : t.steps) {
    steps.push_back({{"n", s.n},
                     {"p_t", s.p_t},
                     {"p_nt", s.p_nt},
                     {"p_nt_cumulative", s.p_nt_cumulative},
                     {"p_nt_formula", s.p_nt_formula}});
  }
  j["steps"] = steps;
  j["truncated_at"] = t.truncated_at;
  j["termination_detected"] = t.termination_detected;
  return j;
}

nlohmann::json to_json(const PerturbationResult& p) {
  nlohmann::json j;
  j["schema"] = kJsonSchema;
  j["kind"] = "perturbation";
  j["target"] = p.target == PerturbationResult::Target::kUnitary
                    ? "unitary"
                    : "measurement";
  j["distance"] = p.distance;
  j["verdict"] = to_string(p.verified_verdict.kind);
  j["steps_taken"] = p.steps_taken;
  j["deltas"] = p.deltas_used;
  if (p.target == PerturbationResult::Target::kUnitary) {
    j["unitary"] = matrix_json(p.perturbed_unitary);
  } else {
    j["observable"] = matrix_json(p.perturbed_measurement.observable());
  }
  return j;
}

//=========================================================================
// Text
//=========================================================================

namespace {

std::string format_probability(double p) {
  std::ostringstream ss;
  ss.precision(10);
  ss << p;
  return ss.str();
}

}  // namespace

std::string to_text(const AnalysisReport& r) {
  std::ostringstream out;
  out << "loop " << r.loop_name << "  (dim " << r.total_dim << ", guard rank "
      << r.guard_rank << ")\n";
  out << "  verdict: " << to_string(r.loop_verdict.kind);
  if (r.loop_verdict.kind == LoopClass::kAlmostTerminating) {
    out << " (uniformly)";
  }
  out << "\n";
  out << "  spectral radius of U_X: "
      << format_probability(r.loop_verdict.spectral_radius) << "\n";
  if (!r.unit_eigenvalues.empty()) {
    out << "  unit-modulus eigenvalues:";
    for (const Complex& c : r.unit_eigenvalues) {
      out << " " << c.real() << (c.imag() < 0 ? "-" : "+")
          << std::abs(c.imag()) << "i";
    }
    out << "\n";
  }
  if (r.input_verdict) {
    out << "  input verdict: " << to_string(r.input_verdict->kind);
    if (r.input_verdict->kind == InputClass::kTerminates) {
      out << " (by step " << r.input_verdict->at_step << ")";
    }
    if (r.input_verdict->marginal) out << " (marginal)";
    out << "\n";
    out << "  p_NT: " << format_probability(r.input_verdict->p_nt) << "\n";
  }
  if (r.f) {
    out << "  tr F(rho): " << format_probability(r.f->trace_value)
        << "  (method " << r.f->method << ")\n";
  }
  if (!r.trace_excerpt.empty()) {
    out << "  first steps (n, p_T, p_NT, p_NT^{n+}):\n";
    for (const LoopTraceStep& s : r.trace_excerpt) {
      out << "    " << s.n << "  " << format_probability(s.p_t) << "  "
          << format_probability(s.p_nt) << "  "
          << format_probability(s.p_nt_cumulative) << "\n";
    }
  }
  for (const Diagnostic& d : r.diagnostics) {
    out << "  ["
        << (d.severity == Diagnostic::Severity::kError ? "error" : "warning")
        << "] " << d.code << ": " << d.message << "\n";
  }
  out << "  elapsed: " << r.timing_ms << " ms\n";
  return out.str();
}

std::string to_text(const LoopTrace& t) {
  std::ostringstream out;
  out << "   n        p_T         p_NT      p_NT^{n+}      formula\n";
  for (const LoopTraceStep& s : t.steps) {
    out << "  " << s.n << "  " << format_probability(s.p_t) << "  "
        << format_probability(s.p_nt) << "  "
        << format_probability(s.p_nt_cumulative) << "  "
        << format_probability(s.p_nt_formula) << "\n";
  }
  if (t.termination_detected) {
    out << "  termination detected at step " << t.truncated_at << "\n";
  }
  return out.str();
}

}  // namespace qloop
