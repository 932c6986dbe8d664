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

#ifndef QLOOP_REPORT_HPP_
#define QLOOP_REPORT_HPP_

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qloop/computed_function.hpp"
#include "qloop/loop.hpp"
#include "qloop/perturbation.hpp"
#include "qloop/termination.hpp"

namespace qloop {

inline constexpr const char* kJsonSchema = "qloop/1";

struct AnalysisReport {
  std::string loop_name;
  std::vector<int> dims;
  int total_dim = 0;
  int guard_rank = 0;
  std::vector<std::string> guard;
  LoopVerdict loop_verdict;
  std::vector<Complex> unit_eigenvalues;
  std::optional<InputVerdict> input_verdict;
  std::optional<PartialDensity> f;
  std::vector<LoopTraceStep> trace_excerpt;
  double timing_ms = 0.0;
  std::vector<Diagnostic> diagnostics;
};

// Full analysis: loop verdict with spectral data, and when an input is
// given, its verdict, F(rho), and a short simulation excerpt. Checks the
// trace law tr(F) + p_NT = 1 and reports a violation as a diagnostic.
AnalysisReport analyze(const std::string& name, const QuantumLoop& loop,
                       const std::optional<StateInput>& input,
                       int trace_steps = 10);

nlohmann::json complex_json(const Complex& c);
nlohmann::json matrix_json(const CMatrix& m);
nlohmann::json to_json(const Diagnostic& d);
nlohmann::json to_json(const AnalysisReport& r);
nlohmann::json to_json(const LoopTrace& t);
nlohmann::json to_json(const PartialDensity& f);
nlohmann::json to_json(const PerturbationResult& p);

std::string to_text(const AnalysisReport& r);
std::string to_text(const LoopTrace& t);

}  // namespace qloop

#endif  // QLOOP_REPORT_HPP_
