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

#include "qloop/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "qloop/elaborate.hpp"
#include "qloop/report.hpp"

namespace qloop {

namespace {

constexpr int kOk = 0;
constexpr int kDiagnostics = 1;
constexpr int kFailure = 2;

struct LoadedLoop {
  LoopSource source;
  QuantumLoop loop;
  std::optional<StateInput> input;
};

LoadedLoop load(const std::string& path) {
  LoadedLoop l;
  l.source = parse_file(path);
  Elaborated e = elaborate(l.source);
  l.loop = std::move(e.loop);
  l.input = std::move(e.input);
  return l;
}

void print_diagnostics(const std::vector<Diagnostic>& diags,
                       std::ostream& err) {
  for (const Diagnostic& d : diags) {
    err << (d.severity == Diagnostic::Severity::kError ? "error" : "warning")
        << " [" << d.code << "] " << d.message;
    if (d.residual > 0) err << " (residual " << d.residual << ")";
    err << "\n";
  }
}

int analyze_one(const std::string& path, bool json, std::ostream& out,
                std::ostream& err) {
  const LoadedLoop l = load(path);
  const std::vector<Diagnostic> diags = validate_loop(l.loop);
  if (has_errors(diags)) {
    print_diagnostics(diags, err);
    return kDiagnostics;
  }
  const AnalysisReport report =
      analyze(l.source.name.empty() ? path : l.source.name, l.loop, l.input);
  if (json) {
    out << to_json(report).dump(2) << "\n";
  } else {
    out << to_text(report);
  }
  return kOk;
}

int run_analyze(const std::string& file, const std::string& batch_dir,
                bool json, std::ostream& out, std::ostream& err) {
  if (batch_dir.empty()) return analyze_one(file, json, out, err);

  std::vector<std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(batch_dir)) {
    if (entry.path().extension() == ".ql") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    err << "no .ql files in '" << batch_dir << "'\n";
    return kDiagnostics;
  }

  std::vector<nlohmann::json> reports(files.size());
  std::vector<std::string> texts(files.size());
  std::vector<int> codes(files.size(), kOk);

  // Analyses are independent and share no mutable state.
#ifdef QLOOP_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (size_t i = 0; i < files.size(); ++i) {
    try {
      const LoadedLoop l = load(files[i]);
      const std::vector<Diagnostic> diags = validate_loop(l.loop);
      if (has_errors(diags)) {
        codes[i] = kDiagnostics;
        std::string msg;
        for (const Diagnostic& d : diags) msg += d.message + "\n";
        texts[i] = msg;
        continue;
      }
      const AnalysisReport report = analyze(l.source.name, l.loop, l.input);
      reports[i] = to_json(report);
      texts[i] = to_text(report);
    } catch (const Error& e) {
      codes[i] = kDiagnostics;
      texts[i] = std::string(e.what()) + "\n";
    }
  }

  int worst = kOk;
  if (json) {
    nlohmann::json all = nlohmann::json::array();
    for (size_t i = 0; i < files.size(); ++i) {
      nlohmann::json item = reports[i].is_null()
                                ? nlohmann::json{{"error", texts[i]}}
                                : reports[i];
      item["file"] = files[i];
      all.push_back(item);
      worst = std::max(worst, codes[i]);
    }
    out << all.dump(2) << "\n";
  } else {
    for (size_t i = 0; i < files.size(); ++i) {
      out << "== " << files[i] << "\n" << texts[i];
      worst = std::max(worst, codes[i]);
    }
  }
  return worst;
}

int run_simulate(const std::string& file, int steps, bool json,
                 std::ostream& out, std::ostream& err) {
  const LoadedLoop l = load(file);
  if (!l.input) {
    err << "simulate: '" << file << "' declares no input state\n";
    return kDiagnostics;
  }
  const std::vector<Diagnostic> diags = validate_loop(l.loop);
  if (has_errors(diags)) {
    print_diagnostics(diags, err);
    return kDiagnostics;
  }
  const LoopTrace t = run_trace(l.loop, *l.input, steps);
  out << (json ? to_json(t).dump(2) + "\n" : to_text(t));
  return kOk;
}

int run_fn(const std::string& file, const std::string& method, bool json,
           std::ostream& out, std::ostream& err) {
  const LoadedLoop l = load(file);
  if (!l.input) {
    err << "fn: '" << file << "' declares no input state\n";
    return kDiagnostics;
  }
  const std::vector<Diagnostic> diags = validate_loop(l.loop);
  if (has_errors(diags)) {
    print_diagnostics(diags, err);
    return kDiagnostics;
  }
  FMethod m = FMethod::kAuto;
  if (method == "series") m = FMethod::kSeries;
  if (method == "solve") m = FMethod::kSolve;
  if (method == "normal") m = FMethod::kNormal;
  const PartialDensity f = computed_function(l.loop, *l.input, m);
  if (json) {
    nlohmann::json j = to_json(f);
    j["schema"] = kJsonSchema;
    j["kind"] = "function";
    out << j.dump(2) << "\n";
  } else {
    out << "tr F(rho) = " << f.trace_value << "  (method " << f.method
        << ")\n";
    out << "F(rho) =\n" << f.matrix << "\n";
  }
  return kOk;
}

int run_perturb(const std::string& file, double eps, const std::string& target,
                std::uint64_t seed, std::string out_path, bool json,
                std::ostream& out, std::ostream& err) {
  const LoadedLoop l = load(file);
  const std::vector<Diagnostic> diags = validate_loop(l.loop);
  if (has_errors(diags)) {
    print_diagnostics(diags, err);
    return kDiagnostics;
  }
  PerturbationResult result;
  LoopSource emitted = l.source;
  if (target == "unitary") {
    result = perturb_unitary(l.loop, eps, seed);
    emitted = with_unitary_literal(l.source, result.perturbed_unitary);
  } else {
    result = perturb_measurement(l.loop, eps, seed);
    emitted = with_observable_literal(l.source, result.perturbed_measurement);
  }
  emitted.name = l.source.name + "_perturbed";

  if (out_path.empty()) {
    out_path = std::filesystem::path(file).replace_extension(".perturbed.ql")
                   .string();
  }
  std::ofstream of(out_path);
  if (!of) {
    err << "perturb: cannot write '" << out_path << "'\n";
    return kFailure;
  }
  of << pretty_print(emitted);
  of.close();

  if (json) {
    nlohmann::json j = to_json(result);
    j["emitted"] = out_path;
    out << j.dump(2) << "\n";
  } else {
    out << "perturbed " << target << ": distance " << result.distance
        << ", verdict " << to_string(result.verified_verdict.kind) << ", "
        << result.steps_taken << " rotation(s)\n";
    out << "wrote " << out_path << "\n";
  }
  return kOk;
}

int run_walk(int n, const std::string& out_path, std::ostream& out,
             std::ostream& err) {
  const LoopSource src = gen_walk(n);
  const std::string text = pretty_print(src);
  if (out_path.empty()) {
    out << text;
    return kOk;
  }
  std::ofstream of(out_path);
  if (!of) {
    err << "walk: cannot write '" << out_path << "'\n";
    return kFailure;
  }
  of << text;
  return kOk;
}

int run_validate(const std::string& file, bool json, std::ostream& out,
                 std::ostream& err) {
  const LoadedLoop l = load(file);
  std::vector<Diagnostic> diags = validate_loop(l.loop);
  if (l.input) {
    for (const Diagnostic& d : validate_input(*l.input)) diags.push_back(d);
  }
  if (json) {
    nlohmann::json j;
    j["schema"] = kJsonSchema;
    j["kind"] = "validation";
    nlohmann::json items = nlohmann::json::array();
    for (const Diagnostic& d : diags) items.push_back(to_json(d));
    j["diagnostics"] = items;
    j["ok"] = !has_errors(diags);
    out << j.dump(2) << "\n";
  } else {
    if (diags.empty()) {
      out << "ok\n";
    } else {
      print_diagnostics(diags, out);
    }
  }
  return has_errors(diags) ? kDiagnostics : kOk;
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  if (const char* overrides = std::getenv("QLOOP_TOL")) {
    try {
      apply_tolerance_overrides(overrides);
    } catch (const Error& e) {
      err << "QLOOP_TOL: " << e.what() << "\n";
      return kDiagnostics;
    }
  }

  CLI::App app{"static analyzer and simulator for quantum while-loops"};
  app.require_subcommand(1);

  std::string file, batch_dir, method = "auto", target, out_path;
  bool json = false;
  int steps = 20, walk_n = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;

  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "loop and input verdicts, p_NT, F(rho)");
  analyze_cmd->add_option("file", file, "loop program (.ql)");
  analyze_cmd->add_option("--batch", batch_dir,
                          "analyze every .ql file in a directory");
  analyze_cmd->add_flag("--json", json, "machine-readable report");

  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "unwound execution table");
  simulate_cmd->add_option("file", file)->required();
  simulate_cmd->add_option("--steps", steps, "number of steps")->required();
  simulate_cmd->add_flag("--json", json);

  CLI::App* fn_cmd = app.add_subcommand("fn", "computed function F(rho)");
  fn_cmd->add_option("file", file)->required();
  fn_cmd->add_option("--method", method)
      ->check(CLI::IsMember({"auto", "series", "solve", "normal"}));
  fn_cmd->add_flag("--json", json);

  CLI::App* perturb_cmd = app.add_subcommand(
      "perturb", "make the loop almost terminating by an eps-disturbance");
  perturb_cmd->add_option("file", file)->required();
  perturb_cmd->add_option("--eps", eps)->required();
  perturb_cmd->add_option("--target", target)
      ->required()
      ->check(CLI::IsMember({"unitary", "measurement"}));
  perturb_cmd->add_option("--seed", seed);
  perturb_cmd->add_option("-o,--output", out_path, "perturbed .ql path");
  perturb_cmd->add_flag("--json", json);

  CLI::App* walk_cmd =
      app.add_subcommand("walk", "emit a coined quantum walk loop");
  walk_cmd->add_option("--n", walk_n, "cycle length")->required();
  walk_cmd->add_option("-o,--output", out_path);

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check loop invariants");
  validate_cmd->add_option("file", file)->required();
  validate_cmd->add_flag("--json", json);

  std::vector<const char*> argv;
  argv.push_back("qloop");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kDiagnostics;
  }

  try {
    if (analyze_cmd->parsed()) {
      if (file.empty() && batch_dir.empty()) {
        err << "analyze: give a file or --batch DIR\n";
        return kDiagnostics;
      }
      return run_analyze(file, batch_dir, json, out, err);
    }
    if (simulate_cmd->parsed()) return run_simulate(file, steps, json, out, err);
    if (fn_cmd->parsed()) return run_fn(file, method, json, out, err);
    if (perturb_cmd->parsed()) {
      return run_perturb(file, eps, target, seed, out_path, json, out, err);
    }
    if (walk_cmd->parsed()) return run_walk(walk_n, out_path, out, err);
    if (validate_cmd->parsed()) return run_validate(file, json, out, err);
  } catch (const ParseError& e) {
    err << file << ":" << e.what() << "\n";
    return kDiagnostics;
  } catch (const ElaborateError& e) {
    err << file << ":" << e.what() << "\n";
    return kDiagnostics;
  } catch (const UnsupportedGuardError& e) {
    err << e.what() << "\n";
    return kDiagnostics;
  } catch (const ApplicabilityError& e) {
    err << e.what() << "\n";
    return kDiagnostics;
  } catch (const NumericalError& e) {
    err << e.what() << "\n";
    return kFailure;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace qloop
