// Command-line front end: parse a program file (or a built-in example),
// run the requested analysis, and emit a JSON or text report on stdout.
//
// Exit codes: 0 success, 2 invalid input, 3 iteration cap exceeded.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qtc/qtc.hpp"

namespace {

using namespace qtc;

struct Options {
  std::string file;
  std::string example;
  std::string state;
  std::string schedule;
  double tolerance = 1e-8;
  int max_iterations = 64;
  int horizon = 200;
  std::string format = "text";
};

Tolerance make_tolerance(const Options& opt) {
  Tolerance tol;
  tol.eps_contain = opt.tolerance;
  tol.eps_rank = opt.tolerance / 10.0;
  tol.eps_prob = opt.tolerance / 10.0;
  validate_tolerance(tol);
  return tol;
}

ProgramFile builtin_example(const std::string& name) {
  WalkSpec spec;
  if (name == "c4-nondet") spec.which = WalkKind::nondeterministic;
  else if (name == "c4-w1") spec.which = WalkKind::w1_only;
  else if (name == "c4-w2") spec.which = WalkKind::w2_only;
  else
    throw ValidationError("unknown example '" + name +
                          "' (available: c4-nondet, c4-w1, c4-w2)");
  ProgramFile pf;
  pf.program = build_walk(spec);
  pf.initial_ket = basis_ket(4, 0);
  return pf;
}

ProgramFile load_program(const Options& opt, const Tolerance& tol) {
  if (!opt.example.empty() && !opt.file.empty())
    throw ValidationError("give either a program file or --example, not both");
  if (!opt.example.empty()) return builtin_example(opt.example);
  if (opt.file.empty()) throw ValidationError("no program file and no --example given");
  std::ifstream in(opt.file);
  if (!in) throw ValidationError("cannot open program file '" + opt.file + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_program_file(buffer.str(), tol);
}

// A state flag is either a basis index ("0") or a JSON array of entries,
// each a number or an [re, im] pair.
Vector parse_state_flag(const std::string& text, Index dim) {
  if (text.find_first_not_of("0123456789") == std::string::npos && !text.empty()) {
    const long idx = std::stol(text);
    if (idx < 0 || idx >= dim)
      throw ValidationError("state index " + text + " out of range for dimension " +
                            std::to_string(dim));
    return basis_ket(dim, idx);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("cannot parse --state: ") + e.what());
  }
  if (!j.is_array()) throw ValidationError("--state must be a basis index or an array");
  Vector v(dim);
  if (Index(j.size()) != dim)
    throw ValidationError("--state has " + std::to_string(j.size()) + " entries, expected " +
                          std::to_string(dim));
  for (Index i = 0; i < dim; ++i) {
    const auto& entry = j[i];
    if (entry.is_number()) v(i) = Complex(entry.get<double>(), 0.0);
    else if (entry.is_array() && entry.size() == 2)
      v(i) = Complex(entry[0].get<double>(), entry[1].get<double>());
    else
      throw ValidationError("--state entries must be numbers or [re, im] pairs");
  }
  return v;
}

struct ResolvedState {
  DensityOperator rho;
  std::optional<Vector> ket;
};

ResolvedState resolve_state(const ProgramFile& pf, const Options& opt, const Tolerance& tol) {
  std::optional<Vector> ket;
  if (!opt.state.empty()) ket = parse_state_flag(opt.state, pf.program.dim);
  else if (pf.initial_ket) ket = pf.initial_ket;

  if (ket) {
    const double nrm = ket->norm();
    if (!(nrm > 0.0)) throw ValidationError("initial state vector is zero");
    if (std::abs(nrm - 1.0) > tol.eps_prob)
      std::cerr << "warning: normalizing initial state (norm " << nrm << ")\n";
    const Vector unit = *ket / nrm;
    return {DensityOperator::pure(unit), unit};
  }
  if (pf.initial_density) return {DensityOperator(*pf.initial_density, tol), std::nullopt};
  throw ValidationError("no initial state: pass --state or put initial_state in the file");
}

double elapsed_ms(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

void emit(const nlohmann::json& json_report, const std::string& text_report,
          const Options& opt) {
  if (opt.format == "json") std::cout << json_report.dump(2) << "\n";
  else std::cout << text_report;
}

int run_check(const Options& opt) {
  const Tolerance tol = make_tolerance(opt);
  const ProgramFile pf = load_program(opt, tol);
  const ResolvedState st = resolve_state(pf, opt, tol);
  const auto start = std::chrono::steady_clock::now();
  const Verdict v =
      check_termination(pf.program, st.rho, tol, opt.max_iterations, opt.horizon);
  ToolMeta meta{"check", tol, opt.max_iterations, opt.horizon, elapsed_ms(start)};
  emit(report_check(v, meta), text_report_check(v, meta), opt);
  return 0;
}

int run_reach(const Options& opt) {
  const Tolerance tol = make_tolerance(opt);
  const ProgramFile pf = load_program(opt, tol);
  const ResolvedState st = resolve_state(pf, opt, tol);
  const auto start = std::chrono::steady_clock::now();
  ReachabilityStats stats;
  const Subspace hr = reachable_space(pf.program, st.rho, tol, &stats);
  ToolMeta meta{"reach", tol, opt.max_iterations, opt.horizon, elapsed_ms(start)};
  emit(report_reach(hr, stats, meta), text_report_reach(hr, stats, meta), opt);
  return 0;
}

int run_diverge(const Options& opt) {
  const Tolerance tol = make_tolerance(opt);
  const ProgramFile pf = load_program(opt, tol);
  const auto start = std::chrono::steady_clock::now();
  const DivergenceResult dv = diverging_states(pf.program, tol, opt.max_iterations);
  ToolMeta meta{"diverge", tol, opt.max_iterations, opt.horizon, elapsed_ms(start)};
  emit(report_diverge(dv, meta), text_report_diverge(dv, meta), opt);
  return 0;
}

int run_simulate(const Options& opt) {
  const Tolerance tol = make_tolerance(opt);
  const ProgramFile pf = load_program(opt, tol);
  const ResolvedState st = resolve_state(pf, opt, tol);
  const auto start = std::chrono::steady_clock::now();

  const Program* program = &pf.program;
  Program averaged;
  ScheduleFragment fragment;
  std::string label = opt.schedule;

  if (opt.schedule == "greedy") {
    if (!st.ket)
      throw ValidationError("--schedule greedy needs a pure initial state");
    const DivergenceResult dv = diverging_states(pf.program, tol, opt.max_iterations);
    fragment = adversarial_schedule(pf.program, *st.ket, dv.pd, opt.horizon, tol);
    label = fragment.str();
  } else if (opt.schedule.rfind("uniform:", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(opt.schedule.substr(8));
    } catch (const std::exception&) {
      throw ValidationError("bad uniform schedule '" + opt.schedule + "'");
    }
    if (n < 0) throw ValidationError("uniform schedule length must be >= 0");
    averaged = average_program(pf.program, tol);
    program = &averaged;
    fragment = ScheduleFragment(std::vector<int>(n, 1));
  } else {
    fragment = ScheduleFragment::parse(opt.schedule);
    for (int i : fragment.indices)
      if (i > pf.program.process_count())
        throw ValidationError("schedule index " + std::to_string(i) +
                              " exceeds process count");
  }

  const auto trace = simulate(*program, fragment, st.rho, tol);
  ToolMeta meta{"simulate", tol, opt.max_iterations, opt.horizon, elapsed_ms(start)};
  nlohmann::json j = report_simulate(trace, fragment, meta);
  j["schedule"] = label;
  emit(j, text_report_simulate(trace, fragment, meta), opt);
  return 0;
}

int run_example(const std::string& name) {
  const ProgramFile pf = builtin_example(name);
  std::cout << write_program_file(pf.program, pf.initial_ket);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Termination analysis for nondeterministic quantum programs"};
  app.require_subcommand(1);

  Options opt;
  std::string example_name;

  const auto add_common = [&](CLI::App* cmd, bool needs_state, bool needs_schedule) {
    cmd->add_option("file", opt.file, "program file (JSON)");
    cmd->add_option("--example", opt.example, "built-in example: c4-nondet, c4-w1, c4-w2");
    if (needs_state)
      cmd->add_option("--state", opt.state, "initial state: basis index or JSON vector");
    if (needs_schedule)
      cmd->add_option("--schedule", opt.schedule,
                      "fragment like \"1212\", or greedy, or uniform:N")
          ->required();
    cmd->add_option("--tolerance", opt.tolerance,
                    "containment tolerance (eps_rank = tolerance/10)");
    cmd->add_option("--max-iterations", opt.max_iterations, "divergence iteration cap");
    cmd->add_option("--horizon", opt.horizon, "witness/greedy schedule length");
    cmd->add_option("--format", opt.format, "output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
  };

  CLI::App* check = app.add_subcommand("check", "decide termination and extract witnesses");
  add_common(check, true, false);
  CLI::App* reach = app.add_subcommand("reach", "compute the reachable space");
  add_common(reach, true, false);
  CLI::App* diverge = app.add_subcommand("diverge", "compute the diverging pure states");
  add_common(diverge, false, false);
  CLI::App* simulate = app.add_subcommand("simulate", "run a schedule and trace probabilities");
  add_common(simulate, true, true);
  CLI::App* example = app.add_subcommand("example", "print a built-in program file");
  example->add_option("name", example_name, "example name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return run_check(opt);
    if (reach->parsed()) return run_reach(opt);
    if (diverge->parsed()) return run_diverge(opt);
    if (simulate->parsed()) return run_simulate(opt);
    if (example->parsed()) return run_example(example_name);
    return 2;
  } catch (const qtc::IterationCapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const qtc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
