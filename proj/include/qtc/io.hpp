#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qtc/divergence.hpp"
#include "qtc/termination.hpp"

namespace qtc {

inline constexpr int kProgramFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;

// ---------------------------------------------------------------------------
// JSON encoding: complex entries are [re, im] pairs, matrices are arrays of
// rows, vectors are arrays of entries.
// ---------------------------------------------------------------------------

inline nlohmann::json complex_to_json(const Complex& c) {
  return nlohmann::json::array({c.real(), c.imag()});
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

namespace detail {

inline Complex parse_complex(const nlohmann::json& j, const std::string& where) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw ValidationError(where + ": expected a number or an [re, im] pair");
}

inline Matrix parse_matrix(const nlohmann::json& j, Index dim, const std::string& where) {
  if (!j.is_array() || Index(j.size()) != dim)
    throw ValidationError(where + ": expected " + std::to_string(dim) + " rows");
  Matrix m(dim, dim);
  for (Index r = 0; r < dim; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || Index(row.size()) != dim)
      throw ValidationError(where + ": row " + std::to_string(r) + " must have " +
                            std::to_string(dim) + " entries");
    for (Index c = 0; c < dim; ++c)
      m(r, c) = parse_complex(row[c], where + "[" + std::to_string(r) + "][" +
                                          std::to_string(c) + "]");
  }
  return m;
}

inline Vector parse_vector(const nlohmann::json& j, Index dim, const std::string& where) {
  if (!j.is_array() || Index(j.size()) != dim)
    throw ValidationError(where + ": expected " + std::to_string(dim) + " entries");
  Vector v(dim);
  for (Index i = 0; i < dim; ++i)
    v(i) = parse_complex(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Program files
// ---------------------------------------------------------------------------

struct ProgramFile {
  Program program;
  std::optional<Vector> initial_ket;
  std::optional<Matrix> initial_density;
};

inline ProgramFile parse_program_file(const std::string& text, const Tolerance& tol = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("program file: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("program file: top level must be an object");
  if (!j.contains("format_version") || !j["format_version"].is_number_integer())
    throw ValidationError("program file: missing integer field 'format_version'");
  if (j["format_version"].get<int>() != kProgramFormatVersion)
    throw ValidationError("program file: unsupported format_version " +
                          j["format_version"].dump());
  if (!j.contains("dimension") || !j["dimension"].is_number_integer())
    throw ValidationError("program file: missing integer field 'dimension'");
  const Index dim = j["dimension"].get<Index>();
  if (dim < 1) throw ValidationError("program file: dimension must be >= 1");

  if (!j.contains("kraus_sets") || !j["kraus_sets"].is_array() || j["kraus_sets"].empty())
    throw ValidationError("program file: 'kraus_sets' must be a non-empty array");
  std::vector<SuperOperator> procs;
  for (std::size_t i = 0; i < j["kraus_sets"].size(); ++i) {
    const auto& set = j["kraus_sets"][i];
    const std::string where = "kraus_sets[" + std::to_string(i) + "]";
    if (!set.is_array() || set.empty())
      throw ValidationError("program file: " + where + " must be a non-empty array of matrices");
    std::vector<Matrix> kraus;
    for (std::size_t k = 0; k < set.size(); ++k)
      kraus.push_back(detail::parse_matrix(set[k], dim, where + "[" + std::to_string(k) + "]"));
    procs.emplace_back(std::move(kraus), KrausKind::trace_preserving, tol);
  }

  if (!j.contains("measurement") || !j["measurement"].is_object())
    throw ValidationError("program file: missing object field 'measurement'");
  const auto& meas = j["measurement"];
  if (!meas.contains("m0") || !meas.contains("m1"))
    throw ValidationError("program file: measurement needs fields 'm0' and 'm1'");
  Measurement measurement(detail::parse_matrix(meas["m0"], dim, "measurement.m0"),
                          detail::parse_matrix(meas["m1"], dim, "measurement.m1"), tol);

  ProgramFile out;
  out.program = Program(std::move(procs), std::move(measurement), tol);

  if (j.contains("initial_state")) {
    const auto& st = j["initial_state"];
    if (st.is_array() && !st.empty() && st[0].is_array() && !st[0].empty() &&
        st[0][0].is_array()) {
      out.initial_density = detail::parse_matrix(st, dim, "initial_state");
    } else {
      out.initial_ket = detail::parse_vector(st, dim, "initial_state");
    }
  }
  return out;
}

inline std::string write_program_file(const Program& p,
                                      const std::optional<Vector>& initial_ket = std::nullopt,
                                      const std::optional<Matrix>& initial_density =
                                          std::nullopt) {
  nlohmann::json j;
  j["format_version"] = kProgramFormatVersion;
  j["dimension"] = p.dim;
  nlohmann::json sets = nlohmann::json::array();
  for (const SuperOperator& e : p.processes) {
    nlohmann::json set = nlohmann::json::array();
    for (const Matrix& k : e.kraus) set.push_back(matrix_to_json(k));
    sets.push_back(std::move(set));
  }
  j["kraus_sets"] = std::move(sets);
  j["measurement"] = {{"m0", matrix_to_json(p.measurement.m0)},
                      {"m1", matrix_to_json(p.measurement.m1)}};
  if (initial_ket) j["initial_state"] = vector_to_json(*initial_ket);
  else if (initial_density) j["initial_state"] = matrix_to_json(*initial_density);
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Ket pretty-printing: coefficients matching 0, ±1, ±1/√2, ±1/√3, ±1/√6
// within 1e-9 are rendered symbolically, anything else as a decimal.
// ---------------------------------------------------------------------------

namespace detail {

inline std::optional<std::string> symbolic_magnitude(double v) {
  static const struct {
    double value;
    const char* text;
  } table[] = {
      {1.0, "1"},
      {1.0 / std::sqrt(2.0), "1/√2"},
      {1.0 / std::sqrt(3.0), "1/√3"},
      {1.0 / std::sqrt(6.0), "1/√6"},
  };
  for (const auto& entry : table)
    if (std::abs(v - entry.value) < 1e-9) return std::string(entry.text);
  return std::nullopt;
}

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

// "a" / "a+bi" with symbolic magnitudes where they apply; used for single
// coefficients inside ket expressions.
inline std::string format_coefficient(const Complex& c) {
  const bool imag_negligible = std::abs(c.imag()) < 1e-9;
  const bool real_negligible = std::abs(c.real()) < 1e-9;
  if (imag_negligible) {
    const std::string sign = c.real() < 0 ? "-" : "";
    if (auto sym = detail::symbolic_magnitude(std::abs(c.real()))) return sign + *sym;
    return detail::format_real(c.real());
  }
  if (real_negligible) {
    const std::string sign = c.imag() < 0 ? "-" : "";
    if (auto sym = detail::symbolic_magnitude(std::abs(c.imag()))) {
      if (*sym == "1") return sign + "i";
      return sign + "(" + *sym + ")i";
    }
    return detail::format_real(c.imag()) + "i";
  }
  return "(" + detail::format_real(c.real()) + (c.imag() < 0 ? "" : "+") +
         detail::format_real(c.imag()) + "i)";
}

inline std::string format_ket(const Vector& v) {
  std::string out;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) < 1e-9) continue;
    std::string coeff = format_coefficient(v(i));
    bool negative = false;
    if (!coeff.empty() && coeff[0] == '-') {
      negative = true;
      coeff.erase(coeff.begin());
    }
    if (out.empty()) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    if (coeff == "1") coeff.clear();
    else if (coeff.find('/') != std::string::npos && coeff[0] != '(')
      coeff = "(" + coeff + ")";
    out += coeff + "|" + std::to_string(i) + ">";
  }
  if (out.empty()) out = "0";
  return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct ToolMeta {
  std::string command;
  Tolerance tol;
  int max_iterations = 64;
  int horizon = 200;
  double wall_time_ms = 0.0;
};

inline nlohmann::json subspace_to_json(const Subspace& s) {
  nlohmann::json j;
  j["dimension"] = s.dim();
  nlohmann::json basis = nlohmann::json::array();
  for (Index c = 0; c < s.basis.cols(); ++c) basis.push_back(vector_to_json(s.basis.col(c)));
  j["basis"] = std::move(basis);
  return j;
}

inline nlohmann::json union_to_json(const SubspaceUnion& u,
                                    const std::vector<std::string>* labels = nullptr) {
  nlohmann::json comps = nlohmann::json::array();
  for (std::size_t i = 0; i < u.components.size(); ++i) {
    nlohmann::json c = subspace_to_json(u.components[i]);
    if (labels && i < labels->size()) c["fragment"] = (*labels)[i];
    comps.push_back(std::move(c));
  }
  return nlohmann::json{{"components", std::move(comps)}};
}

inline nlohmann::json meta_to_json(const ToolMeta& meta) {
  return nlohmann::json{
      {"name", "qtc"},
      {"command", meta.command},
      {"tolerances",
       {{"eps_rank", meta.tol.eps_rank},
        {"eps_contain", meta.tol.eps_contain},
        {"eps_prob", meta.tol.eps_prob}}},
      {"max_iterations", meta.max_iterations},
      {"horizon", meta.horizon},
      {"wall_time_ms", meta.wall_time_ms}};
}

inline nlohmann::json report_check(const Verdict& v, const ToolMeta& meta) {
  nlohmann::json j;
  j["format_version"] = kReportFormatVersion;
  j["tool"] = meta_to_json(meta);
  j["verdict"] = {
      {"terminating", v.terminating},
      {"reachable", subspace_to_json(v.reachable)},
      {"pd", union_to_json(v.pd, &v.pd_labels)},
      {"intersection", union_to_json(v.intersection)},
      {"diagnostics",
       {{"fragile_containments", v.diagnostics.fragile_containments},
        {"pd_iterations", v.diagnostics.pd_iterations},
        {"reachability_residual_computations",
         v.diagnostics.reachability_residual_computations}}}};
  j["verdict"]["witness_vector"] =
      v.witness_vector ? vector_to_json(*v.witness_vector) : nlohmann::json();
  j["verdict"]["witness_schedule"] =
      v.witness_schedule ? nlohmann::json(v.witness_schedule->str()) : nlohmann::json();
  return j;
}

inline nlohmann::json report_reach(const Subspace& s, const ReachabilityStats& stats,
                                   const ToolMeta& meta) {
  nlohmann::json j;
  j["format_version"] = kReportFormatVersion;
  j["tool"] = meta_to_json(meta);
  j["reachable"] = subspace_to_json(s);
  j["stats"] = {{"residual_computations", stats.residual_computations},
                {"kraus_count", stats.kraus_count}};
  return j;
}

inline nlohmann::json report_diverge(const DivergenceResult& d, const ToolMeta& meta) {
  nlohmann::json j;
  j["format_version"] = kReportFormatVersion;
  j["tool"] = meta_to_json(meta);
  j["pd"] = union_to_json(d.pd, &d.fragment_labels);
  j["iterations"] = d.iterations;
  j["converged"] = d.converged;
  j["diagnostics"] = {{"fragile_containments", d.diagnostics.fragile}};
  return j;
}

inline nlohmann::json report_simulate(const std::vector<SimStep>& trace,
                                      const ScheduleFragment& f, const ToolMeta& meta) {
  nlohmann::json j;
  j["format_version"] = kReportFormatVersion;
  j["tool"] = meta_to_json(meta);
  j["schedule"] = f.str();
  nlohmann::json steps = nlohmann::json::array();
  for (const SimStep& s : trace)
    steps.push_back({{"step", s.step},
                     {"state_trace", s.state_trace},
                     {"halt_probability", s.halt_probability},
                     {"cumulative", s.cumulative}});
  j["trace"] = std::move(steps);
  j["final_cumulative"] = trace.empty() ? 0.0 : trace.back().cumulative;
  return j;
}

// ---------------------------------------------------------------------------
// Text rendering
// ---------------------------------------------------------------------------

inline std::string text_subspace(const Subspace& s, const std::string& indent = "  ") {
  std::string out;
  if (s.dim() == 0) return indent + "(zero subspace)\n";
  for (Index c = 0; c < s.basis.cols(); ++c)
    out += indent + "b" + std::to_string(c + 1) + " = " + format_ket(s.basis.col(c)) + "\n";
  return out;
}

inline std::string text_union(const SubspaceUnion& u,
                              const std::vector<std::string>* labels = nullptr) {
  if (u.components.empty()) return "  {0}\n";
  std::string out;
  for (std::size_t i = 0; i < u.components.size(); ++i) {
    out += "  component " + std::to_string(i + 1);
    if (labels && i < labels->size() && !(*labels)[i].empty())
      out += " (fragment \"" + (*labels)[i] + "\")";
    out += ", dim " + std::to_string(u.components[i].dim()) + ":\n";
    out += text_subspace(u.components[i], "    ");
  }
  return out;
}

inline std::string text_report_check(const Verdict& v, const ToolMeta& meta) {
  std::string out;
  out += "verdict: ";
  out += v.terminating ? "terminating (probability 1 under every schedule)\n"
                       : "NOT terminating\n";
  out += "reachable space, dim " + std::to_string(v.reachable.dim()) + ":\n";
  out += text_subspace(v.reachable);
  out += "diverging pure states (" + std::to_string(v.pd.components.size()) +
         " component(s), " + std::to_string(v.diagnostics.pd_iterations) + " iteration(s)):\n";
  out += text_union(v.pd, &v.pd_labels);
  out += "intersection with reachable space:\n";
  out += text_union(v.intersection);
  if (v.witness_vector) out += "witness vector: " + format_ket(*v.witness_vector) + "\n";
  if (v.witness_schedule) out += "witness schedule: " + v.witness_schedule->str() + "\n";
  if (v.diagnostics.fragile_containments > 0)
    out += "warning: " + std::to_string(v.diagnostics.fragile_containments) +
           " fragile containment decision(s)\n";
  out += "wall time: " + detail::format_real(meta.wall_time_ms) + " ms\n";
  return out;
}

inline std::string text_report_reach(const Subspace& s, const ReachabilityStats& stats,
                                     const ToolMeta& meta) {
  std::string out = "reachable space, dim " + std::to_string(s.dim()) + ":\n";
  out += text_subspace(s);
  out += "residual computations: " + std::to_string(stats.residual_computations) + "\n";
  out += "wall time: " + detail::format_real(meta.wall_time_ms) + " ms\n";
  return out;
}

inline std::string text_report_diverge(const DivergenceResult& d, const ToolMeta& meta) {
  std::string out = "diverging pure states (" + std::to_string(d.pd.components.size()) +
                    " component(s), converged after " + std::to_string(d.iterations) +
                    " iteration(s)):\n";
  out += text_union(d.pd, &d.fragment_labels);
  if (d.diagnostics.fragile > 0)
    out += "warning: " + std::to_string(d.diagnostics.fragile) +
           " fragile containment decision(s)\n";
  out += "wall time: " + detail::format_real(meta.wall_time_ms) + " ms\n";
  return out;
}

inline std::string text_report_simulate(const std::vector<SimStep>& trace,
                                        const ScheduleFragment& f, const ToolMeta& meta) {
  std::string out = "schedule: " + (f.empty() ? std::string("(empty)") : f.str()) + "\n";
  out += "step  state_trace     halt_prob       cumulative\n";
  char buf[96];
  for (const SimStep& s : trace) {
    std::snprintf(buf, sizeof(buf), "%-5d %-15.10g %-15.10g %-15.10g\n", s.step,
                  s.state_trace, s.halt_probability, s.cumulative);
    out += buf;
  }
  if (!trace.empty()) {
    std::snprintf(buf, sizeof(buf), "termination probability within schedule: %.10g\n",
                  trace.back().cumulative);
    out += buf;
  }
  out += "wall time: " + detail::format_real(meta.wall_time_ms) + " ms\n";
  return out;
}

}  // namespace qtc
