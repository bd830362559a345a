#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qtc/channel.hpp"

namespace qtc {

// A finite sequence of 1-based process indices; the empty sequence is the
// empty schedule fragment.
struct ScheduleFragment {
  std::vector<int> indices;

  ScheduleFragment() = default;
  explicit ScheduleFragment(std::vector<int> idx) : indices(std::move(idx)) {
    for (int i : indices)
      if (i < 1) throw IndexOutOfRange("ScheduleFragment: indices are 1-based");
  }

  // Accepts either a digit string ("1212") or a comma-separated list
  // ("1,2,12"). The empty string is the empty fragment.
  static ScheduleFragment parse(const std::string& text) {
    std::vector<int> idx;
    if (text.empty()) return ScheduleFragment();
    if (text.find(',') == std::string::npos) {
      for (char c : text) {
        if (c < '1' || c > '9')
          throw ValidationError("ScheduleFragment: invalid character '" + std::string(1, c) +
                                "' in schedule");
        idx.push_back(c - '0');
      }
    } else {
      std::size_t pos = 0;
      while (pos <= text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        const std::string tok = text.substr(pos, next - pos);
        try {
          std::size_t used = 0;
          const int v = std::stoi(tok, &used);
          if (used != tok.size() || v < 1) throw std::invalid_argument(tok);
          idx.push_back(v);
        } catch (const std::exception&) {
          throw ValidationError("ScheduleFragment: invalid index '" + tok + "'");
        }
        pos = next + 1;
      }
    }
    return ScheduleFragment(std::move(idx));
  }

  std::string str() const {
    bool digits = true;
    for (int i : indices)
      if (i > 9) digits = false;
    std::string out;
    for (std::size_t k = 0; k < indices.size(); ++k) {
      if (!digits && k > 0) out += ',';
      out += std::to_string(indices[k]);
    }
    return out;
  }

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }

  ScheduleFragment prefix(std::size_t n) const {
    if (n > indices.size()) n = indices.size();
    return ScheduleFragment(std::vector<int>(indices.begin(), indices.begin() + n));
  }
};

// A nondeterministic quantum program: m trace-preserving processes over a
// common state space plus the termination measurement.
struct Program {
  Index dim = 0;
  std::vector<SuperOperator> processes;
  Measurement measurement;

  Program() = default;

  Program(std::vector<SuperOperator> procs, Measurement meas, const Tolerance& tol = {})
      : dim(meas.dim()), processes(std::move(procs)), measurement(std::move(meas)) {
    if (processes.empty()) throw ValidationError("Program: needs at least one process");
    for (const SuperOperator& e : processes) {
      if (e.dim() != dim) throw DimensionMismatch("Program: process dimension mismatch");
      if (!e.trace_preserving())
        throw ValidationError("Program: processes must be trace-preserving");
    }
    (void)tol;
  }

  int process_count() const { return static_cast<int>(processes.size()); }
};

using TransitionOp = SuperOperator;

// The continue-then-step map of process i:
//   T_i(rho) = E_i(M1 rho M1†), Kraus set { E_{i,j} M1 }.
inline TransitionOp transition(const Program& p, int i, const Tolerance& tol = {}) {
  if (i < 1 || i > p.process_count())
    throw IndexOutOfRange("transition: process index " + std::to_string(i) + " of " +
                          std::to_string(p.process_count()));
  std::vector<Matrix> kraus;
  kraus.reserve(p.processes[i - 1].kraus.size());
  for (const Matrix& e : p.processes[i - 1].kraus) kraus.push_back(e * p.measurement.m1);
  return TransitionOp(std::move(kraus), KrausKind::trace_nonincreasing, tol);
}

namespace detail {

inline std::vector<TransitionOp> all_transitions(const Program& p, const Tolerance& tol = {}) {
  std::vector<TransitionOp> out;
  out.reserve(p.processes.size());
  for (int i = 1; i <= p.process_count(); ++i) out.push_back(transition(p, i, tol));
  return out;
}

inline double outcome_probability(const Matrix& m_op, const Matrix& state) {
  return (m_op * state * m_op.adjoint()).trace().real();
}

}  // namespace detail

// T_f = T_{s_n} o ... o T_{s_1} applied to rho; the empty fragment is the
// identity.
inline DensityOperator run_fragment(const Program& p, const ScheduleFragment& f,
                                    const DensityOperator& rho, const Tolerance& tol = {}) {
  if (rho.dim() != p.dim) throw DimensionMismatch("run_fragment: state dimension mismatch");
  const auto ts = detail::all_transitions(p, tol);
  Matrix state = rho.mat;
  for (int i : f.indices) {
    if (i < 1 || i > p.process_count())
      throw IndexOutOfRange("run_fragment: process index " + std::to_string(i));
    state = apply_to_operator(ts[i - 1], state);
  }
  return DensityOperator::unchecked(std::move(state));
}

// Probability of terminating within fragment f:
//   t_f(rho) = sum_{n=0}^{|f|} tr(M0 T_{f(<=n)}(rho) M0†).
// Cross-checked against the closed form tr(rho) - tr(M1 T_f(rho) M1†),
// which catches Kraus wiring mistakes.
inline double termination_prob_fragment(const Program& p, const ScheduleFragment& f,
                                        const DensityOperator& rho,
                                        const Tolerance& tol = {}) {
  if (rho.dim() != p.dim)
    throw DimensionMismatch("termination_prob_fragment: state dimension mismatch");
  const auto ts = detail::all_transitions(p, tol);
  Matrix state = rho.mat;
  double total = detail::outcome_probability(p.measurement.m0, state);
  for (int i : f.indices) {
    if (i < 1 || i > p.process_count())
      throw IndexOutOfRange("termination_prob_fragment: process index " + std::to_string(i));
    state = apply_to_operator(ts[i - 1], state);
    total += detail::outcome_probability(p.measurement.m0, state);
  }
  const double closed =
      rho.trace() - detail::outcome_probability(p.measurement.m1, state);
  if (std::abs(total - closed) > 1e-10 * std::max(1.0, rho.trace()))
    throw Error("termination_prob_fragment: summation and closed form disagree by " +
                std::to_string(std::abs(total - closed)));
  return total;
}

// The deterministic program whose single process is the arithmetic average
// of the m processes, Kraus set { E_{i,j} / sqrt(m) }. Shares the reachable
// space of the original program.
inline Program average_program(const Program& p, const Tolerance& tol = {}) {
  if (p.process_count() == 1) return p;
  const double scale = 1.0 / std::sqrt(static_cast<double>(p.process_count()));
  std::vector<Matrix> kraus;
  for (const SuperOperator& e : p.processes)
    for (const Matrix& k : e.kraus) kraus.push_back(scale * k);
  std::vector<SuperOperator> procs;
  procs.emplace_back(std::move(kraus), KrausKind::trace_preserving, tol);
  return Program(std::move(procs), p.measurement, tol);
}

// The averaged transition map T(rho) = (1/m) sum_i T_i(rho).
inline TransitionOp averaged_transition(const Program& p, const Tolerance& tol = {}) {
  return transition(average_program(p, tol), 1, tol);
}

}  // namespace qtc
