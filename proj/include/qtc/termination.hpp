#pragma once

#include <limits>
#include <optional>

#include "qtc/divergence.hpp"
#include "qtc/reachability.hpp"

namespace qtc {

struct AnalysisDiagnostics {
  int fragile_containments = 0;
  int pd_iterations = 0;
  int reachability_residual_computations = 0;
};

// Outcome of the termination check. The program terminates with
// probability 1 from rho exactly when the reachable space meets the
// diverging pure states only in {0}; otherwise any unit vector of the
// intersection witnesses divergence, together with a schedule that keeps
// its termination probability at zero.
struct Verdict {
  bool terminating = false;
  Subspace reachable;
  SubspaceUnion pd;
  std::vector<std::string> pd_labels;
  SubspaceUnion intersection;
  std::optional<Vector> witness_vector;
  std::optional<ScheduleFragment> witness_schedule;
  AnalysisDiagnostics diagnostics;
};

// Greedy divergence schedule from a state inside PD: at each step take the
// smallest process index whose transition keeps the support of the current
// state inside some PD component. Deterministic, reproducible traces.
inline ScheduleFragment adversarial_schedule(const Program& p, const Vector& psi,
                                             const SubspaceUnion& pd, int horizon,
                                             const Tolerance& tol = {}) {
  if (psi.size() != p.dim)
    throw DimensionMismatch("adversarial_schedule: state dimension mismatch");
  if (!union_contains_subspace(pd, Subspace::line(psi, tol), tol))
    throw NoDivergingStep("adversarial_schedule: initial state is not inside PD");

  const auto ts = detail::all_transitions(p, tol);
  Matrix state = psi * psi.adjoint() / psi.squaredNorm();
  std::vector<int> schedule;
  schedule.reserve(horizon);
  for (int step = 0; step < horizon; ++step) {
    bool advanced = false;
    for (std::size_t k = 0; k < ts.size() && !advanced; ++k) {
      const Matrix next = apply_to_operator(ts[k], state);
      const Subspace sup = support(next, tol);
      if (sup.dim() > 0 && union_contains_subspace(pd, sup, tol)) {
        schedule.push_back(static_cast<int>(k + 1));
        state = next;
        advanced = true;
      }
    }
    if (!advanced)
      throw NoDivergingStep("adversarial_schedule: no process keeps the state diverging at step " +
                            std::to_string(step));
  }
  return ScheduleFragment(std::move(schedule));
}

// min over fragments of length `length` of t_f(rho): a certified lower
// bound on the infimum termination probability, nondecreasing in length.
// Branch and bound: t only grows along extensions, so a prefix at or above
// the incumbent minimum cannot improve it.
inline double infimum_lower_bound(const Program& p, const DensityOperator& rho, int length,
                                  const Tolerance& tol = {},
                                  std::uint64_t fragment_cap = (1u << 20)) {
  if (rho.dim() != p.dim)
    throw DimensionMismatch("infimum_lower_bound: state dimension mismatch");
  if (length < 0) throw ValidationError("infimum_lower_bound: negative length");
  const double count = std::pow(double(p.process_count()), double(length));
  if (count > double(fragment_cap))
    throw SearchSpaceTooLarge("infimum_lower_bound: " + std::to_string(count) +
                              " fragments exceeds cap");

  const auto ts = detail::all_transitions(p, tol);
  const Matrix& m0 = p.measurement.m0;

  struct Search {
    const std::vector<TransitionOp>& ts;
    const Matrix& m0;
    double best = std::numeric_limits<double>::infinity();

    void visit(const Matrix& state, double accumulated, int remaining) {
      if (accumulated >= best) return;
      if (remaining == 0) {
        best = accumulated;
        return;
      }
      for (const TransitionOp& t : ts) {
        const Matrix next = apply_to_operator(t, state);
        visit(next, accumulated + detail::outcome_probability(m0, next), remaining - 1);
      }
    }
  } search{ts, m0};

  search.visit(rho.mat, detail::outcome_probability(m0, rho.mat), length);
  return search.best;
}

struct SimStep {
  int step = 0;
  double state_trace = 0.0;
  double halt_probability = 0.0;  // tr(M0 state M0†) at this step
  double cumulative = 0.0;        // termination probability within the prefix
};

// Step-by-step execution record along a fragment. Record n holds the state
// T_{f(<=n)}(rho); its cumulative column equals t_{f(<=n)}(rho), so the
// final record carries termination_prob_fragment(p, f, rho).
inline std::vector<SimStep> simulate(const Program& p, const ScheduleFragment& f,
                                     const DensityOperator& rho, const Tolerance& tol = {}) {
  if (rho.dim() != p.dim) throw DimensionMismatch("simulate: state dimension mismatch");
  const auto ts = detail::all_transitions(p, tol);

  std::vector<SimStep> trace;
  trace.reserve(f.size() + 1);
  Matrix state = rho.mat;
  double cumulative = 0.0;

  const auto record = [&](int step) {
    SimStep s;
    s.step = step;
    s.state_trace = state.trace().real();
    s.halt_probability = detail::outcome_probability(p.measurement.m0, state);
    cumulative += s.halt_probability;
    s.cumulative = cumulative;
    trace.push_back(s);
  };

  record(0);
  for (std::size_t n = 0; n < f.indices.size(); ++n) {
    const int i = f.indices[n];
    if (i < 1 || i > p.process_count())
      throw IndexOutOfRange("simulate: process index " + std::to_string(i));
    state = apply_to_operator(ts[i - 1], state);
    record(static_cast<int>(n + 1));
  }
  return trace;
}

// Decides termination with probability 1 from rho; on a negative verdict
// extracts a diverging witness vector and schedule.
inline Verdict check_termination(const Program& p, const DensityOperator& rho,
                                 const Tolerance& tol = {}, int max_iter = 64,
                                 int witness_horizon = 20) {
  if (std::abs(rho.trace() - 1.0) > tol.eps_prob)
    throw ValidationError("check_termination: input state must have unit trace");

  Verdict v;
  ReachabilityStats stats;
  v.reachable = reachable_space(p, rho, tol, &stats);
  v.diagnostics.reachability_residual_computations = stats.residual_computations;

  DivergenceResult dv = diverging_states(p, tol, max_iter);
  v.pd = std::move(dv.pd);
  v.pd_labels = std::move(dv.fragment_labels);
  v.diagnostics.pd_iterations = dv.iterations;
  v.diagnostics.fragile_containments = dv.diagnostics.fragile;

  ContainmentDiagnostics diag;
  v.intersection = union_intersect_subspace(v.pd, v.reachable, tol, &diag);
  v.diagnostics.fragile_containments += diag.fragile;

  v.terminating = v.intersection.is_zero();
  if (!v.terminating) {
    v.witness_vector = v.intersection.components.front().basis.col(0);
    v.witness_schedule = adversarial_schedule(p, *v.witness_vector, v.pd, witness_horizon, tol);
  }
  return v;
}

}  // namespace qtc
