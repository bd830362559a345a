#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qtc/program.hpp"

namespace qtc {

// Raised when the diverging-states iteration hits its cap. No a-priori
// bound on the number of iterations exists, so the cap is an engineering
// guard; the last two component sets are carried for inspection.
class IterationCapExceeded : public Error {
 public:
  IterationCapExceeded(const std::string& what, SubspaceUnion previous, SubspaceUnion current)
      : Error(what), previous_union(std::move(previous)), current_union(std::move(current)) {}

  SubspaceUnion previous_union;
  SubspaceUnion current_union;
};

struct DivergenceResult {
  SubspaceUnion pd;
  std::vector<std::string> fragment_labels;  // per component of pd
  int iterations = 0;                        // iteration at which the fixpoint test passed
  bool converged = false;
  ContainmentDiagnostics diagnostics;
};

// H_0 = { psi : M0 psi = 0 }, the states the termination measurement cannot
// halt. Equals the diverging set of the empty fragment.
inline Subspace h_zero_subspace(const Program& p, const Tolerance& tol = {}) {
  return Subspace(p.dim, null_space(p.measurement.m0, tol), tol);
}

namespace detail {

struct LabeledComponents {
  std::vector<Subspace> spaces;
  std::vector<std::string> labels;
};

// One refinement round: PD_{kf} = H_0 n T_k^{-1}(PD_f) for every component
// PD_f and process k, canonicalized (duplicates and absorbed components
// dropped) to keep the component count bounded.
inline LabeledComponents pd_step_labeled(const std::vector<TransitionOp>& ts,
                                         const Subspace& h0, const LabeledComponents& prev,
                                         const Tolerance& tol,
                                         ContainmentDiagnostics* diag) {
  LabeledComponents raw;
  for (std::size_t c = 0; c < prev.spaces.size(); ++c) {
    for (std::size_t k = 0; k < ts.size(); ++k) {
      raw.spaces.push_back(intersect(h0, preimage_subspace(ts[k], prev.spaces[c], tol), tol));
      raw.labels.push_back(std::to_string(k + 1) + prev.labels[c]);
    }
  }
  LabeledComponents kept;
  for (std::size_t i : canonical_component_indices(raw.spaces, tol, diag)) {
    kept.spaces.push_back(std::move(raw.spaces[i]));
    kept.labels.push_back(std::move(raw.labels[i]));
  }
  return kept;
}

}  // namespace detail

// One refinement round over a canonical union (labels dropped).
inline SubspaceUnion pd_step(const Program& p, const SubspaceUnion& j_prev,
                             const Tolerance& tol = {},
                             ContainmentDiagnostics* diag = nullptr) {
  const Subspace h0 = h_zero_subspace(p, tol);
  const auto ts = detail::all_transitions(p, tol);
  detail::LabeledComponents prev;
  prev.spaces = j_prev.components;
  prev.labels.assign(j_prev.components.size(), std::string());
  auto next = detail::pd_step_labeled(ts, h0, prev, tol, diag);
  return SubspaceUnion(p.dim, std::move(next.spaces));
}

// Diverging set of a single fragment, evaluated by direct recursion:
// the empty fragment gives H_0, and PD_{kf} = H_0 n T_k^{-1}(PD_f).
inline Subspace pd_fragment(const Program& p, const ScheduleFragment& f,
                            const Tolerance& tol = {}) {
  const Subspace h0 = h_zero_subspace(p, tol);
  Subspace result = h0;
  for (auto it = f.indices.rbegin(); it != f.indices.rend(); ++it) {
    if (*it < 1 || *it > p.process_count())
      throw IndexOutOfRange("pd_fragment: process index " + std::to_string(*it));
    result = intersect(h0, preimage_subspace(transition(p, *it, tol), result, tol), tol);
  }
  return result;
}

// The diverging pure states PD as a finite union of subspaces. Iterates
// the refinement from J_1 = {H_0} and stops once every component of the
// previous round lies inside some component of the new round; the
// descending chain of unions then has stabilized and the previous round is
// PD. Zero components are dropped throughout; an empty union denotes {0}.
inline DivergenceResult diverging_states(const Program& p, const Tolerance& tol = {},
                                         int max_iter = 64) {
  if (max_iter < 1) throw ValidationError("diverging_states: max_iter must be >= 1");
  const Subspace h0 = h_zero_subspace(p, tol);
  const auto ts = detail::all_transitions(p, tol);

  DivergenceResult out;
  detail::LabeledComponents current;
  current.spaces = {h0};
  current.labels = {std::string()};

  for (int iter = 1; iter <= max_iter; ++iter) {
    auto next = detail::pd_step_labeled(ts, h0, current, tol, &out.diagnostics);

    bool stable = true;
    for (const Subspace& prev_comp : current.spaces) {
      if (prev_comp.dim() == 0) continue;
      bool inside = false;
      for (const Subspace& q : next.spaces)
        if (contains(q, prev_comp, tol, &out.diagnostics)) {
          inside = true;
          break;
        }
      if (!inside) {
        stable = false;
        break;
      }
    }

    if (stable) {
      std::vector<Subspace> comps;
      std::vector<std::string> labels;
      for (std::size_t i : canonical_component_indices(current.spaces, tol, &out.diagnostics)) {
        comps.push_back(std::move(current.spaces[i]));
        labels.push_back(std::move(current.labels[i]));
      }
      out.pd = SubspaceUnion(p.dim, std::move(comps));
      out.fragment_labels = std::move(labels);
      out.iterations = iter;
      out.converged = true;
      return out;
    }
    if (iter == max_iter) {
      throw IterationCapExceeded(
          "diverging_states: no fixpoint after " + std::to_string(max_iter) + " iterations",
          SubspaceUnion(p.dim, current.spaces), SubspaceUnion(p.dim, next.spaces));
    }
    current = std::move(next);
  }
  return out;  // unreachable
}

// Finite-depth membership check, independent of the subspace machinery:
// true iff some fragment of the given length never halts the state, found
// by exhaustive search over fragments. Prefixes whose termination
// probability already exceeds eps_prob are cut; extensions only grow it.
inline bool pd_membership_oracle(const Program& p, const Vector& psi, int depth,
                                 const Tolerance& tol = {},
                                 std::uint64_t fragment_cap = (1u << 20)) {
  if (psi.size() != p.dim)
    throw DimensionMismatch("pd_membership_oracle: state dimension mismatch");
  if (std::abs(psi.norm() - 1.0) > 1e-6)
    throw ValidationError("pd_membership_oracle: psi must be a unit vector");
  if (depth < 0) throw ValidationError("pd_membership_oracle: negative depth");
  const double count = std::pow(double(p.process_count()), double(depth));
  if (count > double(fragment_cap))
    throw SearchSpaceTooLarge("pd_membership_oracle: " + std::to_string(count) +
                              " fragments exceeds cap");

  const auto ts = detail::all_transitions(p, tol);
  const Matrix& m0 = p.measurement.m0;

  struct Search {
    const std::vector<TransitionOp>& ts;
    const Matrix& m0;
    double eps;

    bool diverging(const Matrix& state, double accumulated, int remaining) const {
      if (accumulated > eps) return false;
      if (remaining == 0) return true;
      for (const TransitionOp& t : ts) {
        const Matrix next = apply_to_operator(t, state);
        const double p0 = detail::outcome_probability(m0, next);
        if (diverging(next, accumulated + p0, remaining - 1)) return true;
      }
      return false;
    }
  } search{ts, m0, tol.eps_prob};

  const Matrix state = psi * psi.adjoint();
  return search.diverging(state, detail::outcome_probability(m0, state), depth);
}

}  // namespace qtc
