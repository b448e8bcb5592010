#pragma once

#include <vector>

#include "vem/model.hpp"

namespace vem {

/// Fundamental matrices of the dynamics linearized along a trajectory:
/// psi[i] = Phi(t_i, t0), with precomputed inverses. Any Phi(t_i, t_j) is
/// formed as psi[i] * psi_inv[j], so the semigroup property holds by
/// construction and storage stays O(N n^2).
struct TransitionSet {
  std::vector<Matrix> psi;
  std::vector<Matrix> psi_inv;
  double cond_max = 0.0;  ///< max condition estimate over nodes

  int node_count() const { return static_cast<int>(psi.size()); }
};

/// Integrates dPsi/dt = f_x(t) Psi, Psi(t0) = I, node to node with classical
/// RK4; f_x is interpolated linearly between nodal values. Inverses come from
/// LU factorization and are re-verified against the identity. Throws
/// TransitionConditioningError when a node's condition estimate exceeds 1e12
/// or the inverse check fails.
TransitionSet build_transition_set(const ProblemModel& problem,
                                   const TrajectoryGrid& traj,
                                   Exec exec = Exec::Parallel);
TransitionSet build_transition_set(const ProblemModel& problem,
                                   const TrajectoryGrid& traj,
                                   const NodalData& nodes,
                                   Exec exec = Exec::Parallel);

/// Phi(t_i, t_j). The i == j case returns the identity without arithmetic.
Matrix transition(const TransitionSet& ts, int i, int j);

}  // namespace vem
