#pragma once

#include "vem/variation.hpp"

namespace vem {

/// Costates reconstructed analytically from primal quantities:
///   gamma(t) = phi_x(t) + Phi^T(t_f, t) g_x^T pi + tail(t),
/// sharing the tail integral of the gradient field. H holds the nodal
/// Hamiltonian values L + gamma^T f.
struct CostateTrajectory {
  Matrix gamma;  ///< n x N
  Vector pi_bar; ///< identical to the multiplier pi by construction
  Vector hamiltonian;  ///< length N
};

CostateTrajectory reconstruct_costates(const ProblemModel& problem,
                                       const TrajectoryGrid& traj,
                                       const TransitionSet& ts, const Vector& pi,
                                       Exec exec = Exec::Parallel);
CostateTrajectory reconstruct_costates(const ProblemModel& problem,
                                       const TrajectoryGrid& traj,
                                       const TransitionSet& ts, const Vector& pi,
                                       const NodalData& nodes,
                                       Exec exec = Exec::Parallel);

struct OptimalityResiduals {
  double control = 0.0;        ///< max_i |p_u + f_u^T Phi^T g_x^T pi|_inf
  double terminal_time = 0.0;  ///< |(phi_t + phi_x^T f + L + pi^T(g_x f + g_t))|_{t_f}|, 0 in Fixed mode
};

OptimalityResiduals optimality_residuals(const ProblemModel& problem,
                                         const TrajectoryGrid& traj,
                                         const TransitionSet& ts,
                                         const GradientField& gf,
                                         const Vector& pi,
                                         Exec exec = Exec::Parallel);
OptimalityResiduals optimality_residuals(const ProblemModel& problem,
                                         const TrajectoryGrid& traj,
                                         const TransitionSet& ts,
                                         const GradientField& gf, const Vector& pi,
                                         const NodalData& nodes,
                                         Exec exec = Exec::Parallel);

/// Residual norms of the classical first-order conditions evaluated with the
/// reconstructed costates. Diagnostic only; nothing here feeds the evolution.
struct ClassicalConditionReport {
  double costate_ode = 0.0;      ///< central-diff dgamma/dt + L_x + f_x^T gamma
  double hamiltonian_u = 0.0;    ///< |L_u + f_u^T gamma|_inf over nodes
  double transversality_time = 0.0;   ///< |H + phi_t + pi^T g_t| at t_f, 0 in Fixed mode
  double transversality_state = 0.0;  ///< |gamma(t_f) - phi_x - g_x^T pi|_inf
};

ClassicalConditionReport classical_condition_check(const ProblemModel& problem,
                                                   const CostateTrajectory& ct,
                                                   const TrajectoryGrid& traj);

/// Scaled residual of the gain-independent stationarity system stacked from
/// the constraint-propagated Gram blocks. For fixed terminal time only the
/// integral rows enter; q == 0 returns 0 by definition.
double stationarity_check(const ProblemModel& problem, const TrajectoryGrid& traj,
                          const TransitionSet& ts, const GradientField& gf,
                          const Vector& pi, Exec exec = Exec::Parallel);

}  // namespace vem
