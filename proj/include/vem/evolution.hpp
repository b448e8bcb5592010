#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vem/diagnostics.hpp"
#include "vem/variation.hpp"

namespace vem {

struct EvolutionConfig {
  double tau_max = 300.0;
  double rel_tol = 1e-3;   ///< variation-time integrator relative tolerance
  double abs_tol = 1e-6;   ///< variation-time integrator absolute tolerance
  double residual_tol = 1e-6;   ///< stop when both optimality residuals fall below
  double snapshot_every = 1.0;  ///< history record interval in variation time
  double feasibility_tol = 0.05;  ///< ceiling on the initial residuals; drift aborts at 10x

  /// Transport stored nodal values with the moving node times when t_f
  /// evolves. Without it the grid compresses under the stored fields and the
  /// terminal constraint drifts by orders of magnitude more.
  bool grid_advection = true;

  Exec exec = Exec::Parallel;
};

enum class StopReason { ResidualMet, TauMaxReached, Diverged, FeasibilityLost };

const char* to_string(StopReason reason);

struct Snapshot {
  double tau = 0.0;
  double J = 0.0;
  double residual_u = 0.0;
  double residual_tf = 0.0;
  double t_f = 0.0;
  double g_drift = 0.0;       ///< |g(x(t_f), t_f)|_inf
  double dyn_residual = 0.0;  ///< central-difference dynamics residual
  Vector pi;                  ///< empty when q == 0
};

struct SolveReport {
  std::vector<Snapshot> history;
  TrajectoryGrid trajectory;  ///< state at the last recorded snapshot
  StopReason stop_reason = StopReason::TauMaxReached;
  std::string message;  ///< failure detail for Diverged / FeasibilityLost
  long rhs_evaluations = 0;
  long steps_accepted = 0;
  long steps_rejected = 0;
};

/// Observer invoked at every snapshot with the full trajectory.
using SnapshotCallback =
    std::function<void(const Snapshot&, const TrajectoryGrid&)>;

/// Flat layout [x row-major | u row-major | t_f if Free]; round-trips exactly.
Vector pack_state(const TrajectoryGrid& traj, TerminalTimeMode mode);
TrajectoryGrid unpack_state(const ProblemModel& problem, const Vector& flat,
                            int node_count);

/// One evaluation of the semi-discretized evolution equations: transition set,
/// gradient field, multiplier solve, control/terminal-time rates, state rate,
/// packed back into the flat layout. `grid_advection` adds the moving-grid
/// transport term to the stored nodal rates for free terminal time.
Vector epde_rhs(const ProblemModel& problem, const GainConfig& gains,
                int node_count, const Vector& flat, bool grid_advection = true,
                Exec exec = Exec::Parallel);

/// Per-snapshot diagnostic bundle shared by evolve and the test suites.
Snapshot evaluate_snapshot(const ProblemModel& problem, const TrajectoryGrid& traj,
                           const GainConfig& gains, double tau,
                           Exec exec = Exec::Parallel);

/// Integrates the semi-discrete initial-value problem in variation time from
/// a feasible initial trajectory until the optimality residuals meet
/// residual_tol, tau_max is reached, feasibility drifts past 10x the
/// tolerance, or the right side fails. Throws InfeasibleInitError when the
/// initial trajectory violates feasibility_tol; rhs failures are reported via
/// stop_reason = Diverged.
SolveReport evolve(const ProblemModel& problem, const TrajectoryGrid& init,
                   const GainConfig& gains, const EvolutionConfig& cfg,
                   const SnapshotCallback& on_snapshot = {});

}  // namespace vem
