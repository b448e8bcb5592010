#include "vem/evolution.hpp"

#include <cmath>
#include <sstream>

#include "vem/errors.hpp"
#include "vem/rk45.hpp"

namespace vem {

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::ResidualMet: return "ResidualMet";
    case StopReason::TauMaxReached: return "TauMaxReached";
    case StopReason::Diverged: return "Diverged";
    case StopReason::FeasibilityLost: return "FeasibilityLost";
  }
  return "Unknown";
}

Vector pack_state(const TrajectoryGrid& traj, TerminalTimeMode mode) {
  const int N = traj.node_count();
  const int n = static_cast<int>(traj.x.rows());
  const int m = static_cast<int>(traj.u.rows());
  const bool free_tf = (mode == TerminalTimeMode::Free);
  Vector flat(n * N + m * N + (free_tf ? 1 : 0));
  for (int r = 0; r < n; ++r)
    for (int i = 0; i < N; ++i) flat[r * N + i] = traj.x(r, i);
  for (int r = 0; r < m; ++r)
    for (int i = 0; i < N; ++i) flat[n * N + r * N + i] = traj.u(r, i);
  if (free_tf) flat[n * N + m * N] = traj.t_f;
  return flat;
}

TrajectoryGrid unpack_state(const ProblemModel& p, const Vector& flat,
                            int node_count) {
  const int N = node_count;
  const bool free_tf = (p.tf_mode == TerminalTimeMode::Free);
  const long expected = static_cast<long>(p.n) * N + static_cast<long>(p.m) * N +
                        (free_tf ? 1 : 0);
  if (flat.size() != expected) {
    std::ostringstream os;
    os << "packed state has length " << flat.size() << ", expected " << expected;
    throw LayoutError(os.str());
  }
  Matrix x(p.n, N), u(p.m, N);
  for (int r = 0; r < p.n; ++r)
    for (int i = 0; i < N; ++i) x(r, i) = flat[r * N + i];
  for (int r = 0; r < p.m; ++r)
    for (int i = 0; i < N; ++i) u(r, i) = flat[p.n * N + r * N + i];
  const double t_f = free_tf ? flat[p.n * N + p.m * N] : p.tf_fixed;
  return TrajectoryGrid(p.t0, t_f, std::move(x), std::move(u));
}

namespace {

EvolutionRates full_rates(const ProblemModel& p, const TrajectoryGrid& traj,
                          const GainConfig& gains, bool grid_advection, Exec exec) {
  const int N = traj.node_count();
  const NodalData nodes = evaluate_nodes(p, traj, exec);
  const TransitionSet ts = build_transition_set(p, traj, nodes, exec);
  const GradientField gf = compute_gradient_field(p, traj, ts, nodes, exec);

  MultiplierSystem ms;
  if (p.q > 0) ms = assemble_multiplier_system(p, traj, ts, gf, gains, nodes, exec);

  ControlRates cr = control_and_tf_rates(p, traj, ts, gf, ms, gains, nodes, exec);
  Matrix dx = state_rate(p, traj, cr.du_dtau, nodes);

  if (grid_advection && p.tf_mode == TerminalTimeMode::Free && cr.dtf_dtau != 0.0) {
    // Node times move with t_f; stored nodal values pick up the transport of
    // the underlying fields past the moving nodes.
    const double horizon = traj.t_f - traj.t0;
    parallel_for(exec, N, [&](int i) {
      const double node_speed =
          (static_cast<double>(i) / (N - 1)) * cr.dtf_dtau;
      dx.col(i) += nodes.f[i] * node_speed;
      Vector udot(p.m);
      if (i == 0) {
        udot = (traj.u.col(1) - traj.u.col(0)) / (horizon / (N - 1));
      } else if (i == N - 1) {
        udot = (traj.u.col(i) - traj.u.col(i - 1)) / (horizon / (N - 1));
      } else {
        udot = (traj.u.col(i + 1) - traj.u.col(i - 1)) / (2.0 * horizon / (N - 1));
      }
      cr.du_dtau.col(i) += udot * node_speed;
    });
  }

  EvolutionRates out;
  out.du_dtau = std::move(cr.du_dtau);
  out.dx_dtau = std::move(dx);
  out.dtf_dtau = cr.dtf_dtau;
  out.pi = ms.pi;
  return out;
}

}  // namespace

Vector epde_rhs(const ProblemModel& p, const GainConfig& gains, int node_count,
                const Vector& flat, bool grid_advection, Exec exec) {
  const TrajectoryGrid traj = unpack_state(p, flat, node_count);
  const EvolutionRates rates = full_rates(p, traj, gains, grid_advection, exec);
  const int N = node_count;
  Vector out(flat.size());
  for (int r = 0; r < p.n; ++r)
    for (int i = 0; i < N; ++i) out[r * N + i] = rates.dx_dtau(r, i);
  for (int r = 0; r < p.m; ++r)
    for (int i = 0; i < N; ++i) out[p.n * N + r * N + i] = rates.du_dtau(r, i);
  if (p.tf_mode == TerminalTimeMode::Free) out[p.n * N + p.m * N] = rates.dtf_dtau;
  if (!out.allFinite())
    throw EvaluationError("evolution right side produced non-finite values");
  return out;
}

Snapshot evaluate_snapshot(const ProblemModel& p, const TrajectoryGrid& traj,
                           const GainConfig& gains, double tau, Exec exec) {
  const NodalData nodes = evaluate_nodes(p, traj, exec);
  const TransitionSet ts = build_transition_set(p, traj, nodes, exec);
  const GradientField gf = compute_gradient_field(p, traj, ts, nodes, exec);
  MultiplierSystem ms;
  if (p.q > 0) ms = assemble_multiplier_system(p, traj, ts, gf, gains, nodes, exec);

  Snapshot s;
  s.tau = tau;
  s.J = evaluate_cost(p, traj);
  const OptimalityResiduals res =
      optimality_residuals(p, traj, ts, gf, ms.pi, nodes, exec);
  s.residual_u = res.control;
  s.residual_tf = res.terminal_time;
  s.t_f = traj.t_f;
  const FeasibilityResidual fr = feasibility_residual(p, traj, exec);
  s.dyn_residual = fr.dynamics;
  s.g_drift = fr.terminal;
  s.pi = ms.pi;
  return s;
}

SolveReport evolve(const ProblemModel& p, const TrajectoryGrid& init,
                   const GainConfig& gains, const EvolutionConfig& cfg,
                   const SnapshotCallback& on_snapshot) {
  if (!(cfg.tau_max >= 0.0) || !(cfg.rel_tol > 0) || !(cfg.abs_tol > 0) ||
      !(cfg.residual_tol > 0) || !(cfg.snapshot_every > 0) ||
      !(cfg.feasibility_tol > 0))
    throw DimensionError("evolution config values must be positive");
  if (init.x.rows() != p.n || init.u.rows() != p.m)
    throw DimensionError("initial trajectory dimensions do not match the problem");
  if (gains.K.rows() != p.m) throw DimensionError("gain matrix does not match m");
  if ((init.x.col(0) - p.x0).cwiseAbs().maxCoeff() != 0.0)
    throw InfeasibleInitError("initial trajectory does not start at x0");

  {
    const FeasibilityResidual fr = feasibility_residual(p, init, cfg.exec);
    if (fr.dynamics > cfg.feasibility_tol || fr.terminal > cfg.feasibility_tol) {
      std::ostringstream os;
      os << "initial trajectory infeasible: dynamics residual " << fr.dynamics
         << ", terminal residual " << fr.terminal << " (tolerance "
         << cfg.feasibility_tol << ")";
      throw InfeasibleInitError(os.str());
    }
  }

  const int N = init.node_count();
  SolveReport report;
  report.trajectory = init;
  report.stop_reason = StopReason::TauMaxReached;

  auto record = [&](double tau, const TrajectoryGrid& traj) -> const Snapshot& {
    report.history.push_back(evaluate_snapshot(p, traj, gains, tau, cfg.exec));
    report.trajectory = traj;
    if (on_snapshot) on_snapshot(report.history.back(), traj);
    return report.history.back();
  };

  const double drift_limit = 10.0 * cfg.feasibility_tol;
  Vector y = pack_state(init, p.tf_mode);

  Rk45Options opts;
  opts.rel_tol = cfg.rel_tol;
  opts.abs_tol = cfg.abs_tol;
  opts.initial_step = std::min(1e-2, cfg.snapshot_every);

  long rhs_count = 0;
  try {
    record(0.0, init);
    if (cfg.tau_max <= 0.0) return report;

    const auto stats = integrate_rk45(
        [&](const Vector& yy) {
          ++rhs_count;
          return epde_rhs(p, gains, N, yy, cfg.grid_advection, cfg.exec);
        },
        y, 0.0, cfg.tau_max, cfg.snapshot_every, opts,
        [&](double tau, const Vector& yy) {
          const TrajectoryGrid traj = unpack_state(p, yy, N);
          const Snapshot& s = record(tau, traj);
          if (s.residual_u <= cfg.residual_tol &&
              s.residual_tf <= cfg.residual_tol) {
            report.stop_reason = StopReason::ResidualMet;
            return false;
          }
          if (s.dyn_residual > drift_limit || s.g_drift > drift_limit) {
            report.stop_reason = StopReason::FeasibilityLost;
            std::ostringstream os;
            os << "feasibility drift exceeded " << drift_limit
               << ": dynamics residual " << s.dyn_residual << ", |g|_inf "
               << s.g_drift;
            report.message = os.str();
            return false;
          }
          return true;
        });
    report.steps_accepted = stats.accepted;
    report.steps_rejected = stats.rejected;
    // tau_max need not be a snapshot multiple; record the end point if so.
    if (report.stop_reason == StopReason::TauMaxReached &&
        report.history.back().tau < cfg.tau_max * (1.0 - 1e-12)) {
      record(cfg.tau_max, unpack_state(p, y, N));
    }
  } catch (const Error& e) {
    report.stop_reason = StopReason::Diverged;
    report.message = e.what();
  }
  report.rhs_evaluations = rhs_count;
  return report;
}

}  // namespace vem
