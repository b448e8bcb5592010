#include "vem/diagnostics.hpp"

#include "vem/errors.hpp"

namespace vem {

CostateTrajectory reconstruct_costates(const ProblemModel& p,
                                       const TrajectoryGrid& traj,
                                       const TransitionSet& ts, const Vector& pi,
                                       Exec exec) {
  return reconstruct_costates(p, traj, ts, pi, evaluate_nodes(p, traj, exec), exec);
}

CostateTrajectory reconstruct_costates(const ProblemModel& p,
                                       const TrajectoryGrid& traj,
                                       const TransitionSet& ts, const Vector& pi,
                                       const NodalData& nodes, Exec exec) {
  const int N = traj.node_count();
  if (p.q > 0 && pi.size() != p.q)
    throw DimensionError("multiplier length does not match q");

  // The tail integral is the one already used by the gradient field.
  const GradientField gf = compute_gradient_field(p, traj, ts, nodes, exec);

  CostateTrajectory ct;
  ct.pi_bar = pi;
  ct.gamma.resize(p.n, N);
  ct.hamiltonian.resize(N);

  Vector gpi;
  if (p.q > 0) gpi = p.g_x(traj.x.col(N - 1), traj.t_f).transpose() * pi;

  parallel_for(exec, N, [&](int i) {
    Vector gi = nodes.phi_x[i] + Vector(gf.tail.col(i));
    if (p.q > 0) {
      // transition(N-1, i)^T gpi; the last node uses the exact identity.
      gi += (i == N - 1) ? gpi
                         : Vector(ts.psi_inv[i].transpose() *
                                  (ts.psi[N - 1].transpose() * gpi));
    }
    ct.gamma.col(i) = gi;
    ct.hamiltonian[i] = nodes.L[i] + gi.dot(nodes.f[i]);
  });
  return ct;
}

OptimalityResiduals optimality_residuals(const ProblemModel& p,
                                         const TrajectoryGrid& traj,
                                         const TransitionSet& ts,
                                         const GradientField& gf, const Vector& pi,
                                         Exec exec) {
  return optimality_residuals(p, traj, ts, gf, pi, evaluate_nodes(p, traj, exec),
                              exec);
}

OptimalityResiduals optimality_residuals(const ProblemModel& p,
                                         const TrajectoryGrid& traj,
                                         const TransitionSet& ts,
                                         const GradientField& gf, const Vector& pi,
                                         const NodalData& nodes, Exec exec) {
  const int N = traj.node_count();
  if (p.q > 0 && pi.size() != p.q)
    throw DimensionError("multiplier length does not match q");

  Vector zN;
  Matrix g_x;
  Vector g_t;
  if (p.q > 0) {
    g_x = p.g_x(traj.x.col(N - 1), traj.t_f);
    g_t = p.g_t(traj.x.col(N - 1), traj.t_f);
    zN = ts.psi[N - 1].transpose() * (g_x.transpose() * pi);
  }

  Vector per_node(N);
  parallel_for(exec, N, [&](int i) {
    Vector dir = gf.p_u.col(i);
    if (p.q > 0) dir += nodes.f_u[i].transpose() * (ts.psi_inv[i].transpose() * zN);
    per_node[i] = dir.cwiseAbs().maxCoeff();
  });

  OptimalityResiduals res;
  res.control = per_node.maxCoeff();
  if (p.tf_mode == TerminalTimeMode::Free) {
    const Vector xN = traj.x.col(N - 1);
    const Vector uN = traj.u.col(N - 1);
    double term = p.phi_t(xN, traj.t_f) + nodes.phi_x[N - 1].dot(nodes.f[N - 1]) +
                  p.L(xN, uN, traj.t_f);
    if (p.q > 0) term += pi.dot(g_x * nodes.f[N - 1] + g_t);
    res.terminal_time = std::abs(term);
  }
  return res;
}

ClassicalConditionReport classical_condition_check(const ProblemModel& p,
                                                   const CostateTrajectory& ct,
                                                   const TrajectoryGrid& traj) {
  const int N = traj.node_count();
  const NodalData nodes = evaluate_nodes(p, traj, Exec::Serial);
  ClassicalConditionReport rep;

  for (int i = 1; i + 1 < N; ++i) {
    const double dt = traj.node_time(i + 1) - traj.node_time(i - 1);
    const Vector dgamma = (ct.gamma.col(i + 1) - ct.gamma.col(i - 1)) / dt;
    const Vector res = dgamma + nodes.L_x[i] + nodes.f_x[i].transpose() * ct.gamma.col(i);
    rep.costate_ode = std::max(rep.costate_ode, res.cwiseAbs().maxCoeff());
  }
  for (int i = 0; i < N; ++i) {
    const Vector hu = nodes.L_u[i] + nodes.f_u[i].transpose() * ct.gamma.col(i);
    rep.hamiltonian_u = std::max(rep.hamiltonian_u, hu.cwiseAbs().maxCoeff());
  }

  const Vector xN = traj.x.col(N - 1);
  if (p.tf_mode == TerminalTimeMode::Free) {
    double tv = ct.hamiltonian[N - 1] + p.phi_t(xN, traj.t_f);
    if (p.q > 0) tv += ct.pi_bar.dot(p.g_t(xN, traj.t_f));
    rep.transversality_time = std::abs(tv);
  }

  Vector end = ct.gamma.col(N - 1) - nodes.phi_x[N - 1];
  if (p.q > 0) end -= p.g_x(xN, traj.t_f).transpose() * ct.pi_bar;
  rep.transversality_state = end.cwiseAbs().maxCoeff();
  return rep;
}

double stationarity_check(const ProblemModel& p, const TrajectoryGrid& traj,
                          const TransitionSet& ts, const GradientField& gf,
                          const Vector& pi, Exec exec) {
  const int q = p.q;
  if (q == 0) return 0.0;
  if (pi.size() != q) throw DimensionError("multiplier length does not match q");
  const int N = traj.node_count();
  const NodalData nodes = evaluate_nodes(p, traj, exec);

  const Matrix g_x = p.g_x(traj.x.col(N - 1), traj.t_f);
  const Vector g_t = p.g_t(traj.x.col(N - 1), traj.t_f);
  const Matrix gN = g_x * ts.psi[N - 1];

  std::vector<Matrix> c(N);
  parallel_for(exec, N, [&](int i) { c[i] = (gN * ts.psi_inv[i]) * nodes.f_u[i]; });

  const Vector w = trapezoid_weights(traj);
  Matrix m1 = Matrix::Zero(q, q);
  Vector r1 = Vector::Zero(q);
  for (int i = 0; i < N; ++i) {
    m1.noalias() += w[i] * (c[i] * c[i].transpose());
    r1.noalias() += w[i] * (c[i] * gf.p_u.col(i));
  }

  const bool with_time_rows = (p.tf_mode == TerminalTimeMode::Free);
  const int rows = with_time_rows ? 2 * q : q;
  Matrix stacked(rows, q);
  Vector rhs(rows);
  stacked.topRows(q) = m1;
  rhs.head(q) = r1;
  if (with_time_rows) {
    const Vector xN = traj.x.col(N - 1);
    const Vector uN = traj.u.col(N - 1);
    const Vector gv = g_x * nodes.f[N - 1] + g_t;
    const double cN = p.phi_t(xN, traj.t_f) + nodes.phi_x[N - 1].dot(nodes.f[N - 1]) +
                      p.L(xN, uN, traj.t_f);
    stacked.bottomRows(q) = gv * gv.transpose();
    rhs.tail(q) = cN * gv;
  }
  const Vector res = stacked * pi + rhs;
  return res.cwiseAbs().maxCoeff() / (1.0 + rhs.cwiseAbs().maxCoeff());
}

}  // namespace vem
