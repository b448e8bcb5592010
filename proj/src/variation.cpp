#include "vem/variation.hpp"

#include <Eigen/LU>
#include <sstream>

#include "vem/errors.hpp"

namespace vem {

namespace {

// phi_t + phi_x^T f + L at the last node: the running-cost rate seen by the
// terminal time.
double terminal_cost_rate(const ProblemModel& p, const TrajectoryGrid& traj,
                          const NodalData& nodes) {
  const int N = traj.node_count();
  const Vector xN = traj.x.col(N - 1);
  const Vector uN = traj.u.col(N - 1);
  return p.phi_t(xN, traj.t_f) + nodes.phi_x[N - 1].dot(nodes.f[N - 1]) +
         p.L(xN, uN, traj.t_f);
}

struct TerminalConstraintData {
  Matrix g_x;   // q x n
  Vector g_t;   // q
  Vector gv;    // g_x f + g_t at t_f
};

TerminalConstraintData terminal_constraint_data(const ProblemModel& p,
                                                const TrajectoryGrid& traj,
                                                const NodalData& nodes) {
  const int N = traj.node_count();
  TerminalConstraintData d;
  d.g_x = p.g_x(traj.x.col(N - 1), traj.t_f);
  d.g_t = p.g_t(traj.x.col(N - 1), traj.t_f);
  if (d.g_x.rows() != p.q || d.g_x.cols() != p.n || d.g_t.size() != p.q)
    throw DimensionError("terminal constraint Jacobian shape mismatch");
  d.gv = d.g_x * nodes.f[N - 1] + d.g_t;
  return d;
}

}  // namespace

GradientField compute_gradient_field(const ProblemModel& p, const TrajectoryGrid& traj,
                                     const TransitionSet& ts, Exec exec) {
  return compute_gradient_field(p, traj, ts, evaluate_nodes(p, traj, exec), exec);
}

GradientField compute_gradient_field(const ProblemModel& p, const TrajectoryGrid& traj,
                                     const TransitionSet& ts, const NodalData& nodes,
                                     Exec exec) {
  const int N = traj.node_count();
  const int n = p.n;

  GradientField gf;
  gf.w.resize(n, N);
  gf.tail.resize(n, N);
  gf.p_u.resize(p.m, N);

  // Integrand of the tail, propagated into the t0 frame: v_i = Psi_i^T w_i.
  Matrix v(n, N);
  parallel_for(exec, N, [&](int i) {
    gf.w.col(i) = nodes.L_x[i] + nodes.phi_tx[i] +
                  nodes.phi_xx[i].transpose() * nodes.f[i] +
                  nodes.f_x[i].transpose() * nodes.phi_x[i];
    v.col(i) = ts.psi[i].transpose() * gf.w.col(i);
  });

  // One backward cumulative trapezoid pass gives every tail integral.
  Matrix sigma(n, N);
  sigma.col(N - 1).setZero();
  for (int i = N - 2; i >= 0; --i) {
    const double h = traj.node_time(i + 1) - traj.node_time(i);
    sigma.col(i) = sigma.col(i + 1) + (0.5 * h) * (v.col(i) + v.col(i + 1));
  }

  parallel_for(exec, N, [&](int i) {
    gf.tail.col(i) = ts.psi_inv[i].transpose() * sigma.col(i);
    gf.p_u.col(i) =
        nodes.L_u[i] + nodes.f_u[i].transpose() * (nodes.phi_x[i] + Vector(gf.tail.col(i)));
  });
  return gf;
}

MultiplierSystem assemble_multiplier_system(const ProblemModel& p,
                                            const TrajectoryGrid& traj,
                                            const TransitionSet& ts,
                                            const GradientField& gf,
                                            const GainConfig& gains, Exec exec) {
  return assemble_multiplier_system(p, traj, ts, gf, gains,
                                    evaluate_nodes(p, traj, exec), exec);
}

MultiplierSystem assemble_multiplier_system(const ProblemModel& p,
                                            const TrajectoryGrid& traj,
                                            const TransitionSet& ts,
                                            const GradientField& gf,
                                            const GainConfig& gains,
                                            const NodalData& nodes, Exec exec) {
  const int q = p.q;
  if (q < 1)
    throw DimensionError("multiplier system requires q >= 1; skip it for q == 0");
  const int N = traj.node_count();

  const TerminalConstraintData tc = terminal_constraint_data(p, traj, nodes);
  for (int k = 0; k < q; ++k) {
    if (tc.g_x.row(k).cwiseAbs().maxCoeff() == 0.0) {
      std::ostringstream os;
      os << "terminal constraint row " << k << " has no state dependence";
      throw ControllabilityError(os.str());
    }
  }

  // Constraint-projected control directions C_i = g_x Phi(t_f, t_i) f_u(t_i).
  const Matrix gN = tc.g_x * ts.psi[N - 1];  // q x n
  std::vector<Matrix> c(N);
  parallel_for(exec, N, [&](int i) { c[i] = (gN * ts.psi_inv[i]) * nodes.f_u[i]; });

  const Vector w = trapezoid_weights(traj);
  Matrix M = Matrix::Zero(q, q);
  Vector r = Vector::Zero(q);
  for (int i = 0; i < N; ++i) {
    const Matrix ck = c[i] * gains.K;  // q x m
    M.noalias() += w[i] * (ck * c[i].transpose());
    r.noalias() += w[i] * (ck * gf.p_u.col(i));
  }
  if (p.tf_mode == TerminalTimeMode::Free) {
    M.noalias() += gains.k_tf * (tc.gv * tc.gv.transpose());
    r.noalias() += (gains.k_tf * terminal_cost_rate(p, traj, nodes)) * tc.gv;
  }
  M = 0.5 * (M + M.transpose());

  MultiplierSystem ms;
  ms.M = M;
  ms.r = r;
  Eigen::PartialPivLU<Matrix> lu(M);
  const double rc = lu.rcond();
  if (!(rc > 1e-14)) {
    ms.singular = true;
    std::ostringstream os;
    os << "multiplier matrix singular to working precision (rcond " << rc << ")";
    throw ControllabilityError(os.str());
  }
  ms.pi = lu.solve(-r);
  if (!ms.pi.allFinite())
    throw ControllabilityError("multiplier solve produced non-finite values");
  return ms;
}

ControlRates control_and_tf_rates(const ProblemModel& p, const TrajectoryGrid& traj,
                                  const TransitionSet& ts, const GradientField& gf,
                                  const MultiplierSystem& ms, const GainConfig& gains,
                                  Exec exec) {
  return control_and_tf_rates(p, traj, ts, gf, ms, gains,
                              evaluate_nodes(p, traj, exec), exec);
}

ControlRates control_and_tf_rates(const ProblemModel& p, const TrajectoryGrid& traj,
                                  const TransitionSet& ts, const GradientField& gf,
                                  const MultiplierSystem& ms, const GainConfig& gains,
                                  const NodalData& nodes, Exec exec) {
  const int N = traj.node_count();
  ControlRates rates;
  rates.du_dtau.resize(p.m, N);

  if (p.q > 0 && ms.pi.size() != p.q)
    throw DimensionError("multiplier length does not match q");

  Vector zN;  // Psi_N^T g_x^T pi, shared by every node's correction
  TerminalConstraintData tc;
  if (p.q > 0) {
    tc = terminal_constraint_data(p, traj, nodes);
    zN = ts.psi[N - 1].transpose() * (tc.g_x.transpose() * ms.pi);
  }

  parallel_for(exec, N, [&](int i) {
    Vector dir = gf.p_u.col(i);
    if (p.q > 0) {
      dir += nodes.f_u[i].transpose() * (ts.psi_inv[i].transpose() * zN);
    }
    rates.du_dtau.col(i) = -(gains.K * dir);
  });

  rates.dtf_dtau = 0.0;
  if (p.tf_mode == TerminalTimeMode::Free) {
    double term = terminal_cost_rate(p, traj, nodes);
    if (p.q > 0) term += ms.pi.dot(tc.gv);
    rates.dtf_dtau = -gains.k_tf * term;
  }
  return rates;
}

Matrix state_rate(const ProblemModel& p, const TrajectoryGrid& traj,
                  const Matrix& du_dtau) {
  return state_rate(p, traj, du_dtau, evaluate_nodes(p, traj, Exec::Serial));
}

Matrix state_rate(const ProblemModel& p, const TrajectoryGrid& traj,
                  const Matrix& du_dtau, const NodalData& nodes) {
  const int N = traj.node_count();
  if (du_dtau.rows() != p.m || du_dtau.cols() != N)
    throw DimensionError("du_dtau shape does not match the grid");

  Matrix dx = Matrix::Zero(p.n, N);
  Vector xi = Vector::Zero(p.n);
  for (int i = 0; i + 1 < N; ++i) {
    const double h = traj.node_time(i + 1) - traj.node_time(i);
    const Matrix& a0 = nodes.f_x[i];
    const Matrix& a1 = nodes.f_x[i + 1];
    const Matrix am = 0.5 * (a0 + a1);
    const Matrix& b0 = nodes.f_u[i];
    const Matrix& b1 = nodes.f_u[i + 1];
    const Matrix bm = 0.5 * (b0 + b1);
    const Vector u0 = du_dtau.col(i);
    const Vector u1 = du_dtau.col(i + 1);
    const Vector um = 0.5 * (u0 + u1);
    const Vector k1 = a0 * xi + b0 * u0;
    const Vector k2 = am * (xi + (0.5 * h) * k1) + bm * um;
    const Vector k3 = am * (xi + (0.5 * h) * k2) + bm * um;
    const Vector k4 = a1 * (xi + h * k3) + b1 * u1;
    xi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    dx.col(i + 1) = xi;
  }
  return dx;
}

double tangency_residual(const ProblemModel& p, const TrajectoryGrid& traj,
                         const TransitionSet& ts, const ControlRates& rates,
                         const NodalData& nodes) {
  if (p.q == 0) return 0.0;
  const int N = traj.node_count();
  const TerminalConstraintData tc = terminal_constraint_data(p, traj, nodes);
  const Matrix gN = tc.g_x * ts.psi[N - 1];
  const Vector w = trapezoid_weights(traj);
  Vector acc = Vector::Zero(p.q);
  for (int i = 0; i < N; ++i) {
    acc.noalias() += w[i] * ((gN * ts.psi_inv[i]) * (nodes.f_u[i] * rates.du_dtau.col(i)));
  }
  acc += tc.gv * rates.dtf_dtau;
  return acc.cwiseAbs().maxCoeff();
}

double cost_descent_rate(const ProblemModel& p, const TrajectoryGrid& traj,
                         const GradientField& gf, const ControlRates& rates,
                         const NodalData& nodes) {
  const Vector w = trapezoid_weights(traj);
  double dJ = terminal_cost_rate(p, traj, nodes) * rates.dtf_dtau;
  for (int i = 0; i < traj.node_count(); ++i) {
    dJ += w[i] * gf.p_u.col(i).dot(rates.du_dtau.col(i));
  }
  return dJ;
}

double cost_descent_rate_quadratic(const ProblemModel& p, const TrajectoryGrid& traj,
                                   const TransitionSet& ts, const GradientField& gf,
                                   const MultiplierSystem& ms, const GainConfig& gains,
                                   const NodalData& nodes) {
  const int N = traj.node_count();
  const Vector w = trapezoid_weights(traj);

  Vector zN;
  TerminalConstraintData tc;
  if (p.q > 0) {
    tc = terminal_constraint_data(p, traj, nodes);
    zN = ts.psi[N - 1].transpose() * (tc.g_x.transpose() * ms.pi);
  }

  double dJ = 0.0;
  for (int i = 0; i < N; ++i) {
    Vector dir = gf.p_u.col(i);
    if (p.q > 0) dir += nodes.f_u[i].transpose() * (ts.psi_inv[i].transpose() * zN);
    dJ -= w[i] * dir.dot(gains.K * dir);
  }
  if (p.tf_mode == TerminalTimeMode::Free) {
    double term = terminal_cost_rate(p, traj, nodes);
    if (p.q > 0) term += ms.pi.dot(tc.gv);
    dJ -= gains.k_tf * term * term;
  }
  return dJ;
}

}  // namespace vem
