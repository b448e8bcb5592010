#include "vem/model.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>

#include "vem/errors.hpp"

namespace vem {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

void require_finite_vec(const Vector& v, const char* name) {
  if (!v.allFinite()) throw EvaluationError(std::string(name) + " returned a non-finite value");
}

void require_finite_mat(const Matrix& a, const char* name) {
  if (!a.allFinite()) throw EvaluationError(std::string(name) + " returned a non-finite value");
}

void require_finite_scalar(double s, const char* name) {
  if (!std::isfinite(s)) throw EvaluationError(std::string(name) + " returned a non-finite value");
}

std::string shape_msg(const char* name, long r0, long c0, long r1, long c1) {
  std::ostringstream os;
  os << name << " has shape " << r1 << "x" << c1 << ", expected " << r0 << "x" << c0;
  return os.str();
}

}  // namespace

void validate_model(const ProblemModel& p) {
  require(p.n >= 1, "state dimension must be >= 1");
  require(p.m >= 1, "control dimension must be >= 1");
  require(p.q >= 0, "terminal constraint dimension must be >= 0");
  require(p.x0.size() == p.n, "x0 length does not match n");
  if (p.tf_mode == TerminalTimeMode::Fixed) {
    require(std::isfinite(p.tf_fixed) && p.tf_fixed > p.t0,
            "fixed terminal time must exceed t0");
  }

  const Vector x = p.x0;
  const Vector u = Vector::Zero(p.m);
  const double t = p.t0;

  const Vector fv = p.f(x, u, t);
  require(fv.size() == p.n, shape_msg("f", p.n, 1, fv.size(), 1));
  require_finite_vec(fv, "f");

  const Matrix fx = p.f_x(x, u, t);
  require(fx.rows() == p.n && fx.cols() == p.n, shape_msg("f_x", p.n, p.n, fx.rows(), fx.cols()));
  require_finite_mat(fx, "f_x");

  const Matrix fu = p.f_u(x, u, t);
  require(fu.rows() == p.n && fu.cols() == p.m, shape_msg("f_u", p.n, p.m, fu.rows(), fu.cols()));
  require_finite_mat(fu, "f_u");

  require_finite_scalar(p.L(x, u, t), "L");
  const Vector lx = p.L_x(x, u, t);
  require(lx.size() == p.n, shape_msg("L_x", p.n, 1, lx.size(), 1));
  require_finite_vec(lx, "L_x");
  const Vector lu = p.L_u(x, u, t);
  require(lu.size() == p.m, shape_msg("L_u", p.m, 1, lu.size(), 1));
  require_finite_vec(lu, "L_u");

  require_finite_scalar(p.phi(x, t), "phi");
  require_finite_scalar(p.phi_t(x, t), "phi_t");
  const Vector px = p.phi_x(x, t);
  require(px.size() == p.n, shape_msg("phi_x", p.n, 1, px.size(), 1));
  require_finite_vec(px, "phi_x");
  const Vector ptx = p.phi_tx(x, t);
  require(ptx.size() == p.n, shape_msg("phi_tx", p.n, 1, ptx.size(), 1));
  require_finite_vec(ptx, "phi_tx");
  const Matrix pxx = p.phi_xx(x, t);
  require(pxx.rows() == p.n && pxx.cols() == p.n,
          shape_msg("phi_xx", p.n, p.n, pxx.rows(), pxx.cols()));
  require_finite_mat(pxx, "phi_xx");

  if (p.q > 0) {
    const Vector gv = p.g(x, t);
    require(gv.size() == p.q, shape_msg("g", p.q, 1, gv.size(), 1));
    require_finite_vec(gv, "g");
    const Matrix gx = p.g_x(x, t);
    require(gx.rows() == p.q && gx.cols() == p.n, shape_msg("g_x", p.q, p.n, gx.rows(), gx.cols()));
    require_finite_mat(gx, "g_x");
    const Vector gt = p.g_t(x, t);
    require(gt.size() == p.q, shape_msg("g_t", p.q, 1, gt.size(), 1));
    require_finite_vec(gt, "g_t");
  }
}

TrajectoryGrid::TrajectoryGrid(double t0_, double t_f_, Matrix x_, Matrix u_,
                               double min_horizon)
    : t0(t0_), t_f(t_f_), x(std::move(x_)), u(std::move(u_)) {
  if (x.cols() < 3) throw DimensionError("trajectory needs at least 3 nodes");
  if (u.cols() != x.cols()) throw DimensionError("x and u node counts differ");
  if (!(t_f > t0 + min_horizon)) throw DimensionError("terminal time below the horizon floor");
}

Vector TrajectoryGrid::node_times() const {
  const int N = node_count();
  Vector t(N);
  for (int i = 0; i < N; ++i) t[i] = node_time(i);
  return t;
}

GainConfig::GainConfig(Matrix K_, double k_tf_) : K(std::move(K_)), k_tf(k_tf_) {
  if (K.rows() != K.cols() || K.rows() < 1) throw DimensionError("K must be square");
  const double asym = (K - K.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * (1.0 + K.cwiseAbs().maxCoeff()))
    throw DimensionError("K must be symmetric");
  Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success)
    throw DimensionError("K must be positive-definite");
  if (!(k_tf > 0.0)) throw DimensionError("k_tf must be positive");
}

GainConfig GainConfig::scaled_identity(int m, double scale, double k_tf) {
  return GainConfig(scale * Matrix::Identity(m, m), k_tf);
}

NodalData evaluate_nodes(const ProblemModel& p, const TrajectoryGrid& traj, Exec exec) {
  const int N = traj.node_count();
  NodalData nd;
  nd.f.resize(N);
  nd.f_x.resize(N);
  nd.f_u.resize(N);
  nd.L.resize(N);
  nd.L_x.resize(N);
  nd.L_u.resize(N);
  nd.phi_x.resize(N);
  nd.phi_tx.resize(N);
  nd.phi_xx.resize(N);
  parallel_for(exec, N, [&](int i) {
    const Vector xi = traj.x.col(i);
    const Vector ui = traj.u.col(i);
    const double ti = traj.node_time(i);
    nd.f[i] = p.f(xi, ui, ti);
    nd.f_x[i] = p.f_x(xi, ui, ti);
    nd.f_u[i] = p.f_u(xi, ui, ti);
    nd.L[i] = p.L(xi, ui, ti);
    nd.L_x[i] = p.L_x(xi, ui, ti);
    nd.L_u[i] = p.L_u(xi, ui, ti);
    nd.phi_x[i] = p.phi_x(xi, ti);
    nd.phi_tx[i] = p.phi_tx(xi, ti);
    nd.phi_xx[i] = p.phi_xx(xi, ti);
  });
  return nd;
}

Vector trapezoid_weights(const TrajectoryGrid& traj) {
  const int N = traj.node_count();
  Vector w = Vector::Zero(N);
  for (int i = 0; i + 1 < N; ++i) {
    const double half = 0.5 * (traj.node_time(i + 1) - traj.node_time(i));
    w[i] += half;
    w[i + 1] += half;
  }
  return w;
}

double evaluate_cost(const ProblemModel& p, const TrajectoryGrid& traj) {
  if (traj.x.rows() != p.n || traj.u.rows() != p.m)
    throw DimensionError("trajectory dimensions do not match the problem");
  const int N = traj.node_count();
  const Vector w = trapezoid_weights(traj);
  double J = p.phi(traj.x.col(N - 1), traj.t_f);
  for (int i = 0; i < N; ++i) {
    J += w[i] * p.L(traj.x.col(i), traj.u.col(i), traj.node_time(i));
  }
  if (!std::isfinite(J)) throw EvaluationError("cost evaluated to a non-finite value");
  return J;
}

FeasibilityResidual feasibility_residual(const ProblemModel& p,
                                         const TrajectoryGrid& traj, Exec exec) {
  const int N = traj.node_count();
  Vector per_node = Vector::Zero(N);
  parallel_for(exec, N - 2, [&](int k) {
    const int i = k + 1;
    const double dt = traj.node_time(i + 1) - traj.node_time(i - 1);
    const Vector xdot = (traj.x.col(i + 1) - traj.x.col(i - 1)) / dt;
    const Vector fi = p.f(traj.x.col(i), traj.u.col(i), traj.node_time(i));
    per_node[i] = (xdot - fi).cwiseAbs().maxCoeff();
  });
  FeasibilityResidual res;
  res.dynamics = per_node.maxCoeff();
  if (p.q > 0) {
    res.terminal = p.g(traj.x.col(N - 1), traj.t_f).cwiseAbs().maxCoeff();
  }
  return res;
}

}  // namespace vem
