#include "vem/transition.hpp"

#include <Eigen/LU>
#include <sstream>

#include "vem/errors.hpp"

namespace vem {

namespace {
constexpr double kConditionGuard = 1e12;
constexpr double kInverseCheckTol = 1e-8;
}  // namespace

TransitionSet build_transition_set(const ProblemModel& p, const TrajectoryGrid& traj,
                                   Exec exec) {
  return build_transition_set(p, traj, evaluate_nodes(p, traj, exec), exec);
}

TransitionSet build_transition_set(const ProblemModel& p, const TrajectoryGrid& traj,
                                   const NodalData& nodes, Exec exec) {
  const int N = traj.node_count();
  const int n = p.n;

  TransitionSet ts;
  ts.psi.resize(N);
  ts.psi_inv.resize(N);
  ts.psi[0] = Matrix::Identity(n, n);

  // The matrix ODE is causal, so this march stays sequential.
  for (int i = 0; i + 1 < N; ++i) {
    const double h = traj.node_time(i + 1) - traj.node_time(i);
    const Matrix& a0 = nodes.f_x[i];
    const Matrix& a1 = nodes.f_x[i + 1];
    const Matrix am = 0.5 * (a0 + a1);
    const Matrix& y = ts.psi[i];
    const Matrix k1 = a0 * y;
    const Matrix k2 = am * (y + (0.5 * h) * k1);
    const Matrix k3 = am * (y + (0.5 * h) * k2);
    const Matrix k4 = a1 * (y + h * k3);
    ts.psi[i + 1] = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  Vector cond(N);
  Vector inv_err(N);
  parallel_for(exec, N, [&](int i) {
    Eigen::PartialPivLU<Matrix> lu(ts.psi[i]);
    const double rc = lu.rcond();
    cond[i] = (rc > 0.0) ? 1.0 / rc : kConditionGuard * 10.0;
    ts.psi_inv[i] = lu.inverse();
    inv_err[i] = (ts.psi[i] * ts.psi_inv[i] - Matrix::Identity(n, n))
                     .cwiseAbs()
                     .maxCoeff();
  });
  ts.cond_max = cond.maxCoeff();
  if (!(ts.cond_max < kConditionGuard)) {
    std::ostringstream os;
    os << "transition matrix condition estimate " << ts.cond_max
       << " exceeds " << kConditionGuard;
    throw TransitionConditioningError(os.str());
  }
  const double worst = inv_err.maxCoeff();
  if (!(worst < kInverseCheckTol)) {
    std::ostringstream os;
    os << "transition inverse check failed: |Psi Psi^-1 - I|_max = " << worst;
    throw TransitionConditioningError(os.str());
  }
  return ts;
}

Matrix transition(const TransitionSet& ts, int i, int j) {
  const int N = ts.node_count();
  if (i < 0 || i >= N || j < 0 || j >= N)
    throw LayoutError("transition node index out of range");
  if (i == j) {
    return Matrix::Identity(ts.psi[0].rows(), ts.psi[0].cols());
  }
  return ts.psi[i] * ts.psi_inv[j];
}

}  // namespace vem
