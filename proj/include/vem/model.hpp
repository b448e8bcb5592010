#pragma once

#include <Eigen/Dense>
#include <functional>

#include "vem/exec.hpp"

namespace vem {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class TerminalTimeMode { Free, Fixed };

/// User-supplied optimal control problem: dynamics, Bolza cost, terminal
/// constraint, and their exact partial derivatives. Partials are consumed as
/// given; nothing is differentiated numerically here. Evaluators must be pure
/// and safe to call from several threads at once.
struct ProblemModel {
  int n = 0;  ///< state dimension
  int m = 0;  ///< control dimension
  int q = 0;  ///< terminal constraint dimension (0 means free terminal state)

  double t0 = 0.0;
  Vector x0;

  TerminalTimeMode tf_mode = TerminalTimeMode::Free;
  double tf_fixed = 0.0;  ///< used only when tf_mode == Fixed

  // dynamics xdot = f(x, u, t) and its Jacobians
  std::function<Vector(const Vector&, const Vector&, double)> f;
  std::function<Matrix(const Vector&, const Vector&, double)> f_x;  // n x n
  std::function<Matrix(const Vector&, const Vector&, double)> f_u;  // n x m

  // running cost
  std::function<double(const Vector&, const Vector&, double)> L;
  std::function<Vector(const Vector&, const Vector&, double)> L_x;
  std::function<Vector(const Vector&, const Vector&, double)> L_u;

  // terminal cost phi(x, t) with first and second partials
  std::function<double(const Vector&, double)> phi;
  std::function<Vector(const Vector&, double)> phi_x;
  std::function<double(const Vector&, double)> phi_t;
  std::function<Vector(const Vector&, double)> phi_tx;
  std::function<Matrix(const Vector&, double)> phi_xx;  // n x n

  // terminal constraint g(x(t_f), t_f) = 0; unused when q == 0
  std::function<Vector(const Vector&, double)> g;
  std::function<Matrix(const Vector&, double)> g_x;  // q x n
  std::function<Vector(const Vector&, double)> g_t;  // q
};

/// Probes every evaluator once at (x0, 0, t0) and checks shapes against
/// (n, m, q) and finiteness. Throws DimensionError or EvaluationError.
/// Call once at registration; the hot loops stay branch-free.
void validate_model(const ProblemModel& problem);

/// Trajectory semi-discretized on N uniformly spaced nodes over [t0, t_f].
/// Column i of x and u holds the nodal values at t_i = t0 + i/(N-1)*(t_f-t0).
struct TrajectoryGrid {
  double t0 = 0.0;
  double t_f = 0.0;
  Matrix x;  ///< n x N
  Matrix u;  ///< m x N

  /// Smallest admissible horizon t_f - t0 unless overridden at construction.
  static constexpr double kMinHorizon = 1e-6;

  TrajectoryGrid() = default;
  /// Validates N >= 3 (from the column counts) and the horizon floor.
  TrajectoryGrid(double t0_, double t_f_, Matrix x_, Matrix u_,
                 double min_horizon = kMinHorizon);

  int node_count() const { return static_cast<int>(x.cols()); }
  double spacing() const { return (t_f - t0) / (node_count() - 1); }
  double node_time(int i) const {
    return t0 + (t_f - t0) * (static_cast<double>(i) / (node_count() - 1));
  }
  Vector node_times() const;
};

/// Evolution gains: K positive-definite (checked by Cholesky at construction),
/// k_tf > 0. k_tf is ignored for fixed terminal time.
struct GainConfig {
  Matrix K;
  double k_tf = 0.0;

  GainConfig(Matrix K_, double k_tf_);
  /// Scaled identity convenience, K = scale * I_m.
  static GainConfig scaled_identity(int m, double scale, double k_tf);
};

/// Per-node evaluator results shared by the downstream passes, so one rhs
/// evaluation calls each user function exactly once per node.
struct NodalData {
  std::vector<Vector> f;
  std::vector<Matrix> f_x;
  std::vector<Matrix> f_u;
  Vector L;
  std::vector<Vector> L_x;
  std::vector<Vector> L_u;
  std::vector<Vector> phi_x;
  std::vector<Vector> phi_tx;
  std::vector<Matrix> phi_xx;
};

NodalData evaluate_nodes(const ProblemModel& problem, const TrajectoryGrid& traj,
                         Exec exec = Exec::Parallel);

/// Trapezoidal quadrature weights for the node grid.
Vector trapezoid_weights(const TrajectoryGrid& traj);

/// Bolza cost phi(x_N, t_f) + trapezoid of L over the nodes.
double evaluate_cost(const ProblemModel& problem, const TrajectoryGrid& traj);

struct FeasibilityResidual {
  double dynamics = 0.0;  ///< max interior-node |central-difference xdot - f|_inf
  double terminal = 0.0;  ///< |g(x_N, t_f)|_inf, 0 when q == 0
};

FeasibilityResidual feasibility_residual(const ProblemModel& problem,
                                         const TrajectoryGrid& traj,
                                         Exec exec = Exec::Parallel);

}  // namespace vem
