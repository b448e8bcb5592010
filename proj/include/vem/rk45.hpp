#pragma once

#include <Eigen/Dense>
#include <functional>

namespace vem {

/// Adaptive embedded Runge-Kutta 4(5) with Dormand-Prince coefficients.
/// Error per step is controlled against abs_tol + rel_tol * |y| (RMS norm);
/// accepted steps never cross a checkpoint boundary, so observers see states
/// at exact checkpoint times without dense output.
struct Rk45Options {
  double rel_tol = 1e-3;
  double abs_tol = 1e-6;
  double initial_step = 1e-2;
  double min_step_factor = 0.2;
  double max_step_factor = 5.0;
  double safety = 0.9;
};

struct Rk45Stats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
};

/// Integrates y' = rhs(y) from t0 to t1, pausing at every multiple of
/// `checkpoint_every` past t0 (and at t1). `on_checkpoint(t, y)` may return
/// false to stop early. The final state is left in `y`.
Rk45Stats integrate_rk45(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& rhs,
    Eigen::VectorXd& y, double t0, double t1, double checkpoint_every,
    const Rk45Options& opts,
    const std::function<bool(double, const Eigen::VectorXd&)>& on_checkpoint);

}  // namespace vem
