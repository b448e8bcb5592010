#include "vem/rk45.hpp"

#include <algorithm>
#include <cmath>

namespace vem {

namespace {

// Dormand-Prince 5(4) tableau. The last stage reuses the 5th-order weights,
// so an accepted step's final evaluation seeds the next step (FSAL).
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                 e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                 e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

}  // namespace

Rk45Stats integrate_rk45(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& rhs,
    Eigen::VectorXd& y, double t0, double t1, double checkpoint_every,
    const Rk45Options& opts,
    const std::function<bool(double, const Eigen::VectorXd&)>& on_checkpoint) {
  using Eigen::VectorXd;
  Rk45Stats stats;
  if (t1 <= t0) return stats;

  double t = t0;
  double next_checkpoint = t0 + checkpoint_every;
  double h = std::min({opts.initial_step, checkpoint_every, t1 - t0});

  VectorXd k1 = rhs(y);
  ++stats.rhs_evaluations;

  const double span_eps = 1e-12 * std::max(1.0, std::abs(t1));
  while (t < t1 - span_eps) {
    h = std::min({h, t1 - t, next_checkpoint - t});

    const VectorXd k2 = rhs(y + h * (a21 * k1));
    const VectorXd k3 = rhs(y + h * (a31 * k1 + a32 * k2));
    const VectorXd k4 = rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const VectorXd k5 = rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const VectorXd k6 =
        rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const VectorXd y5 =
        y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const VectorXd k7 = rhs(y5);
    stats.rhs_evaluations += 6;

    const VectorXd err_v =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sc =
          opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      const double r = err_v[i] / sc;
      acc += r * r;
    }
    const double err = std::sqrt(acc / static_cast<double>(y.size()));

    if (err <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;
      ++stats.accepted;
      if (t >= next_checkpoint - span_eps) {
        if (!on_checkpoint(t, y)) return stats;
        next_checkpoint += checkpoint_every;
      }
    } else {
      ++stats.rejected;
    }

    const double factor =
        (err > 0.0) ? opts.safety * std::pow(err, -0.2) : opts.max_step_factor;
    h *= std::clamp(factor, opts.min_step_factor, opts.max_step_factor);
  }
  return stats;
}

}  // namespace vem
