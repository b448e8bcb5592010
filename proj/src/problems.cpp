#include "vem/problems.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

#include "vem/errors.hpp"

namespace vem {

namespace {

constexpr double kGravity = 10.0;
constexpr int kInitSubsteps = 10;

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

ProblemModel double_integrator() {
  ProblemModel p;
  p.n = 2;
  p.m = 1;
  p.q = 2;
  p.t0 = 0.0;
  p.x0 = vec2(1.0, 1.0);
  p.tf_mode = TerminalTimeMode::Fixed;
  p.tf_fixed = 2.0;

  p.f = [](const Vector& x, const Vector& u, double) {
    return vec2(x[1], u[0]);
  };
  p.f_x = [](const Vector&, const Vector&, double) {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 1) = 1.0;
    return a;
  };
  p.f_u = [](const Vector&, const Vector&, double) {
    Matrix b = Matrix::Zero(2, 1);
    b(1, 0) = 1.0;
    return b;
  };

  p.L = [](const Vector&, const Vector& u, double) { return 0.5 * u[0] * u[0]; };
  p.L_x = [](const Vector&, const Vector&, double) { return Vector::Zero(2).eval(); };
  p.L_u = [](const Vector&, const Vector& u, double) {
    Vector v(1);
    v << u[0];
    return v;
  };

  p.phi = [](const Vector&, double) { return 0.0; };
  p.phi_x = [](const Vector&, double) { return Vector::Zero(2).eval(); };
  p.phi_t = [](const Vector&, double) { return 0.0; };
  p.phi_tx = [](const Vector&, double) { return Vector::Zero(2).eval(); };
  p.phi_xx = [](const Vector&, double) { return Matrix::Zero(2, 2).eval(); };

  p.g = [](const Vector& x, double) { return x; };
  p.g_x = [](const Vector&, double) { return Matrix::Identity(2, 2).eval(); };
  p.g_t = [](const Vector&, double) { return Vector::Zero(2).eval(); };

  validate_model(p);
  return p;
}

ProblemModel brachistochrone() {
  ProblemModel p;
  p.n = 3;
  p.m = 1;
  p.q = 2;
  p.t0 = 0.0;
  p.x0 = Vector::Zero(3);
  p.tf_mode = TerminalTimeMode::Free;

  p.f = [](const Vector& x, const Vector& u, double) {
    Vector v(3);
    v << x[2] * std::sin(u[0]), -x[2] * std::cos(u[0]), kGravity * std::cos(u[0]);
    return v;
  };
  p.f_x = [](const Vector&, const Vector& u, double) {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 2) = std::sin(u[0]);
    a(1, 2) = -std::cos(u[0]);
    return a;
  };
  p.f_u = [](const Vector& x, const Vector& u, double) {
    Matrix b(3, 1);
    b(0, 0) = x[2] * std::cos(u[0]);
    b(1, 0) = x[2] * std::sin(u[0]);
    b(2, 0) = -kGravity * std::sin(u[0]);
    return b;
  };

  p.L = [](const Vector&, const Vector&, double) { return 0.0; };
  p.L_x = [](const Vector&, const Vector&, double) { return Vector::Zero(3).eval(); };
  p.L_u = [](const Vector&, const Vector&, double) { return Vector::Zero(1).eval(); };

  // minimum time as terminal cost: phi(x, t) = t
  p.phi = [](const Vector&, double t) { return t; };
  p.phi_x = [](const Vector&, double) { return Vector::Zero(3).eval(); };
  p.phi_t = [](const Vector&, double) { return 1.0; };
  p.phi_tx = [](const Vector&, double) { return Vector::Zero(3).eval(); };
  p.phi_xx = [](const Vector&, double) { return Matrix::Zero(3, 3).eval(); };

  p.g = [](const Vector& x, double) { return vec2(x[0] - 2.0, x[1] + 2.0); };
  p.g_x = [](const Vector&, double) {
    Matrix gx = Matrix::Zero(2, 3);
    gx(0, 0) = 1.0;
    gx(1, 1) = 1.0;
    return gx;
  };
  p.g_t = [](const Vector&, double) { return Vector::Zero(2).eval(); };

  validate_model(p);
  return p;
}

BuiltinProblem builtin_problem(BuiltinTag tag) {
  switch (tag) {
    case BuiltinTag::DoubleIntegrator: return {tag, double_integrator()};
    case BuiltinTag::Brachistochrone: return {tag, brachistochrone()};
  }
  throw DimensionError("unknown builtin problem tag");
}

BuiltinProblem builtin_problem(const std::string& name) {
  if (name == "double-integrator") return builtin_problem(BuiltinTag::DoubleIntegrator);
  if (name == "brachistochrone") return builtin_problem(BuiltinTag::Brachistochrone);
  throw DimensionError("unknown problem '" + name +
                       "'; expected double-integrator or brachistochrone");
}

const char* builtin_name(BuiltinTag tag) {
  switch (tag) {
    case BuiltinTag::DoubleIntegrator: return "double-integrator";
    case BuiltinTag::Brachistochrone: return "brachistochrone";
  }
  return "unknown";
}

int default_node_count(BuiltinTag tag) {
  return tag == BuiltinTag::DoubleIntegrator ? 41 : 101;
}

TrajectoryGrid init_feedback_double_integrator(int node_count, double warn_tol) {
  if (node_count < 3) throw DimensionError("need at least 3 nodes");
  const double t0 = 0.0, t_f = 2.0;
  const int N = node_count;

  const auto feedback = [](double t, const Vector& x) {
    const double wn = 5.0 * t;
    return -wn * wn * x[0] - 2.0 * wn * 0.707 * x[1];
  };
  const auto rhs = [&](double t, const Vector& x) {
    return vec2(x[1], feedback(t, x));
  };

  Matrix x(2, N), u(1, N);
  Vector xi = vec2(1.0, 1.0);
  x.col(0) = xi;
  u(0, 0) = feedback(t0, xi);
  const double dt = (t_f - t0) / (N - 1);
  for (int i = 0; i + 1 < N; ++i) {
    const double h = dt / kInitSubsteps;
    for (int s = 0; s < kInitSubsteps; ++s) {
      const double t = t0 + i * dt + s * h;
      const Vector k1 = rhs(t, xi);
      const Vector k2 = rhs(t + 0.5 * h, xi + (0.5 * h) * k1);
      const Vector k3 = rhs(t + 0.5 * h, xi + (0.5 * h) * k2);
      const Vector k4 = rhs(t + h, xi + h * k3);
      xi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    x.col(i + 1) = xi;
    u(0, i + 1) = feedback(t0 + (i + 1) * dt, xi);
  }

  const double miss = x.col(N - 1).cwiseAbs().maxCoeff();
  if (miss > warn_tol) {
    std::cerr << "warning: feedback start misses the origin by " << miss << "\n";
  }
  return TrajectoryGrid(t0, t_f, std::move(x), std::move(u));
}

TrajectoryGrid init_straightline_brachistochrone(int node_count) {
  if (node_count < 3) throw DimensionError("need at least 3 nodes");
  const int N = node_count;
  const double t_f = std::sqrt(0.8);
  Matrix x(3, N), u(1, N);
  for (int i = 0; i < N; ++i) {
    const double t = t_f * (static_cast<double>(i) / (N - 1));
    x(0, i) = 2.5 * t * t;
    x(1, i) = -2.5 * t * t;
    x(2, i) = 5.0 * std::numbers::sqrt2 * t;
    u(0, i) = std::numbers::pi / 4.0;
  }
  return TrajectoryGrid(0.0, t_f, std::move(x), std::move(u));
}

TrajectoryGrid default_init(BuiltinTag tag, int node_count) {
  return tag == BuiltinTag::DoubleIntegrator
             ? init_feedback_double_integrator(node_count)
             : init_straightline_brachistochrone(node_count);
}

double finite_difference_gradient_oracle(const ProblemModel& p,
                                         const TrajectoryGrid& traj, int node,
                                         int component, double bump) {
  const int N = traj.node_count();
  if (node < 0 || node >= N || component < 0 || component >= p.m)
    throw LayoutError("oracle node or component out of range");
  if (!(bump > 0.0)) throw DimensionError("bump size must be positive");

  const Vector w = trapezoid_weights(traj);

  const auto cost_with_bump = [&](double delta) {
    Matrix u = traj.u;
    u(component, node) += delta;
    // Re-integrate the state under the perturbed control (t_f frozen).
    Matrix x(p.n, N);
    Vector xi = traj.x.col(0);
    x.col(0) = xi;
    for (int i = 0; i + 1 < N; ++i) {
      const double ti = traj.node_time(i);
      const double dt = traj.node_time(i + 1) - ti;
      const double h = dt / kInitSubsteps;
      const auto u_at = [&](double t) -> Vector {
        const double a = (t - ti) / dt;
        return (1.0 - a) * u.col(i) + a * u.col(i + 1);
      };
      for (int s = 0; s < kInitSubsteps; ++s) {
        const double t = ti + s * h;
        const Vector k1 = p.f(xi, u_at(t), t);
        const Vector k2 = p.f(xi + (0.5 * h) * k1, u_at(t + 0.5 * h), t + 0.5 * h);
        const Vector k3 = p.f(xi + (0.5 * h) * k2, u_at(t + 0.5 * h), t + 0.5 * h);
        const Vector k4 = p.f(xi + h * k3, u_at(t + h), t + h);
        xi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      x.col(i + 1) = xi;
    }
    return evaluate_cost(p, TrajectoryGrid(traj.t0, traj.t_f, std::move(x), std::move(u)));
  };

  const double plus = cost_with_bump(bump);
  const double minus = cost_with_bump(-bump);
  // Normalizing by the node's trapezoid mass turns the nodal bump into a
  // unit-mass functional perturbation, so the quotient approximates p_u there.
  return (plus - minus) / (2.0 * bump * w[node]);
}

}  // namespace vem
