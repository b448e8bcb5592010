#pragma once

#include <cmath>
#include <random>

#include "vem/model.hpp"
#include "vem/problems.hpp"

namespace vem::testing {

/// Analytic minimum-energy double-integrator trajectory sampled on N nodes:
/// x1 = 0.5 t^3 - 1.75 t^2 + t + 1, x2 = x1', u = 3t - 3.5. Exactly feasible.
inline TrajectoryGrid analytic_optimum_grid(int N) {
  Matrix x(2, N), u(1, N);
  for (int i = 0; i < N; ++i) {
    const double t = 2.0 * (static_cast<double>(i) / (N - 1));
    x(0, i) = 0.5 * t * t * t - 1.75 * t * t + t + 1.0;
    x(1, i) = 1.5 * t * t - 3.5 * t + 1.0;
    u(0, i) = 3.0 * t - 3.5;
  }
  return TrajectoryGrid(0.0, 2.0, std::move(x), std::move(u));
}

/// Double integrator with a state-dependent running cost, so the costate
/// reconstruction has a genuine quadrature tail.
inline ProblemModel lq_problem() {
  ProblemModel p = double_integrator();
  p.L = [](const Vector& x, const Vector& u, double) {
    return 0.5 * (u[0] * u[0] + x[0] * x[0]);
  };
  p.L_x = [](const Vector& x, const Vector&, double) {
    Vector v(2);
    v << x[0], 0.0;
    return v;
  };
  validate_model(p);
  return p;
}

/// Free-terminal-state, free-terminal-time double integrator with a terminal
/// cost pulling x1 toward 2; q == 0 exercises the multiplier-free path with
/// nonzero gradients everywhere.
inline ProblemModel free_endpoint_problem() {
  ProblemModel p = double_integrator();
  p.q = 0;
  p.g = nullptr;
  p.g_x = nullptr;
  p.g_t = nullptr;
  p.tf_mode = TerminalTimeMode::Free;
  p.phi = [](const Vector& x, double) { return 0.5 * (x[0] - 2.0) * (x[0] - 2.0); };
  p.phi_x = [](const Vector& x, double) {
    Vector v(2);
    v << x[0] - 2.0, 0.0;
    return v;
  };
  p.phi_xx = [](const Vector&, double) {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = 1.0;
    return h;
  };
  validate_model(p);
  return p;
}

/// Random stable linear dynamics with quadratic cost, for the structure
/// properties that hold on any linear system.
inline ProblemModel random_linear_problem(unsigned seed, int n = 3, int m = 2) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix a(n, n), b(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = 0.5 * dist(rng);
  a -= 0.8 * Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) b(i, j) = dist(rng);
  Vector x0(n);
  for (int i = 0; i < n; ++i) x0[i] = dist(rng);

  ProblemModel p;
  p.n = n;
  p.m = m;
  p.q = 0;
  p.t0 = 0.0;
  p.x0 = x0;
  p.tf_mode = TerminalTimeMode::Fixed;
  p.tf_fixed = 2.0;
  p.f = [a, b](const Vector& x, const Vector& u, double) -> Vector { return a * x + b * u; };
  p.f_x = [a](const Vector&, const Vector&, double) { return a; };
  p.f_u = [b](const Vector&, const Vector&, double) { return b; };
  p.L = [](const Vector&, const Vector& u, double) { return 0.5 * u.squaredNorm(); };
  p.L_x = [n](const Vector&, const Vector&, double) { return Vector::Zero(n).eval(); };
  p.L_u = [](const Vector&, const Vector& u, double) { return u; };
  p.phi = [](const Vector&, double) { return 0.0; };
  p.phi_x = [n](const Vector&, double) { return Vector::Zero(n).eval(); };
  p.phi_t = [](const Vector&, double) { return 0.0; };
  p.phi_tx = [n](const Vector&, double) { return Vector::Zero(n).eval(); };
  p.phi_xx = [n](const Vector&, double) { return Matrix::Zero(n, n).eval(); };
  validate_model(p);
  return p;
}

/// Grid with random smooth-ish nodal values for a given problem.
inline TrajectoryGrid random_grid(const ProblemModel& p, int N, double t_f,
                                  unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix x(p.n, N), u(p.m, N);
  for (int i = 0; i < N; ++i) {
    for (int r = 0; r < p.n; ++r) x(r, i) = dist(rng);
    for (int r = 0; r < p.m; ++r) u(r, i) = dist(rng);
  }
  x.col(0) = p.x0;
  return TrajectoryGrid(p.t0, t_f, std::move(x), std::move(u));
}

}  // namespace vem::testing
