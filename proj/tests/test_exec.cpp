#include <doctest.h>

#include "support.hpp"
#include "vem/evolution.hpp"
#include "vem/problems.hpp"

using namespace vem;

// The OpenMP kernels must be bitwise identical to the serial reference:
// parallel loops fill disjoint slots and reductions stay serial.

TEST_CASE("serial and parallel right sides agree bitwise") {
  const ProblemModel p = brachistochrone();
  const GainConfig gains = GainConfig::scaled_identity(1, 0.1, 0.05);
  const int N = 501;  // well above the parallel grain
  const TrajectoryGrid traj = init_straightline_brachistochrone(N);
  const Vector flat = pack_state(traj, p.tf_mode);

  const Vector serial = epde_rhs(p, gains, N, flat, true, Exec::Serial);
  const Vector parallel = epde_rhs(p, gains, N, flat, true, Exec::Parallel);
  CHECK((serial - parallel).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("serial and parallel snapshots agree bitwise") {
  const ProblemModel p = brachistochrone();
  const GainConfig gains = GainConfig::scaled_identity(1, 0.1, 0.05);
  const TrajectoryGrid traj = init_straightline_brachistochrone(257);

  const Snapshot a = evaluate_snapshot(p, traj, gains, 0.0, Exec::Serial);
  const Snapshot b = evaluate_snapshot(p, traj, gains, 0.0, Exec::Parallel);
  CHECK(a.J == b.J);
  CHECK(a.residual_u == b.residual_u);
  CHECK(a.residual_tf == b.residual_tf);
  CHECK(a.g_drift == b.g_drift);
  CHECK(a.dyn_residual == b.dyn_residual);
  CHECK((a.pi - b.pi).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("serial and parallel gradient fields agree bitwise on a nonlinear grid") {
  const ProblemModel p = vem::testing::lq_problem();
  const TrajectoryGrid traj = vem::testing::analytic_optimum_grid(321);

  const NodalData nodes_s = evaluate_nodes(p, traj, Exec::Serial);
  const NodalData nodes_p = evaluate_nodes(p, traj, Exec::Parallel);
  const TransitionSet ts_s = build_transition_set(p, traj, nodes_s, Exec::Serial);
  const TransitionSet ts_p = build_transition_set(p, traj, nodes_p, Exec::Parallel);
  const GradientField gf_s = compute_gradient_field(p, traj, ts_s, nodes_s, Exec::Serial);
  const GradientField gf_p = compute_gradient_field(p, traj, ts_p, nodes_p, Exec::Parallel);

  CHECK((gf_s.p_u - gf_p.p_u).cwiseAbs().maxCoeff() == 0.0);
  CHECK((gf_s.tail - gf_p.tail).cwiseAbs().maxCoeff() == 0.0);
  CHECK((gf_s.w - gf_p.w).cwiseAbs().maxCoeff() == 0.0);
  CHECK(ts_s.cond_max == ts_p.cond_max);
}
