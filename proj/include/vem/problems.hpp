#pragma once

#include <string>

#include "vem/model.hpp"

namespace vem {

enum class BuiltinTag { DoubleIntegrator, Brachistochrone };

struct BuiltinProblem {
  BuiltinTag tag;
  ProblemModel model;
};

/// Minimum-energy double integrator: xdot = [x2, u], L = u^2/2, both terminal
/// states pinned to zero, fixed t_f = 2, x0 = [1, 1].
ProblemModel double_integrator();

/// Brachistochrone with gravity 10: state [x, y, V], J = t_f, terminal
/// position pinned to [2, -2], terminal speed free, free terminal time.
ProblemModel brachistochrone();

BuiltinProblem builtin_problem(BuiltinTag tag);
BuiltinProblem builtin_problem(const std::string& name);  // "double-integrator" | "brachistochrone"
const char* builtin_name(BuiltinTag tag);
int default_node_count(BuiltinTag tag);

/// Feasible start for the double integrator: integrates the damped
/// time-varying feedback law u = -w^2 x1 - 2 w xi x2 (w = 5t, xi = 0.707)
/// with fixed-step RK4, 10 substeps per node interval. Warns on stderr if the
/// terminal miss exceeds `warn_tol`.
TrajectoryGrid init_feedback_double_integrator(int node_count,
                                               double warn_tol = 0.05);

/// Feasible start for the brachistochrone: uniform acceleration along the
/// straight chord to the target, sampled in closed form. Exactly feasible.
TrajectoryGrid init_straightline_brachistochrone(int node_count);

TrajectoryGrid default_init(BuiltinTag tag, int node_count);

/// Independent check value for the control gradient: bumps control component
/// `component` at node `node` by +-bump (t_f frozen), re-integrates the state
/// from x0 with fixed-step RK4 (10 substeps per interval, controls
/// interpolated linearly), and central-differences the cost. The result is
/// normalized by the node's trapezoid mass so it approximates the functional
/// gradient, directly comparable to p_u at that node.
double finite_difference_gradient_oracle(const ProblemModel& problem,
                                         const TrajectoryGrid& traj, int node,
                                         int component, double bump);

}  // namespace vem
