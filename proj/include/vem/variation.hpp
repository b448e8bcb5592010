#pragma once

#include "vem/model.hpp"
#include "vem/transition.hpp"

namespace vem {

/// Costate-free cost gradient with respect to the control, evaluated at every
/// node, together with the inner integrand w and the tail integrals it needs:
///   w(t)    = L_x + phi_tx + phi_xx^T f + f_x^T phi_x
///   tail(t) = integral over [t, t_f] of Phi^T(s, t) w(s) ds
///   p_u(t)  = L_u + f_u^T (phi_x + tail)
struct GradientField {
  Matrix p_u;   ///< m x N
  Matrix w;     ///< n x N
  Matrix tail;  ///< n x N, zero in the last column
};

GradientField compute_gradient_field(const ProblemModel& problem,
                                     const TrajectoryGrid& traj,
                                     const TransitionSet& ts,
                                     Exec exec = Exec::Parallel);
GradientField compute_gradient_field(const ProblemModel& problem,
                                     const TrajectoryGrid& traj,
                                     const TransitionSet& ts,
                                     const NodalData& nodes,
                                     Exec exec = Exec::Parallel);

/// Linear system M pi = -r that pins the terminal-constraint multiplier.
struct MultiplierSystem {
  Matrix M;  ///< q x q, symmetrized Gram-type assembly
  Vector r;
  Vector pi;
  bool singular = false;
};

/// Assembles M and r by trapezoidal quadrature of the transition-propagated
/// control directions and solves for pi with partially pivoted LU. For fixed
/// terminal time the k_tf terms drop out. Requires q >= 1; for q == 0 skip
/// the multiplier entirely (empty pi). Throws ControllabilityError when M is
/// singular to working precision or a constraint row has no state dependence.
MultiplierSystem assemble_multiplier_system(const ProblemModel& problem,
                                            const TrajectoryGrid& traj,
                                            const TransitionSet& ts,
                                            const GradientField& gf,
                                            const GainConfig& gains,
                                            Exec exec = Exec::Parallel);
MultiplierSystem assemble_multiplier_system(const ProblemModel& problem,
                                            const TrajectoryGrid& traj,
                                            const TransitionSet& ts,
                                            const GradientField& gf,
                                            const GainConfig& gains,
                                            const NodalData& nodes,
                                            Exec exec = Exec::Parallel);

/// Control and terminal-time descent rates in variation time.
struct ControlRates {
  Matrix du_dtau;       ///< m x N
  double dtf_dtau = 0;  ///< 0 in Fixed mode
};

/// du/dtau = -K (p_u + f_u^T Phi^T(t_f, t) g_x^T pi) per node, and
/// dtf/dtau = -k_tf (L + phi_t + phi_x^T f + pi^T (g_x f + g_t)) at t_f.
/// With q == 0 the pi terms vanish and the rates reduce to the
/// free-terminal-state forms.
ControlRates control_and_tf_rates(const ProblemModel& problem,
                                  const TrajectoryGrid& traj,
                                  const TransitionSet& ts,
                                  const GradientField& gf,
                                  const MultiplierSystem& ms,
                                  const GainConfig& gains,
                                  Exec exec = Exec::Parallel);
ControlRates control_and_tf_rates(const ProblemModel& problem,
                                  const TrajectoryGrid& traj,
                                  const TransitionSet& ts,
                                  const GradientField& gf,
                                  const MultiplierSystem& ms,
                                  const GainConfig& gains,
                                  const NodalData& nodes,
                                  Exec exec = Exec::Parallel);

/// State rate induced by a control rate: integrates the linear time-varying
/// variational equation d(dx)/dt = f_x dx + f_u du_dtau from dx(t0) = 0 with
/// RK4 node to node (coefficients interpolated linearly between nodes).
/// Returns the n x N matrix of nodal rates; column 0 is exactly zero.
Matrix state_rate(const ProblemModel& problem, const TrajectoryGrid& traj,
                  const Matrix& du_dtau);
Matrix state_rate(const ProblemModel& problem, const TrajectoryGrid& traj,
                  const Matrix& du_dtau, const NodalData& nodes);

/// Bundled rates of one evolution step.
struct EvolutionRates {
  Matrix du_dtau;  ///< m x N
  Matrix dx_dtau;  ///< n x N
  double dtf_dtau = 0;
  Vector pi;  ///< multiplier used to form the rates (empty when q == 0)
};

/// Residual of the first-order constraint-tangency condition for the given
/// rates: |g_x * trapz(Phi(t_f,t) f_u du_dtau) + (g_x f + g_t) dtf_dtau|_inf.
/// Zero (to solver roundoff) when pi solves the multiplier system assembled
/// with the same quadrature. Returns 0 when q == 0.
double tangency_residual(const ProblemModel& problem, const TrajectoryGrid& traj,
                         const TransitionSet& ts, const ControlRates& rates,
                         const NodalData& nodes);

/// Directional derivative of the cost along the rates,
///   dJ/dtau = (phi_t + phi_x^T f + L)|_{t_f} dtf_dtau + trapz(p_u^T du_dtau),
/// the form that the descent inequality bounds by zero.
double cost_descent_rate(const ProblemModel& problem, const TrajectoryGrid& traj,
                         const GradientField& gf, const ControlRates& rates,
                         const NodalData& nodes);

/// The same quantity in its explicitly nonpositive form,
///   -k_tf (.)^2 |_{t_f} - trapz((p_u + corr)^T K (p_u + corr)).
/// Agreement of the two forms is a solver identity worth property-testing.
double cost_descent_rate_quadratic(const ProblemModel& problem,
                                   const TrajectoryGrid& traj,
                                   const TransitionSet& ts,
                                   const GradientField& gf,
                                   const MultiplierSystem& ms,
                                   const GainConfig& gains,
                                   const NodalData& nodes);

}  // namespace vem
