// End-to-end acceptance runs for the solver. Each numbered criterion prints
// exactly one PASS/FAIL line; the process exits nonzero if any fails.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "support.hpp"
#include "vem/diagnostics.hpp"
#include "vem/evolution.hpp"
#include "vem/problems.hpp"

using namespace vem;
using vem::testing::analytic_optimum_grid;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& what) {
  std::printf("%s  criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
  if (!ok) ++g_failures;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0,
                double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c, d);
  return buf;
}

struct Run {
  SolveReport rep;
  std::vector<TrajectoryGrid> snapshots;
};

Run solve(const ProblemModel& p, const TrajectoryGrid& init, const GainConfig& gains,
          const EvolutionConfig& cfg) {
  Run run;
  run.rep = evolve(p, init, gains, cfg,
                   [&](const Snapshot&, const TrajectoryGrid& traj) {
                     run.snapshots.push_back(traj);
                   });
  return run;
}

}  // namespace

int main() {
  const GainConfig gains = GainConfig::scaled_identity(1, 0.1, 0.05);
  EvolutionConfig cfg;  // paper setup: tau_max 300, tolerances 1e-3 / 1e-6

  // ---- double integrator end to end (criterion 1) ----
  const ProblemModel di = double_integrator();
  const Run run1 = solve(di, init_feedback_double_integrator(41), gains, cfg);
  const Snapshot& last1 = run1.rep.history.back();
  {
    const TrajectoryGrid& traj = run1.rep.trajectory;
    double u_err = 0.0;
    for (int i = 0; i < 41; ++i) {
      u_err = std::max(u_err,
                       std::abs(traj.u(0, i) - (3.0 * traj.node_time(i) - 3.5)));
    }
    const NodalData nodes = evaluate_nodes(di, traj);
    const TransitionSet ts = build_transition_set(di, traj, nodes);
    const CostateTrajectory ct = reconstruct_costates(di, traj, ts, last1.pi, nodes);
    double gamma_err = 0.0;
    for (int i = 0; i < 41; ++i) {
      const double t = traj.node_time(i);
      gamma_err = std::max(gamma_err, std::abs(ct.gamma(0, i) - 3.0));
      gamma_err = std::max(gamma_err, std::abs(ct.gamma(1, i) - (-3.0 * t + 3.5)));
    }
    const bool ok = std::abs(last1.J - 3.25) <= 0.01 && u_err <= 0.05 &&
                    std::abs(last1.pi[0] - 3.0) <= 0.01 &&
                    std::abs(last1.pi[1] + 2.5) <= 0.01 && gamma_err <= 0.02;
    report(1, ok,
           fmt("double integrator: |J-3.25| = %.2e, sup|u-u*| = %.2e, "
               "|pi-(3,-2.5)| = (%.2e, %.2e)",
               std::abs(last1.J - 3.25), u_err, std::abs(last1.pi[0] - 3.0),
               std::abs(last1.pi[1] + 2.5)) +
               fmt(", sup|gamma-gamma*| = %.2e", gamma_err));
  }

  // ---- brachistochrone end to end (criterion 2) ----
  const ProblemModel br = brachistochrone();
  const Run run2 = solve(br, init_straightline_brachistochrone(101), gains, cfg);
  const Snapshot& last2 = run2.rep.history.back();
  {
    double max_g = 0.0;
    for (const Snapshot& s : run2.rep.history) max_g = std::max(max_g, s.g_drift);
    const bool ok = std::abs(last2.t_f - 0.8165) <= 0.005 &&
                    std::abs(last2.pi[0] + 0.1477) <= 0.02 &&
                    std::abs(last2.pi[1] - 0.0564) <= 0.02 && max_g <= 0.01;
    report(2, ok,
           fmt("brachistochrone: |t_f-0.8165| = %.2e, |pi-(-0.1477,0.0564)| = "
               "(%.2e, %.2e), max |g| drift = %.2e",
               std::abs(last2.t_f - 0.8165), std::abs(last2.pi[0] + 0.1477),
               std::abs(last2.pi[1] - 0.0564), max_g));
  }

  // ---- multiplier closed form (criterion 3) ----
  {
    const TrajectoryGrid traj = analytic_optimum_grid(2001);
    const NodalData nodes = evaluate_nodes(di, traj);
    const TransitionSet ts = build_transition_set(di, traj, nodes);
    const GradientField gf = compute_gradient_field(di, traj, ts, nodes);
    const MultiplierSystem ms =
        assemble_multiplier_system(di, traj, ts, gf, gains, nodes);
    Matrix m_ref(2, 2);
    m_ref << 8.0 / 3.0, 2.0, 2.0, 2.0;
    m_ref *= 0.1;
    Vector r_ref(2);
    r_ref << -0.3, -0.1;
    const double m_err = (ms.M - m_ref).cwiseAbs().maxCoeff();
    const double r_err = (ms.r - r_ref).cwiseAbs().maxCoeff();
    report(3, m_err <= 1e-6 && r_err <= 1e-6,
           fmt("multiplier closed form: |M - 0.1[[8/3,2],[2,2]]| = %.2e, "
               "|r + 0.1[3,1]| = %.2e",
               m_err, r_err));
  }

  // ---- finite-difference gradient oracle (criterion 4) ----
  {
    bool ok = true;
    double worst = 0.0;
    const auto probe = [&](const ProblemModel& p, const TrajectoryGrid& traj,
                           const std::vector<int>& nodes_idx) {
      const TransitionSet ts = build_transition_set(p, traj);
      const GradientField gf = compute_gradient_field(p, traj, ts);
      for (int node : nodes_idx) {
        const double fd = finite_difference_gradient_oracle(p, traj, node, 0, 1e-4);
        const double pu = gf.p_u(0, node);
        const double rel =
            std::abs(fd - pu) / (1.0 + std::max(std::abs(fd), std::abs(pu)));
        worst = std::max(worst, rel);
        ok = ok && rel <= 1e-3;
      }
    };
    probe(di, init_feedback_double_integrator(41), {5, 13, 20, 27, 35});
    probe(br, init_straightline_brachistochrone(101), {10, 30, 50, 70, 90});
    report(4, ok, fmt("gradient oracle at 5 probe nodes per problem: worst "
                      "relative deviation = %.2e",
                      worst));
  }

  // ---- monotone descent (criterion 5) ----
  {
    const double slack = 10.0 * cfg.abs_tol;
    double worst = -1e300;
    const auto scan = [&](const Run& run) {
      for (size_t k = 1; k < run.rep.history.size(); ++k) {
        worst = std::max(worst, run.rep.history[k].J - run.rep.history[k - 1].J);
      }
    };
    scan(run1);
    scan(run2);
    report(5, worst <= slack,
           fmt("descent: max J increase between snapshots = %.2e (slack %.1e)",
               worst, slack));
  }

  // ---- tangency at every brachistochrone snapshot (criterion 6) ----
  {
    bool ok = true;
    double worst_ratio = 0.0;
    for (const TrajectoryGrid& traj : run2.snapshots) {
      const NodalData nodes = evaluate_nodes(br, traj);
      const TransitionSet ts = build_transition_set(br, traj, nodes);
      const GradientField gf = compute_gradient_field(br, traj, ts, nodes);
      const MultiplierSystem ms =
          assemble_multiplier_system(br, traj, ts, gf, gains, nodes);
      const ControlRates rates =
          control_and_tf_rates(br, traj, ts, gf, ms, gains, nodes);
      const double res = tangency_residual(br, traj, ts, rates, nodes);
      const double bound = 1e-6 * (1.0 + ms.r.cwiseAbs().maxCoeff());
      worst_ratio = std::max(worst_ratio, res / bound);
      ok = ok && res <= bound;
    }
    report(6, ok,
           fmt("tangency over %g snapshots: worst residual/bound = %.2e",
               static_cast<double>(run2.snapshots.size()), worst_ratio));
  }

  // ---- structural identities (criterion 7) ----
  {
    const TrajectoryGrid& traj = run1.rep.trajectory;
    const NodalData nodes = evaluate_nodes(di, traj);
    const TransitionSet ts = build_transition_set(di, traj, nodes);

    bool identity_exact = true;
    for (int i = 0; i < 41; i += 4) {
      identity_exact =
          identity_exact && (transition(ts, i, i) == Matrix::Identity(2, 2));
    }

    double semigroup = 0.0;
    for (int i : {0, 10, 40}) {
      for (int j : {5, 25}) {
        for (int k : {3, 33}) {
          const Matrix lhs = transition(ts, i, k);
          const Matrix rhs = transition(ts, i, j) * transition(ts, j, k);
          semigroup = std::max(semigroup, (lhs - rhs).cwiseAbs().maxCoeff() /
                                              (1.0 + lhs.cwiseAbs().maxCoeff()));
        }
      }
    }

    // endpoint identity of the reconstructed costates at every snapshot
    double endpoint = 0.0;
    const auto scan_endpoint = [&](const ProblemModel& p, const Run& run) {
      for (size_t s = 0; s < run.snapshots.size(); ++s) {
        const TrajectoryGrid& tr = run.snapshots[s];
        const NodalData nd = evaluate_nodes(p, tr);
        const TransitionSet t2 = build_transition_set(p, tr, nd);
        const Vector pi = run.rep.history[s].pi;
        const CostateTrajectory ct = reconstruct_costates(p, tr, t2, pi, nd);
        const int last = tr.node_count() - 1;
        const Vector expected = p.phi_x(tr.x.col(last), tr.t_f) +
                                p.g_x(tr.x.col(last), tr.t_f).transpose() * pi;
        endpoint = std::max(
            endpoint, (ct.gamma.col(last) - expected).cwiseAbs().maxCoeff());
      }
    };
    scan_endpoint(di, run1);
    scan_endpoint(br, run2);

    // bridge between the two control-gradient expressions at every node
    double bridge = 0.0;
    {
      const GradientField gf = compute_gradient_field(di, traj, ts, nodes);
      const CostateTrajectory ct = reconstruct_costates(di, traj, ts, last1.pi, nodes);
      const Matrix g_x = di.g_x(traj.x.col(40), traj.t_f);
      const Vector zn = ts.psi[40].transpose() * (g_x.transpose() * last1.pi);
      for (int i = 0; i < 41; ++i) {
        const Vector lhs = nodes.L_u[i] + nodes.f_u[i].transpose() * ct.gamma.col(i);
        const Vector rhs =
            gf.p_u.col(i) +
            nodes.f_u[i].transpose() * (ts.psi_inv[i].transpose() * zn);
        bridge = std::max(bridge, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    }

    const bool ok =
        identity_exact && semigroup <= 1e-8 && endpoint <= 1e-10 && bridge <= 1e-9;
    report(7, ok,
           fmt("structure: Phi(t,t) exact = %g, semigroup = %.2e, costate "
               "endpoint = %.2e, gradient bridge = %.2e",
               identity_exact ? 1.0 : 0.0, semigroup, endpoint, bridge));
  }

  // ---- stationarity diagnostic at convergence (criterion 8) ----
  {
    const TrajectoryGrid& traj = run1.rep.trajectory;
    const NodalData nodes = evaluate_nodes(di, traj);
    const TransitionSet ts = build_transition_set(di, traj, nodes);
    const GradientField gf = compute_gradient_field(di, traj, ts, nodes);

    const MultiplierSystem low = assemble_multiplier_system(
        di, traj, ts, gf, GainConfig::scaled_identity(1, 0.1, 0.05), nodes);
    const MultiplierSystem high = assemble_multiplier_system(
        di, traj, ts, gf, GainConfig::scaled_identity(1, 1.0, 0.05), nodes);
    const double res_low = stationarity_check(di, traj, ts, gf, low.pi);
    const double res_high = stationarity_check(di, traj, ts, gf, high.pi);
    const bool ok = res_low <= 1e-4 && std::abs(res_low - res_high) <= 1e-12;
    report(8, ok,
           fmt("stationarity at convergence: residual = %.2e, gain dependence "
               "= %.2e",
               res_low, std::abs(res_low - res_high)));
  }

  // ---- grid-halving order checks (criterion 9) ----
  {
    const double j_err_coarse =
        std::abs(evaluate_cost(di, analytic_optimum_grid(41)) - 3.25);
    const double j_err_fine =
        std::abs(evaluate_cost(di, analytic_optimum_grid(81)) - 3.25);
    const double j_ratio = j_err_coarse / j_err_fine;

    const auto costate_residual = [&](int N) {
      EvolutionConfig c2 = cfg;
      const Run run = solve(di, init_feedback_double_integrator(N), gains, c2);
      const TrajectoryGrid& tr = run.rep.trajectory;
      const NodalData nd = evaluate_nodes(di, tr);
      const TransitionSet t2 = build_transition_set(di, tr, nd);
      const CostateTrajectory ct =
          reconstruct_costates(di, tr, t2, run.rep.history.back().pi, nd);
      return classical_condition_check(di, ct, tr).costate_ode;
    };
    const double g_coarse = costate_residual(41);
    const double g_fine = costate_residual(81);
    // The reconstructed costates of this problem are affine in t, so the
    // differencing residual sits at roundoff at every N; below the floor the
    // order is not measurable and the check degenerates to the floor itself.
    const double floor = 1e-12;
    const bool gamma_ok =
        (g_coarse >= 3.0 * g_fine) || (g_coarse <= floor && g_fine <= floor);
    const bool ok = j_ratio >= 3.0 && gamma_ok;
    report(9, ok,
           fmt("order: J error %.3e -> %.3e (ratio %.2f), costate-ODE residual "
               "%.2e -> ",
               j_err_coarse, j_err_fine, j_ratio, g_coarse) +
               fmt("%.2e (roundoff floor %.0e)", g_fine, floor));
  }

  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria failed\n", g_failures);
  return 1;
}
