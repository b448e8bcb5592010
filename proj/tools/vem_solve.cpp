// Command-line front end: pick a built-in problem, configure grid, gains and
// tolerances, run the variation evolution, and write machine-readable
// histories, trajectories, costates and a summary report.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "vem/diagnostics.hpp"
#include "vem/errors.hpp"
#include "vem/evolution.hpp"
#include "vem/problems.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// 17 significant digits round-trip doubles losslessly.
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string tau_label(double tau) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", tau);
  return buf;
}

void write_trajectory_csv(const fs::path& path, const vem::TrajectoryGrid& traj) {
  std::ofstream out(path, std::ios::binary);
  const int n = static_cast<int>(traj.x.rows());
  const int m = static_cast<int>(traj.u.rows());
  out << "t";
  for (int r = 0; r < n; ++r) out << ",x_" << (r + 1);
  for (int r = 0; r < m; ++r) out << ",u_" << (r + 1);
  out << "\n";
  for (int i = 0; i < traj.node_count(); ++i) {
    out << num(traj.node_time(i));
    for (int r = 0; r < n; ++r) out << "," << num(traj.x(r, i));
    for (int r = 0; r < m; ++r) out << "," << num(traj.u(r, i));
    out << "\n";
  }
}

vem::Matrix read_matrix_csv(const fs::path& path, int size) {
  std::ifstream in(path);
  if (!in) throw vem::DimensionError("cannot open gain matrix file " + path.string());
  vem::Matrix k(size, size);
  std::string line;
  int row = 0;
  while (std::getline(in, line) && row < size) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',') && col < size) {
      k(row, col) = std::stod(cell);
      ++col;
    }
    if (col != size) throw vem::DimensionError("gain matrix row has wrong width");
    ++row;
  }
  if (row != size) throw vem::DimensionError("gain matrix has too few rows");
  return k;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal control by variation evolution"};

  std::string problem_name;
  int nodes = 0;
  double gain_scale = 0.1;
  std::string gain_matrix_file;
  double k_tf = 0.05;
  vem::EvolutionConfig cfg;
  std::string out_dir;
  bool serial = false;
  bool no_grid_advection = false;

  app.add_option("--problem", problem_name, "double-integrator | brachistochrone")
      ->required();
  app.add_option("--nodes", nodes, "grid node count (default 41 or 101 by problem)");
  app.add_option("--gain-scale", gain_scale, "control gain K = scale * I")->capture_default_str();
  app.add_option("--gain-matrix", gain_matrix_file, "CSV file with a full m x m gain matrix");
  app.add_option("--k-tf", k_tf, "terminal-time gain")->capture_default_str();
  app.add_option("--tau-max", cfg.tau_max, "variation-time horizon")->capture_default_str();
  app.add_option("--rel-tol", cfg.rel_tol, "integrator relative tolerance")->capture_default_str();
  app.add_option("--abs-tol", cfg.abs_tol, "integrator absolute tolerance")->capture_default_str();
  app.add_option("--residual-tol", cfg.residual_tol, "optimality residual stop threshold")->capture_default_str();
  app.add_option("--feasibility-tol", cfg.feasibility_tol, "feasibility ceiling")->capture_default_str();
  app.add_option("--snapshot-every", cfg.snapshot_every, "history record interval")->capture_default_str();
  app.add_option("--out", out_dir, "output directory (default: VEM_OUTPUT_DIR or .)");
  app.add_flag("--serial", serial, "disable OpenMP kernels");
  app.add_flag("--no-grid-advection", no_grid_advection,
               "drop the moving-grid transport term (free terminal time)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e, std::cerr, std::cerr);
    return 1;
  }

  if (out_dir.empty()) {
    const char* env = std::getenv("VEM_OUTPUT_DIR");
    out_dir = (env && *env) ? env : ".";
  }
  cfg.exec = serial ? vem::Exec::Serial : vem::Exec::Parallel;
  cfg.grid_advection = !no_grid_advection;

  vem::BuiltinProblem bp{vem::BuiltinTag::DoubleIntegrator, {}};
  try {
    bp = vem::builtin_problem(problem_name);
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    const int N = nodes > 0 ? nodes : vem::default_node_count(bp.tag);
    const vem::TrajectoryGrid init = vem::default_init(bp.tag, N);
    const vem::GainConfig gains =
        gain_matrix_file.empty()
            ? vem::GainConfig::scaled_identity(bp.model.m, gain_scale, k_tf)
            : vem::GainConfig(read_matrix_csv(gain_matrix_file, bp.model.m), k_tf);

    const fs::path dir(out_dir);
    fs::create_directories(dir);

    std::ofstream history(dir / "history.csv", std::ios::binary);
    history << "tau,J,res_u,res_tf,t_f,g_drift";
    for (int k = 0; k < bp.model.q; ++k) history << ",pi_" << (k + 1);
    history << "\n";

    const auto on_snapshot = [&](const vem::Snapshot& s,
                                 const vem::TrajectoryGrid& traj) {
      history << num(s.tau) << "," << num(s.J) << "," << num(s.residual_u) << ","
              << num(s.residual_tf) << "," << num(s.t_f) << "," << num(s.g_drift);
      for (int k = 0; k < s.pi.size(); ++k) history << "," << num(s.pi[k]);
      history << "\n";
      write_trajectory_csv(dir / ("trajectory_" + tau_label(s.tau) + ".csv"), traj);
    };

    const auto t_start = std::chrono::steady_clock::now();
    const vem::SolveReport report = vem::evolve(bp.model, init, gains, cfg, on_snapshot);
    const double wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    // costates reconstructed at the final snapshot
    {
      const vem::TrajectoryGrid& traj = report.trajectory;
      const vem::NodalData nd = vem::evaluate_nodes(bp.model, traj, cfg.exec);
      const vem::TransitionSet ts = vem::build_transition_set(bp.model, traj, nd, cfg.exec);
      vem::Vector pi = report.history.back().pi;
      const vem::CostateTrajectory ct =
          vem::reconstruct_costates(bp.model, traj, ts, pi, nd, cfg.exec);
      std::ofstream costates(dir / "costates.csv", std::ios::binary);
      costates << "t";
      for (int r = 0; r < bp.model.n; ++r) costates << ",gamma_" << (r + 1);
      costates << "\n";
      for (int i = 0; i < traj.node_count(); ++i) {
        costates << num(traj.node_time(i));
        for (int r = 0; r < bp.model.n; ++r) costates << "," << num(ct.gamma(r, i));
        costates << "\n";
      }
    }

    const vem::Snapshot& last = report.history.back();
    json j;
    j["problem"] = problem_name;
    j["nodes"] = N;
    j["stop_reason"] = vem::to_string(report.stop_reason);
    j["message"] = report.message;
    j["final_tau"] = last.tau;
    j["final_J"] = last.J;
    j["final_t_f"] = last.t_f;
    j["final_residual_u"] = last.residual_u;
    j["final_residual_tf"] = last.residual_tf;
    j["final_g_drift"] = last.g_drift;
    j["final_pi"] = std::vector<double>(last.pi.data(), last.pi.data() + last.pi.size());
    j["snapshots"] = report.history.size();
    j["rhs_evaluations"] = report.rhs_evaluations;
    j["steps_accepted"] = report.steps_accepted;
    j["steps_rejected"] = report.steps_rejected;
    j["wall_time_s"] = wall_s;
    std::ofstream(dir / "report.json") << j.dump(2) << "\n";

    std::cout << "stop: " << vem::to_string(report.stop_reason)
              << "  tau: " << last.tau << "  J: " << last.J
              << "  t_f: " << last.t_f << "  res_u: " << last.residual_u << "\n";

    const bool ok = report.stop_reason == vem::StopReason::ResidualMet ||
                    report.stop_reason == vem::StopReason::TauMaxReached;
    if (!ok) std::cerr << "solve failed: " << report.message << "\n";
    return ok ? 0 : 2;
  } catch (const vem::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }
}
