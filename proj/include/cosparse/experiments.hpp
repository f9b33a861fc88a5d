#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cosparse/frame.hpp"
#include "cosparse/solver.hpp"

namespace cosparse {

struct FrameSpec {
  bool tight = true;
  double ratio = 1.0;  // target B/A when not tight
};

struct ExperimentConfig {
  int d = 40;
  int p = 50;
  FrameSpec frame_spec;
  // Explicit cells: when s_list is empty, phase_curve searches s upward per
  // m until the success rate drops below success_target.
  std::vector<int> s_list;
  // When empty, defaults to 2, 4, ..., d.
  std::vector<int> m_grid;
  int trials = 70;
  double success_tol = 1e-5;     // l2 error under which a trial is a success
  double success_target = 0.98;  // rate defining the frontier
  double eta = 0.0;              // > 0 switches trials to the noisy solver
  std::uint64_t master_seed = 1;
  int threads = 1;
  SolverOptions solver;
};

// Desk-scale defaults (d=40, p=50) and the full-scale geometry (d=200, p=250).
ExperimentConfig desk_config();
ExperimentConfig full_config();

// Reads ExperimentConfig fields from a JSON file; missing fields keep the
// desk defaults. frame_spec is {"tight": bool, "ratio": number}.
ExperimentConfig config_from_json(const std::string& path);

struct CellResult {
  int s = 0;
  int m = 0;
  int successes = 0;
  int trials = 0;
  double mean_error = 0.0;  // over trials with finite error
  int solver_failures = 0;  // MaxIters or per-trial exceptions
  std::uint64_t seed = 0;   // cell stream key
  double rate() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
};

// Frame drawn from the master seed (shared by every cell of the experiment).
Frame build_frame(const ExperimentConfig& cfg);

// One (s, m) cell: `trials` fresh (signal, M) draws solved and scored
// against success_tol. Trial seeds derive from (master_seed, s, m, trial),
// so results do not depend on execution order or thread count. A requested
// cosparsity p - s is capped at d - 1 (no nonzero signal has cosparsity >= d).
CellResult run_cell(const ExperimentConfig& cfg, const Frame& frame, int s, int m);

struct FrontierRow {
  int m = 0;
  int max_s = 0;  // isotonic (running max over ascending m)
  int theory_m_nonuniform = 0;  // bound at s = max_s, eps = 0.02 (0 when max_s = 0)
};

struct PhaseCurve {
  std::vector<CellResult> cells;
  std::vector<FrontierRow> frontier;
  double ratio = 1.0;  // realized B/A
  std::uint64_t master_seed = 0;
};

// Sweep of the (s, m) plane per the config; the frontier records, for each m,
// the maximal s whose success rate clears success_target.
PhaseCurve phase_curve(const ExperimentConfig& cfg);

// curve.csv: s,m,successes,trials,rate,mean_error,ratio,seed
void write_curve_csv(const std::string& path, const PhaseCurve& curve);
// frontier.csv: m,max_s,theory_m_nonuniform
void write_frontier_csv(const std::string& path, const PhaseCurve& curve);

}  // namespace cosparse
