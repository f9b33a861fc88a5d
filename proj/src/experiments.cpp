#include "cosparse/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

#include "cosparse/bounds.hpp"
#include "cosparse/errors.hpp"
#include "cosparse/io.hpp"
#include "cosparse/model.hpp"
#include "cosparse/parallel.hpp"
#include "cosparse/rng.hpp"

namespace cosparse {

namespace {

std::vector<int> default_m_grid(int d) {
  std::vector<int> grid;
  for (int m = 2; m <= d; m += 2) grid.push_back(m);
  return grid;
}

struct TrialOutcome {
  bool success = false;
  bool failure = false;  // solver MaxIters or exception
  double error = std::numeric_limits<double>::quiet_NaN();
};

TrialOutcome run_trial(const ExperimentConfig& cfg, const Frame& frame, int s, int m,
                       int trial) {
  TrialOutcome out;
  // Key layout: 2 tags experiment trials (0 reserved, 1 is the frame).
  rng::Stream trial_stream = rng::Stream(cfg.master_seed)
                                 .child({2ULL, static_cast<std::uint64_t>(s),
                                         static_cast<std::uint64_t>(m),
                                         static_cast<std::uint64_t>(trial)});
  try {
    const int l_req = static_cast<int>(frame.p()) - s;
    const int l = std::min(l_req, static_cast<int>(frame.d()) - 1);
    rng::Stream sig_stream = trial_stream.child(0);
    rng::Stream inst_stream = trial_stream.child(1);
    CosparseSignal signal = synth_cosparse(frame, l, sig_stream);
    SensingInstance inst = gaussian_instance(frame, signal, m, cfg.eta, inst_stream);
    SolveResult res = cfg.eta > 0.0
                          ? solve_abpdn(frame, inst.M, inst.y, cfg.eta, cfg.solver)
                          : solve_abp(frame, inst.M, inst.y, cfg.solver);
    out.error = (res.z - signal.x).norm();
    if (res.status != SolveStatus::Converged) {
      out.failure = true;
    } else {
      out.success = out.error < cfg.success_tol;
    }
  } catch (const Error&) {
    out.failure = true;
  }
  return out;
}

}  // namespace

ExperimentConfig desk_config() { return ExperimentConfig{}; }

ExperimentConfig full_config() {
  ExperimentConfig cfg;
  cfg.d = 200;
  cfg.p = 250;
  return cfg;
}

ExperimentConfig config_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad config JSON: " + std::string(e.what()));
  }
  ExperimentConfig cfg = desk_config();
  try {
    if (j.contains("d")) cfg.d = j["d"].get<int>();
    if (j.contains("p")) cfg.p = j["p"].get<int>();
    if (j.contains("frame_spec")) {
      const auto& f = j["frame_spec"];
      if (f.contains("tight")) cfg.frame_spec.tight = f["tight"].get<bool>();
      if (f.contains("ratio")) cfg.frame_spec.ratio = f["ratio"].get<double>();
    }
    if (j.contains("s_list")) cfg.s_list = j["s_list"].get<std::vector<int>>();
    if (j.contains("m_grid")) cfg.m_grid = j["m_grid"].get<std::vector<int>>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
    if (j.contains("success_tol")) cfg.success_tol = j["success_tol"].get<double>();
    if (j.contains("success_target"))
      cfg.success_target = j["success_target"].get<double>();
    if (j.contains("eta")) cfg.eta = j["eta"].get<double>();
    if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    if (j.contains("max_iters")) cfg.solver.max_iters = j["max_iters"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad config field: " + std::string(e.what()));
  }
  return cfg;
}

Frame build_frame(const ExperimentConfig& cfg) {
  if (cfg.d < 1 || cfg.p < cfg.d) throw InvalidArgument("need p >= d >= 1");
  rng::Stream frame_stream = rng::Stream(cfg.master_seed).child(1);
  if (cfg.frame_spec.tight) return tight_frame(cfg.p, cfg.d, frame_stream);
  return frame_with_ratio(cfg.p, cfg.d, cfg.frame_spec.ratio, frame_stream);
}

CellResult run_cell(const ExperimentConfig& cfg, const Frame& frame, int s, int m) {
  if (s < 1 || s >= frame.p()) throw InvalidArgument("cell s out of range");
  if (m < 1) throw InvalidArgument("cell m out of range");
  if (cfg.trials < 1) throw InvalidArgument("need at least one trial");
  CellResult cell;
  cell.s = s;
  cell.m = m;
  cell.trials = cfg.trials;
  cell.seed = rng::Stream(cfg.master_seed)
                  .child({2ULL, static_cast<std::uint64_t>(s),
                          static_cast<std::uint64_t>(m)})
                  .key();
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.trials));
  parallel::for_each_index(cfg.trials, cfg.threads, [&](int t) {
    outcomes[static_cast<std::size_t>(t)] = run_trial(cfg, frame, s, m, t);
  });
  double err_sum = 0.0;
  int err_n = 0;
  for (const TrialOutcome& o : outcomes) {
    if (o.success) ++cell.successes;
    if (o.failure) ++cell.solver_failures;
    if (std::isfinite(o.error)) {
      err_sum += o.error;
      ++err_n;
    }
  }
  cell.mean_error = err_n ? err_sum / err_n : std::numeric_limits<double>::quiet_NaN();
  return cell;
}

PhaseCurve phase_curve(const ExperimentConfig& cfg) {
  PhaseCurve curve;
  curve.master_seed = cfg.master_seed;
  Frame frame = build_frame(cfg);
  curve.ratio = frame.ratio();
  const std::vector<int> m_grid =
      cfg.m_grid.empty() ? default_m_grid(cfg.d) : cfg.m_grid;

  std::map<int, int> frontier_s;  // m -> maximal passing s
  for (int m : m_grid) frontier_s[m] = 0;

  if (cfg.s_list.empty()) {
    // Search upward in s per m; the first failing s ends the column.
    for (int m : m_grid) {
      for (int s = 1; s < cfg.p; ++s) {
        CellResult cell = run_cell(cfg, frame, s, m);
        curve.cells.push_back(cell);
        if (cell.rate() >= cfg.success_target) {
          frontier_s[m] = s;
        } else {
          break;
        }
      }
    }
  } else {
    for (int s : cfg.s_list) {
      for (int m : m_grid) {
        CellResult cell = run_cell(cfg, frame, s, m);
        curve.cells.push_back(cell);
        if (cell.rate() >= cfg.success_target && s > frontier_s[m]) {
          frontier_s[m] = s;
        }
      }
    }
  }

  int running_max = 0;
  for (int m : m_grid) {
    running_max = std::max(running_max, frontier_s[m]);
    FrontierRow row;
    row.m = m;
    row.max_s = running_max;
    if (running_max > 0) {
      BoundQuery q;
      q.A = frame.bound_lower;
      q.B = frame.bound_upper;
      q.s = running_max;
      q.p = cfg.p;
      q.eps = 0.02;
      row.theory_m_nonuniform = m_nonuniform(q);
    }
    curve.frontier.push_back(row);
  }
  return curve;
}

void write_curve_csv(const std::string& path, const PhaseCurve& curve) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(curve.cells.size());
  for (const CellResult& c : curve.cells) {
    rows.push_back({std::to_string(c.s), std::to_string(c.m),
                    std::to_string(c.successes), std::to_string(c.trials),
                    io::format_double(c.rate()), io::format_double(c.mean_error),
                    io::format_double(curve.ratio), std::to_string(c.seed)});
  }
  io::write_table_csv(path, {"s", "m", "successes", "trials", "rate", "mean_error",
                             "ratio", "seed"},
                      rows);
}

void write_frontier_csv(const std::string& path, const PhaseCurve& curve) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(curve.frontier.size());
  for (const FrontierRow& r : curve.frontier) {
    rows.push_back({std::to_string(r.m), std::to_string(r.max_s),
                    std::to_string(r.theory_m_nonuniform)});
  }
  io::write_table_csv(path, {"m", "max_s", "theory_m_nonuniform"}, rows);
}

}  // namespace cosparse
