// Command-line front end: frame, signal, solve, bounds, width, nsp, phase.
// Exit codes: 0 success, 1 domain failure, 2 usage or I/O error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cosparse/bounds.hpp"
#include "cosparse/errors.hpp"
#include "cosparse/experiments.hpp"
#include "cosparse/frame.hpp"
#include "cosparse/geometry.hpp"
#include "cosparse/io.hpp"
#include "cosparse/model.hpp"
#include "cosparse/nsp.hpp"
#include "cosparse/rng.hpp"
#include "cosparse/solver.hpp"

namespace {

using nlohmann::json;

struct GlobalOpts {
  std::optional<std::uint64_t> seed_flag;
  std::string out;
  std::string format = "json";
  bool quiet = false;
  int threads = 1;
};

// Precedence: --seed flag, then COSPARSE_SEED, then 1.
std::uint64_t resolve_seed(const GlobalOpts& g) {
  if (g.seed_flag) return *g.seed_flag;
  if (const char* env = std::getenv("COSPARSE_SEED")) {
    std::string text(env);
    try {
      std::size_t pos = 0;
      const std::uint64_t value = std::stoull(text, &pos);
      if (pos != text.size()) throw std::invalid_argument(text);
      return value;
    } catch (const std::exception&) {
      throw cosparse::InvalidArgument("COSPARSE_SEED is not an unsigned integer: " + text);
    }
  }
  return 1;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

// One document per invocation on stdout. CSV format flattens scalar fields
// to key,value lines so both formats expose the same data.
void emit(const json& doc, const GlobalOpts& g) {
  if (g.format == "csv") {
    for (const auto& [key, value] : doc.items()) {
      if (value.is_array()) {
        std::string line = key;
        for (const auto& cell : value) line += "," + cell.dump();
        std::cout << line << "\n";
      } else {
        std::cout << key << "," << value.dump() << "\n";
      }
    }
  } else {
    std::cout << doc.dump(2) << "\n";
  }
  if (!g.out.empty()) cosparse::io::write_text_file(g.out, doc.dump(2) + "\n");
}

void note_seed(std::uint64_t seed, const GlobalOpts& g) {
  if (!g.quiet) std::cerr << "seed=" << seed << "\n";
}

// frame: draw (or check) an analysis operator and report its bounds.
int cmd_frame(const GlobalOpts& g, int p, int d, double ratio, const std::string& matrix_out,
              const std::string& check_path) {
  using namespace cosparse;
  Frame frame;
  std::uint64_t seed = 0;
  if (!check_path.empty()) {
    frame = make_frame(io::read_matrix_csv(check_path));
  } else {
    seed = resolve_seed(g);
    note_seed(seed, g);
    rng::Stream stream(seed);
    frame = ratio > 1.0 ? frame_with_ratio(p, d, ratio, stream.child(0))
                        : tight_frame(p, d, stream.child(0));
  }
  json doc;
  doc["p"] = static_cast<int>(frame.p());
  doc["d"] = static_cast<int>(frame.d());
  doc["A"] = frame.bound_lower;
  doc["B"] = frame.bound_upper;
  doc["ratio"] = frame.ratio();
  doc["tight"] = frame.is_tight();
  doc["seed"] = seed;
  if (!matrix_out.empty()) {
    io::write_matrix_csv(matrix_out, frame.omega);
    io::write_text_file(matrix_out + ".json", doc.dump(2) + "\n");
  }
  emit(doc, g);
  return 0;
}

// signal: synthesize an l-cosparse unit vector against a fresh tight frame
// (or one loaded from --omega).
int cmd_signal(const GlobalOpts& g, int p, int d, int l, const std::string& omega_path) {
  using namespace cosparse;
  const std::uint64_t seed = resolve_seed(g);
  note_seed(seed, g);
  rng::Stream stream(seed);
  Frame frame = omega_path.empty() ? tight_frame(p, d, stream.child(0))
                                   : make_frame(io::read_matrix_csv(omega_path));
  CosparseSignal signal = synth_cosparse(frame, l, stream.child(1));
  json doc;
  doc["x"] = vector_to_json(signal.x);
  doc["cosupport"] = signal.cosupport;
  doc["cosparsity"] = signal.cosparsity;
  doc["seed"] = seed;
  emit(doc, g);
  return 0;
}

// solve: run the l1 program on matrices loaded from CSV.
int cmd_solve(const GlobalOpts& g, const std::string& omega_path, const std::string& sensing_path,
              const std::string& y_path, double eta, int max_iters, double tol_feas,
              double tol_gap, const std::string& trace_path, const std::string& z_out) {
  using namespace cosparse;
  Frame frame = make_frame(io::read_matrix_csv(omega_path));
  Eigen::MatrixXd M = io::read_matrix_csv(sensing_path);
  Eigen::VectorXd y = io::read_vector_csv(y_path);
  SolverOptions opts;
  opts.max_iters = max_iters;
  opts.tol_feas = tol_feas;
  opts.tol_gap = tol_gap;
  opts.trace_path = trace_path;
  SolveResult res = eta > 0.0 ? solve_abpdn(frame, M, y, eta, opts)
                              : solve_abp(frame, M, y, opts);
  json doc;
  doc["z"] = vector_to_json(res.z);
  doc["objective"] = res.objective;
  doc["feas_residual"] = res.feas_residual;
  doc["cert_gap"] = res.cert_gap;
  doc["iters"] = res.iters;
  doc["status"] = res.status == SolveStatus::Converged ? "converged" : "max_iters";
  emit(doc, g);
  if (!z_out.empty()) io::write_vector_csv(z_out, res.z);
  return res.status == SolveStatus::Converged ? 0 : 1;
}

// bounds: every closed-form quantity at one query point.
int cmd_bounds(const GlobalOpts& g, const cosparse::BoundQuery& q, int m_flag,
               double sigma_s_value) {
  using namespace cosparse;
  json doc;
  const int m_nu = m_nonuniform(q);
  const NoisyBoundResult noisy = m_nonuniform_noisy(q);
  const int m_u = m_uniform(q);
  const RobustBoundResult robust = m_uniform_robust(q);
  const int m_for_em = m_flag > 0 ? m_flag : m_nu;
  doc["m_nonuniform"] = m_nu;
  doc["m_nonuniform_noisy"] = {{"m", noisy.m}, {"error_radius", noisy.error_radius}};
  doc["m_uniform"] = m_u;
  doc["m_uniform_robust"] = {{"m", robust.m},
                             {"sigma_coeff", robust.sigma_coeff},
                             {"noise_coeff", robust.noise_coeff}};
  doc["e_m"] = {{"m", m_for_em}, {"value", e_m(m_for_em)}};
  const ErrorBounds eb = error_bounds(q, sigma_s_value, m_for_em);
  doc["error_bounds"] = {{"l1", eb.l1}, {"l2", eb.l2}, {"l2_robust", eb.l2_robust},
                         {"cone", eb.cone}, {"sigma_s", sigma_s_value}};
  doc["query"] = {{"A", q.A}, {"B", q.B}, {"s", q.s}, {"p", q.p}, {"eps", q.eps},
                  {"rho", q.rho}, {"tau", q.tau}, {"eta", q.eta}};
  emit(doc, g);
  return 0;
}

// width: Monte-Carlo width estimates with their closed-form caps.
int cmd_width(const GlobalOpts& g, const std::string& set, int p, int d, int s,
              std::int64_t samples, int m, double t, int dirs, int trials) {
  using namespace cosparse;
  const std::uint64_t seed = resolve_seed(g);
  note_seed(seed, g);
  rng::Stream stream(seed);
  json doc;
  doc["set"] = set;
  doc["seed"] = seed;
  if (set == "D") {
    WidthEstimate est = width_D_mc(p, s, samples, stream.child(2), g.threads);
    doc["mean"] = est.mean;
    doc["std_err"] = est.std_err;
    doc["bound"] = width_bound_D(s, p);
    doc["n_samples"] = est.n_samples;
  } else {
    Frame frame = tight_frame(p, d, stream.child(0));
    CosparseSignal signal = synth_cosparse(frame, p - s, stream.child(1));
    if (set == "polar") {
      TangentConeSampler sampler = make_tangent_sampler(frame, signal.x);
      WidthEstimate est = width_polar_mc(sampler.support, sampler.sign_on_support, p, samples,
                                         stream.child(2), g.threads);
      doc["mean"] = est.mean;
      doc["std_err"] = est.std_err;
      doc["bound"] = width_bound_cone(static_cast<int>(sampler.support.size()), p);
      doc["n_samples"] = est.n_samples;
      doc["support_size"] = sampler.support.size();
    } else if (set == "escape") {
      EscapeResult res = escape_frequency(frame, signal, m, t, dirs, trials,
                                          stream.child(2), g.threads);
      doc["frequency"] = res.frequency;
      doc["mean"] = res.width_estimate;
      doc["std_err"] = res.width_std_err;
      doc["bound"] = res.prob_bound;
      doc["threshold"] = res.threshold;
      doc["prob_bound"] = res.prob_bound;
      doc["n_dirs"] = res.n_dirs;
      doc["n_trials"] = res.n_trials;
    } else {
      throw InvalidArgument("unknown width set: " + set);
    }
  }
  emit(doc, g);
  return 0;
}

// nsp: sampling falsifier for the three null-space properties.
int cmd_nsp(const GlobalOpts& g, const std::string& variant_name, int p, int d, int s, int m,
            double rho, double tau, std::int64_t samples, const std::string& frame_path,
            const std::string& matrix_path) {
  using namespace cosparse;
  const std::uint64_t seed = resolve_seed(g);
  note_seed(seed, g);
  rng::Stream stream(seed);
  Frame frame = frame_path.empty() ? tight_frame(p, d, stream.child(0))
                                   : make_frame(io::read_matrix_csv(frame_path));
  Eigen::MatrixXd M;
  if (matrix_path.empty()) {
    rng::Stream m_stream = stream.child(1);
    M = rng::gaussian_matrix(m_stream, m, frame.d());
  } else {
    M = io::read_matrix_csv(matrix_path);
    if (M.cols() != frame.d())
      throw InvalidArgument("measurement matrix has " + std::to_string(M.cols()) +
                            " columns, frame lives in dimension " + std::to_string(frame.d()));
  }
  NspVariant variant;
  if (variant_name == "plain") variant = NspVariant::Plain;
  else if (variant_name == "l2") variant = NspVariant::L2Stable;
  else if (variant_name == "robust") variant = NspVariant::Robust;
  else throw InvalidArgument("unknown nsp variant: " + variant_name);
  NspReport report = nsp_check(M, frame, s, rho, variant, samples, stream.child(2), tau,
                               g.threads);
  json doc;
  doc["variant"] = variant_name;
  doc["status"] = report.status == NspStatus::Falsified ? "falsified" : "not_falsified";
  doc["worst_margin"] = report.worst_margin;
  doc["n_tested"] = report.n_tested;
  doc["s"] = report.s;
  doc["rho"] = report.rho;
  doc["tau"] = report.tau;
  doc["witness_cosupport"] = report.witness_cosupport;
  if (report.witness_v.size() > 0) doc["witness_v"] = vector_to_json(report.witness_v);
  doc["seed"] = seed;
  emit(doc, g);
  return report.status == NspStatus::Falsified ? 1 : 0;
}

// phase: sweep the (s, m) plane and write curve/frontier tables.
int cmd_phase(const GlobalOpts& g, const std::string& config_path, bool full,
              const std::string& out_dir, int trials_flag) {
  using namespace cosparse;
  ExperimentConfig cfg = config_path.empty()
                             ? (full ? full_config() : desk_config())
                             : config_from_json(config_path);
  if (g.seed_flag) cfg.master_seed = *g.seed_flag;
  if (trials_flag > 0) cfg.trials = trials_flag;
  cfg.threads = g.threads;
  note_seed(cfg.master_seed, g);
  PhaseCurve curve = phase_curve(cfg);
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);
    write_curve_csv(out_dir + "/curve.csv", curve);
    write_frontier_csv(out_dir + "/frontier.csv", curve);
  }
  json doc;
  doc["cells"] = static_cast<int>(curve.cells.size());
  doc["ratio"] = curve.ratio;
  doc["seed"] = curve.master_seed;
  json frontier = json::array();
  for (const FrontierRow& r : curve.frontier) {
    frontier.push_back({{"m", r.m}, {"max_s", r.max_s},
                        {"theory_m_nonuniform", r.theory_m_nonuniform}});
  }
  doc["frontier"] = frontier;
  emit(doc, g);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cosparse recovery toolkit: frames, bounds, solvers, widths, phase maps"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "RNG seed (overrides COSPARSE_SEED)");
  app.add_option("--out", g.out, "Write the JSON document to this path too");
  app.add_option("--format", g.format, "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--quiet", g.quiet, "Suppress the seed= line on stderr");
  app.add_option("--threads", g.threads, "Worker threads for Monte-Carlo loops")
      ->check(CLI::PositiveNumber);

  // frame
  int fr_p = 50, fr_d = 40;
  double fr_ratio = 1.0;
  std::string fr_matrix_out, fr_check;
  auto* frame_cmd = app.add_subcommand("frame", "Draw a tight or ratio-calibrated frame");
  frame_cmd->add_option("--p", fr_p, "Number of frame rows")->check(CLI::PositiveNumber);
  frame_cmd->add_option("--d", fr_d, "Ambient dimension")->check(CLI::PositiveNumber);
  frame_cmd->add_option("--ratio", fr_ratio, "Target B/A (1 = tight)");
  frame_cmd->add_option("--matrix-out", fr_matrix_out, "Write the operator as CSV (+ .json sidecar)");
  frame_cmd->add_option("--check", fr_check, "Read a CSV matrix and report its frame bounds");

  // signal
  int sg_p = 50, sg_d = 40, sg_l = 39;
  std::string sg_omega;
  auto* signal_cmd = app.add_subcommand("signal", "Synthesize a cosparse unit signal");
  signal_cmd->add_option("--p", sg_p, "Frame rows")->check(CLI::PositiveNumber);
  signal_cmd->add_option("--d", sg_d, "Ambient dimension")->check(CLI::PositiveNumber);
  signal_cmd->add_option("--l", sg_l, "Cosparsity")->check(CLI::NonNegativeNumber);
  signal_cmd->add_option("--omega", sg_omega, "Frame CSV (instead of drawing one)");

  // solve
  std::string sv_omega, sv_sensing, sv_y, sv_trace, sv_z_out;
  double sv_eta = 0.0, sv_tol_feas = -1.0, sv_tol_gap = 1e-6;
  int sv_max_iters = 50000;
  auto* solve_cmd = app.add_subcommand("solve", "Solve the analysis l1 program from CSV inputs");
  solve_cmd->add_option("--omega", sv_omega, "Frame CSV")->required();
  solve_cmd->add_option("--sensing", sv_sensing, "Measurement matrix CSV")->required();
  solve_cmd->add_option("--y", sv_y, "Measurement vector CSV")->required();
  solve_cmd->add_option("--eta", sv_eta, "Noise radius (0 = equality constraint)");
  solve_cmd->add_option("--max-iters", sv_max_iters, "Iteration cap");
  solve_cmd->add_option("--tol-feas", sv_tol_feas, "Feasibility tolerance");
  solve_cmd->add_option("--tol-gap", sv_tol_gap, "Certificate gap tolerance");
  solve_cmd->add_option("--trace", sv_trace, "Write per-checkpoint trace CSV");
  solve_cmd->add_option("--z-out", sv_z_out, "Write the solution vector as CSV");

  // bounds
  cosparse::BoundQuery bq;
  bq.rho = 0.5;
  bq.tau = 2.0;
  int bd_m = 0;
  double bd_sigma_s = 0.0;
  auto* bounds_cmd = app.add_subcommand("bounds", "Measurement counts and error constants");
  bounds_cmd->add_option("--A", bq.A, "Lower frame bound");
  bounds_cmd->add_option("--B", bq.B, "Upper frame bound");
  bounds_cmd->add_option("--s", bq.s, "Analysis sparsity")->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--p", bq.p, "Frame rows")->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--eps", bq.eps, "Failure probability");
  bounds_cmd->add_option("--rho", bq.rho, "NSP constant");
  bounds_cmd->add_option("--tau", bq.tau, "Robustness constant");
  bounds_cmd->add_option("--eta", bq.eta, "Noise level");
  bounds_cmd->add_option("--m", bd_m, "Evaluate E_m and error bounds at this m");
  bounds_cmd->add_option("--sigma-s", bd_sigma_s, "Best s-term analysis error");

  // width
  std::string wd_set = "D";
  int wd_p = 50, wd_d = 40, wd_s = 12, wd_m = 30, wd_dirs = 10, wd_trials = 200;
  double wd_t = 2.0;
  std::int64_t wd_samples = 20000;
  auto* width_cmd = app.add_subcommand("width", "Gaussian width estimates (D, polar, escape)");
  width_cmd->add_option("--set", wd_set, "Which set: D, polar, escape")
      ->check(CLI::IsMember({"D", "polar", "escape"}));
  width_cmd->add_option("--p", wd_p, "Frame rows")->check(CLI::PositiveNumber);
  width_cmd->add_option("--d", wd_d, "Ambient dimension")->check(CLI::PositiveNumber);
  width_cmd->add_option("--s", wd_s, "Analysis sparsity")->check(CLI::PositiveNumber);
  width_cmd->add_option("--samples", wd_samples, "MC sample count");
  width_cmd->add_option("--m", wd_m, "Measurements (escape)");
  width_cmd->add_option("--t", wd_t, "Escape slack t");
  width_cmd->add_option("--dirs", wd_dirs, "Tangent directions (escape)");
  width_cmd->add_option("--trials", wd_trials, "Gaussian M draws (escape)");

  // nsp
  std::string np_variant = "plain", np_frame, np_matrix;
  int np_p = 50, np_d = 40, np_s = 12, np_m = 30;
  double np_rho = 0.5, np_tau = 1.0;
  std::int64_t np_samples = 10000;
  auto* nsp_cmd = app.add_subcommand("nsp", "Sampling falsifier for null-space properties");
  nsp_cmd->add_option("--variant", np_variant, "plain, l2, robust")
      ->check(CLI::IsMember({"plain", "l2", "robust"}));
  nsp_cmd->add_option("--p", np_p, "Frame rows")->check(CLI::PositiveNumber);
  nsp_cmd->add_option("--d", np_d, "Ambient dimension")->check(CLI::PositiveNumber);
  nsp_cmd->add_option("--s", np_s, "Analysis sparsity")->check(CLI::PositiveNumber);
  nsp_cmd->add_option("--m", np_m, "Measurement rows")->check(CLI::PositiveNumber);
  nsp_cmd->add_option("--rho", np_rho, "NSP constant");
  nsp_cmd->add_option("--tau", np_tau, "Robustness constant");
  nsp_cmd->add_option("--samples", np_samples, "Kernel/sphere vectors tested");
  nsp_cmd->add_option("--frame", np_frame, "Frame CSV (instead of drawing one)");
  nsp_cmd->add_option("--matrix", np_matrix, "Measurement matrix CSV (instead of drawing one)");

  // phase
  std::string ph_config, ph_out_dir;
  bool ph_full = false;
  int ph_trials = 0;
  auto* phase_cmd = app.add_subcommand("phase", "Phase-transition sweep over (s, m)");
  phase_cmd->add_option("--config", ph_config, "JSON config file");
  phase_cmd->add_flag("--full", ph_full, "Full-scale geometry (d=200, p=250)");
  phase_cmd->add_option("--out-dir", ph_out_dir, "Directory for curve.csv and frontier.csv");
  phase_cmd->add_option("--trials", ph_trials, "Override trials per cell");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (seed_opt->count() > 0) g.seed_flag = seed_value;

  try {
    if (*frame_cmd) return cmd_frame(g, fr_p, fr_d, fr_ratio, fr_matrix_out, fr_check);
    if (*signal_cmd) return cmd_signal(g, sg_p, sg_d, sg_l, sg_omega);
    if (*solve_cmd)
      return cmd_solve(g, sv_omega, sv_sensing, sv_y, sv_eta, sv_max_iters, sv_tol_feas,
                       sv_tol_gap, sv_trace, sv_z_out);
    if (*bounds_cmd) return cmd_bounds(g, bq, bd_m, bd_sigma_s);
    if (*width_cmd)
      return cmd_width(g, wd_set, wd_p, wd_d, wd_s, wd_samples, wd_m, wd_t, wd_dirs, wd_trials);
    if (*nsp_cmd)
      return cmd_nsp(g, np_variant, np_p, np_d, np_s, np_m, np_rho, np_tau, np_samples, np_frame,
                     np_matrix);
    if (*phase_cmd) return cmd_phase(g, ph_config, ph_full, ph_out_dir, ph_trials);
  } catch (const cosparse::Error& e) {
    nlohmann::json err{{"code", e.code}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return (e.code == "InvalidArgument" || e.code == "IoError") ? 2 : 1;
  } catch (const std::exception& e) {
    nlohmann::json err{{"code", "Internal"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 2;
}
