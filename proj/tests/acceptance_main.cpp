// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit when
// any criterion fails. argv[1] = path to the cosparse CLI (criterion 11),
// argv[2] = scratch directory.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

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

int criteria_failed = 0;

class Criterion {
 public:
  Criterion(int number, std::string label, double budget_seconds)
      : number_(number), label_(std::move(label)), budget_(budget_seconds),
        start_(std::chrono::steady_clock::now()) {}

  void finish(bool ok, const std::string& detail) {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const bool in_budget = elapsed <= budget_;
    const bool pass = ok && in_budget;
    std::ostringstream line;
    line << (pass ? "PASS" : "FAIL") << " criterion " << number_ << ": " << label_ << " ("
         << detail;
    if (!in_budget) line << "; over budget";
    line << "; " << std::fixed;
    line.precision(1);
    line << elapsed << "s of " << budget_ << "s)";
    std::cout << line.str() << std::endl;
    if (!pass) ++criteria_failed;
  }

 private:
  int number_;
  std::string label_;
  double budget_;
  std::chrono::steady_clock::time_point start_;
};

// 1: every measurement-count bound returns the first admissible integer
// over a 5 x 5 x 5 grid of (s, B/A, eps).
void criterion_1() {
  Criterion c(1, "measurement bounds are first admissible integers", 1.0);
  const int s_grid[] = {1, 2, 5, 10, 20};
  const double ratio_grid[] = {1.0, 2.0, 5.0, 13.0, 46.0};
  const double eps_grid[] = {0.3, 0.1, 0.02, 0.01, 0.001};
  int checked = 0;
  bool ok = true;
  for (int s : s_grid) {
    for (double ratio : ratio_grid) {
      for (double eps : eps_grid) {
        cosparse::BoundQuery q;
        q.A = 1.0;
        q.B = ratio;
        q.s = s;
        q.p = 50;
        q.eps = eps;
        q.rho = 0.5;
        q.tau = 2.0;
        const long double rhs[] = {cosparse::rhs_nonuniform(q),
                                   cosparse::rhs_nonuniform_noisy(q),
                                   cosparse::rhs_uniform(q), cosparse::rhs_uniform_robust(q)};
        const int m[] = {cosparse::m_nonuniform(q), cosparse::m_nonuniform_noisy(q).m,
                         cosparse::m_uniform(q), cosparse::m_uniform_robust(q).m};
        for (int k = 0; k < 4; ++k) {
          ok = ok && cosparse::m_admissible(m[k], rhs[k]) &&
               !cosparse::m_admissible(m[k] - 1, rhs[k]);
          ++checked;
        }
      }
    }
  }
  c.finish(ok, std::to_string(checked) + " bound evaluations minimal");
}

// 2: E_m sits in the sandwich m/sqrt(m+1) <= E_m <= sqrt(m) for m up to 1e4.
void criterion_2() {
  Criterion c(2, "expected Gaussian norm sandwich on [1, 1e4]", 5.0);
  bool ok = true;
  double worst_slack = 1e300;
  for (int m = 1; m <= 10000; ++m) {
    const double v = cosparse::e_m(m);
    const double lo = m / std::sqrt(m + 1.0);
    const double hi = std::sqrt(static_cast<double>(m));
    ok = ok && v >= lo - 1e-12 && v <= hi + 1e-12;
    worst_slack = std::min(worst_slack, std::min(v - lo, hi - v));
  }
  std::ostringstream d;
  d << "min slack " << worst_slack;
  c.finish(ok, d.str());
}

// 3: the solver matches an independent subgradient oracle on 10 random
// instances and nails a hand-checkable vertex problem.
void criterion_3() {
  Criterion c(3, "solver agrees with the subgradient oracle", 30.0);
  bool ok = true;
  double worst_rel = 0.0, worst_gap = 0.0;
  for (int i = 0; i < 10; ++i) {
    cosparse::rng::Stream root(cosparse::rng::Stream(42).child(3, i).key());
    const cosparse::Frame f = cosparse::tight_frame(25, 20, root.child(0));
    const auto sig = cosparse::synth_cosparse(f, 14, root.child(1));
    const auto inst = cosparse::gaussian_instance(f, sig, 15, 0.0, root.child(2));
    const auto res = cosparse::solve_abp(f, inst.M, inst.y);
    const Eigen::VectorXd zo = cosparse::oracle_subgradient(f, inst.M, inst.y, 20000);
    const double obj_o = f.analysis(zo).lpNorm<1>();
    const double rel = std::abs(res.objective - obj_o) / obj_o;
    worst_rel = std::max(worst_rel, rel);
    worst_gap = std::max(worst_gap, res.cert_gap);
    ok = ok && res.status == cosparse::SolveStatus::Converged && rel <= 5e-6 &&
         res.cert_gap <= 1e-6;
  }
  {
    const cosparse::Frame id = cosparse::make_frame(Eigen::MatrixXd::Identity(2, 2));
    Eigen::MatrixXd M(1, 2);
    M << 1.0, 0.5;
    Eigen::VectorXd y(1);
    y << 1.0;
    const auto res = cosparse::solve_abp(id, M, y);
    ok = ok && std::abs(res.z[0] - 1.0) <= 1e-6 && std::abs(res.z[1]) <= 1e-6 &&
         std::abs(res.objective - 1.0) <= 1e-6;
  }
  std::ostringstream d;
  d << "worst rel objective " << worst_rel << ", worst gap " << worst_gap;
  c.finish(ok, d.str());
}

// 4: noiseless recovery rate at the theory measurement count (clamped to d),
// s in {3, 5}, eps = 0.02, 50 trials each.
void criterion_4() {
  Criterion c(4, "recovery rate at the nonuniform bound", 300.0);
  cosparse::ExperimentConfig cfg = cosparse::desk_config();
  cfg.trials = 50;
  cfg.success_tol = 1e-4;
  const cosparse::Frame frame = cosparse::build_frame(cfg);
  bool ok = true;
  std::ostringstream d;
  for (int s : {3, 5}) {
    cosparse::BoundQuery q;
    q.s = s;
    q.p = cfg.p;
    q.eps = 0.02;
    const int m = std::min(cosparse::m_nonuniform(q), cfg.d);
    const auto cell = cosparse::run_cell(cfg, frame, s, m);
    ok = ok && cell.rate() >= 0.94;
    d << "s=" << s << " m=" << m << " rate=" << cell.rate() << " ";
  }
  c.finish(ok, d.str());
}

// 5: the phase frontier degrades as the frame ratio grows, at a fixed m
// where the tight-frame rate sits inside (0.5, 1).
void criterion_5() {
  Criterion c(5, "frontier ordering across frame ratios", 600.0);
  const int m_fixed = 28;
  cosparse::ExperimentConfig base = cosparse::desk_config();
  base.trials = 50;
  base.success_target = 0.8;
  base.m_grid = {m_fixed};
  base.s_list = {11, 12, 13, 14, 15, 16, 17, 18};

  int max_s[3] = {0, 0, 0};
  double transition_rate = -1.0;
  const double ratios[] = {1.0, 13.0, 46.0};
  for (int k = 0; k < 3; ++k) {
    cosparse::ExperimentConfig cfg = base;
    cfg.frame_spec.tight = ratios[k] == 1.0;
    cfg.frame_spec.ratio = ratios[k];
    const auto curve = cosparse::phase_curve(cfg);
    max_s[k] = curve.frontier.back().max_s;
    if (k == 0) {
      for (const auto& cell : curve.cells) {
        if (cell.rate() < base.success_target) {
          transition_rate = cell.rate();
          break;
        }
      }
    }
  }
  const bool ordered = max_s[0] + 1 >= max_s[1] && max_s[1] + 1 >= max_s[2];
  const bool transition = transition_rate > 0.5 && transition_rate < 1.0;
  std::ostringstream d;
  d << "max_s tight/13/46 = " << max_s[0] << "/" << max_s[1] << "/" << max_s[2]
    << ", tight transition rate " << transition_rate;
  c.finish(ordered && transition, d.str());
}

// 6: experiment tables round-trip through their documented CSV schema.
void criterion_6(const std::string& scratch) {
  Criterion c(6, "curve and frontier CSV schema", 10.0);
  cosparse::ExperimentConfig cfg = cosparse::desk_config();
  cfg.trials = 3;
  cfg.s_list = {11, 12};
  cfg.m_grid = {20, 40};
  const auto curve = cosparse::phase_curve(cfg);
  const std::string curve_path = scratch + "/acc_curve.csv";
  const std::string frontier_path = scratch + "/acc_frontier.csv";
  cosparse::write_curve_csv(curve_path, curve);
  cosparse::write_frontier_csv(frontier_path, curve);

  const std::string curve_body = cosparse::io::read_text_file(curve_path);
  const std::string frontier_body = cosparse::io::read_text_file(frontier_path);
  bool ok = curve_body.rfind("s,m,successes,trials,rate,mean_error,ratio,seed\n", 0) == 0 &&
            frontier_body.rfind("m,max_s,theory_m_nonuniform\n", 0) == 0;
  // Line counts: header + one row per cell / per grid m.
  ok = ok && std::count(curve_body.begin(), curve_body.end(), '\n') ==
                 static_cast<long>(curve.cells.size()) + 1;
  ok = ok && std::count(frontier_body.begin(), frontier_body.end(), '\n') ==
                 static_cast<long>(curve.frontier.size()) + 1;
  // Every data cell parses as a number.
  std::istringstream lines(curve_body);
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string cell;
    int fields = 0;
    while (std::getline(cells, cell, ',')) {
      try {
        (void)std::stod(cell);
      } catch (...) {
        ok = false;
      }
      ++fields;
    }
    ok = ok && fields == 8;
    ++rows;
  }
  c.finish(ok, std::to_string(rows) + " curve rows verified");
}

// 7: Monte-Carlo widths respect their closed-form caps.
void criterion_7() {
  Criterion c(7, "width estimates under the analytic caps", 60.0);
  const auto d_est = cosparse::width_D_mc(50, 5, 100000, cosparse::rng::Stream(7));
  const bool d_ok = d_est.mean <= cosparse::width_bound_D(5, 50) + 3.0 * d_est.std_err;

  std::vector<int> support;
  Eigen::VectorXd signs(10);
  cosparse::rng::Stream pick(8);
  for (int k = 0; k < 10; ++k) {
    support.push_back(10 * k + static_cast<int>(pick.uniform_index(10)));
    signs[k] = pick.uniform() < 0.5 ? -1.0 : 1.0;
  }
  const auto moment =
      cosparse::polar_sqdist_moment_mc(support, signs, 100, 10000, cosparse::rng::Stream(9));
  const double cap = 2.0 * 10.0 * std::log(std::numbers::e * 100.0 / 10.0);
  const bool polar_ok = moment.mean <= cap + 3.0 * moment.std_err;

  std::ostringstream d;
  d << "width_D " << d_est.mean << " <= " << cosparse::width_bound_D(5, 50) << ", polar moment "
    << moment.mean << " <= " << cap;
  c.finish(d_ok && polar_ok, d.str());
}

// 8: the escape-through-a-mesh frequency clears the Gaussian-process bound.
void criterion_8() {
  Criterion c(8, "escape frequency beats its probability bound", 300.0);
  cosparse::rng::Stream root(11);
  const cosparse::Frame frame = cosparse::tight_frame(50, 40, root.child(0));
  const auto signal = cosparse::synth_cosparse(frame, 39, root.child(1));
  const auto res =
      cosparse::escape_frequency(frame, signal, 40, 2.0, 10, 200, root.child(2));
  const double se = std::sqrt(res.prob_bound * (1.0 - res.prob_bound) / res.n_trials);
  const bool ok = res.frequency >= res.prob_bound - 3.0 * se;
  std::ostringstream d;
  d << "frequency " << res.frequency << " vs bound " << res.prob_bound << " (3se slack "
    << 3.0 * se << ")";
  c.finish(ok, d.str());
}

// 9: NSP margins match an exhaustive oracle, the hand falsifier works, the
// l2 => plain implication holds per sample, and Gaussian M at the uniform
// bound is (vacuously) never falsified.
void criterion_9() {
  Criterion c(9, "null-space property checks", 600.0);
  bool ok = true;

  const cosparse::Frame f8 = cosparse::tight_frame(8, 5, cosparse::rng::Stream(91));
  cosparse::rng::Stream vs(92);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd v = cosparse::rng::sphere_vector(vs, 5);
    const auto fast = cosparse::nsp_margins(f8, v, 2, 0.6);
    // Exhaustive search over all size-(p-s) cosupports.
    double best_plain = -1e300, best_l2 = -1e300;
    std::vector<int> pick(8, 0);
    std::fill(pick.begin(), pick.begin() + 2, 1);
    std::sort(pick.begin(), pick.end());
    const Eigen::VectorXd a = f8.analysis(v);
    do {
      double on = 0.0, off1 = 0.0, off2 = 0.0;
      for (int k = 0; k < 8; ++k) {
        if (pick[static_cast<size_t>(k)]) {
          off1 += std::abs(a[k]);
          off2 += a[k] * a[k];
        } else {
          on += std::abs(a[k]);
        }
      }
      best_plain = std::max(best_plain, off1 - 0.6 * on);
      best_l2 = std::max(best_l2, std::sqrt(off2) - 0.6 / std::sqrt(2.0) * on);
    } while (std::next_permutation(pick.begin(), pick.end()));
    ok = ok && std::abs(fast.plain - best_plain) <= 1e-12 &&
         std::abs(fast.l2_stable - best_l2) <= 1e-12;
    // Remark: an l2-stable pass implies a plain pass.
    ok = ok && !(fast.l2_stable <= 0.0 && fast.plain > 0.0);
  }

  {
    const cosparse::Frame id = cosparse::make_frame(Eigen::MatrixXd::Identity(2, 2));
    Eigen::MatrixXd M(1, 2);
    M << 1.0, -1.0;
    const auto report = cosparse::nsp_check(M, id, 1, 0.5, cosparse::NspVariant::Plain, 100,
                                            cosparse::rng::Stream(93));
    ok = ok && report.status == cosparse::NspStatus::Falsified;
  }

  cosparse::BoundQuery q;
  q.s = 3;
  q.p = 50;
  q.eps = 0.02;
  q.rho = 0.9;
  const int m = cosparse::m_uniform(q);
  const cosparse::Frame f50 = cosparse::tight_frame(50, 40, cosparse::rng::Stream(94));
  cosparse::rng::Stream draws(95);
  int not_falsified = 0;
  for (int t = 0; t < 50; ++t) {
    cosparse::rng::Stream mstream = draws.child(static_cast<std::uint64_t>(t));
    const Eigen::MatrixXd M = cosparse::rng::gaussian_matrix(mstream, m, 40);
    const auto report = cosparse::nsp_check(M, f50, 3, 0.9, cosparse::NspVariant::L2Stable, 500,
                                            draws.child(1000 + static_cast<std::uint64_t>(t)));
    not_falsified += report.status == cosparse::NspStatus::NotFalsified;
  }
  ok = ok && not_falsified >= 47;  // 94% of 50 draws

  std::ostringstream d;
  d << "oracle margins match, falsifier fires, " << not_falsified
    << "/50 Gaussian draws at m=" << m << " not falsified";
  c.finish(ok, d.str());
}

// 10: noisy recovery lands inside the 2 eta / tau radius on 20 instances.
void criterion_10() {
  Criterion c(10, "noisy recovery error radius", 300.0);
  const double eta = 0.01, tau = 1.0;
  const double radius = 2.0 * eta / tau;
  int converged = 0, within = 0, exceptions = 0;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    cosparse::rng::Stream root(cosparse::rng::Stream(42).child(10, t).key());
    const cosparse::Frame frame = cosparse::tight_frame(50, 40, root.child(0));
    const auto signal = cosparse::synth_cosparse(frame, 39, root.child(1));
    const auto inst = cosparse::gaussian_instance(frame, signal, 75, eta, root.child(2));
    cosparse::SolverOptions opts;
    opts.max_iters = 500000;
    const auto res = cosparse::solve_abpdn(frame, inst.M, inst.y, eta, opts);
    if (res.status != cosparse::SolveStatus::Converged) {
      ++exceptions;
      continue;
    }
    ++converged;
    const double err = (res.z - signal.x).norm();
    worst = std::max(worst, err);
    if (err <= radius) ++within;
  }
  const bool ok = converged >= 19 && converged - within <= 1 && exceptions <= 1;
  std::ostringstream d;
  d << converged << "/20 converged, " << within << " within radius " << radius << ", worst err "
    << worst;
  c.finish(ok, d.str());
}

// 11: repeated seeded CLI invocations are byte-identical.
void criterion_11(const std::string& cli, const std::string& scratch) {
  Criterion c(11, "seeded CLI output is reproducible", 60.0);
  if (cli.empty()) {
    c.finish(false, "no CLI path supplied");
    return;
  }
  const auto capture = [&](const std::string& args, const std::string& tag) -> std::string {
    const std::string out = scratch + "/cli_" + tag + ".txt";
    const std::string cmd = "\"" + cli + "\" " + args + " > " + out + " 2> /dev/null";
    const int raw = std::system(cmd.c_str());
    if (raw < 0 || !WIFEXITED(raw) || WEXITSTATUS(raw) != 0) return "<exit failure>";
    return cosparse::io::read_text_file(out);
  };
  bool ok = true;
  {
    const std::string a = capture("signal --p 10 --d 8 --l 5 --seed 9", "sig_a");
    const std::string b = capture("signal --p 10 --d 8 --l 5 --seed 9", "sig_b");
    ok = ok && !a.empty() && a == b && a != "<exit failure>";
  }
  {
    const std::string a = capture("width --set D --p 20 --d 10 --s 3 --samples 2000 --seed 4",
                                  "width_a");
    const std::string b = capture("width --set D --p 20 --d 10 --s 3 --samples 2000 --seed 4",
                                  "width_b");
    ok = ok && !a.empty() && a == b && a != "<exit failure>";
  }
  {
    const std::string a = capture("bounds --s 10 --p 200 --eps 0.01", "bounds_a");
    const std::string b = capture("bounds --s 10 --p 200 --eps 0.01", "bounds_b");
    ok = ok && !a.empty() && a == b && a != "<exit failure>";
  }
  c.finish(ok, "signal, width, bounds outputs byte-identical");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::string scratch = argc > 2 ? argv[2] : "acceptance_scratch";
  std::filesystem::create_directories(scratch);

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6(scratch);
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11(cli, scratch);

  if (criteria_failed == 0) {
    std::cout << "all 11 acceptance criteria passed" << std::endl;
    return 0;
  }
  std::cout << criteria_failed << " acceptance criteria failed" << std::endl;
  return 1;
}
