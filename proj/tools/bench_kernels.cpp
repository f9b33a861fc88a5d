// Times the Monte-Carlo kernels serial vs OpenMP and checks that both
// executions produce bitwise-identical results (per-index child streams make
// the outputs independent of the thread count).

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "cosparse/experiments.hpp"
#include "cosparse/frame.hpp"
#include "cosparse/geometry.hpp"
#include "cosparse/model.hpp"
#include "cosparse/nsp.hpp"
#include "cosparse/parallel.hpp"
#include "cosparse/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn) {
  const auto start = Clock::now();
  fn();
  const auto stop = Clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-18s serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   identical %s\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms,
              identical ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  int threads = 4;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) threads = std::atoi(argv[++i]);
  }
  std::printf("openmp %s, comparing threads=1 vs threads=%d\n",
              cosparse::parallel::openmp_enabled() ? "enabled" : "disabled", threads);

  cosparse::rng::Stream root(7);
  cosparse::Frame frame = cosparse::tight_frame(50, 40, root.child(0));
  cosparse::CosparseSignal signal = cosparse::synth_cosparse(frame, 38, root.child(1));
  cosparse::TangentConeSampler sampler = cosparse::make_tangent_sampler(frame, signal.x);

  {
    cosparse::WidthEstimate a, b;
    const double t1 = time_ms([&] {
      a = cosparse::width_D_mc(50, 12, 400000, root.child(2), 1);
    });
    const double tn = time_ms([&] {
      b = cosparse::width_D_mc(50, 12, 400000, root.child(2), threads);
    });
    report("width_D_mc", t1, tn, a.mean == b.mean && a.std_err == b.std_err);
  }
  {
    cosparse::WidthEstimate a, b;
    const double t1 = time_ms([&] {
      a = cosparse::width_polar_mc(sampler.support, sampler.sign_on_support, 50, 100000,
                                   root.child(3), 1);
    });
    const double tn = time_ms([&] {
      b = cosparse::width_polar_mc(sampler.support, sampler.sign_on_support, 50, 100000,
                                   root.child(3), threads);
    });
    report("width_polar_mc", t1, tn, a.mean == b.mean && a.std_err == b.std_err);
  }
  {
    cosparse::rng::Stream m_stream = root.child(4);
    Eigen::MatrixXd M = cosparse::rng::gaussian_matrix(m_stream, 30, 40);
    cosparse::NspReport a, b;
    const double t1 = time_ms([&] {
      a = cosparse::nsp_check(M, frame, 12, 0.5, cosparse::NspVariant::Plain, 20000,
                              root.child(5), 1.0, 1);
    });
    const double tn = time_ms([&] {
      b = cosparse::nsp_check(M, frame, 12, 0.5, cosparse::NspVariant::Plain, 20000,
                              root.child(5), 1.0, threads);
    });
    report("nsp_check", t1, tn, a.worst_margin == b.worst_margin && a.n_tested == b.n_tested);
  }
  {
    cosparse::ExperimentConfig cfg = cosparse::desk_config();
    cfg.trials = 20;
    cosparse::Frame exp_frame = cosparse::build_frame(cfg);
    cosparse::CellResult a, b;
    cfg.threads = 1;
    const double t1 = time_ms([&] { a = cosparse::run_cell(cfg, exp_frame, 12, 36); });
    cfg.threads = threads;
    const double tn = time_ms([&] { b = cosparse::run_cell(cfg, exp_frame, 12, 36); });
    report("run_cell", t1, tn,
           a.successes == b.successes && a.mean_error == b.mean_error);
  }
  return 0;
}
