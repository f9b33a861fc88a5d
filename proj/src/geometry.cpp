#include "cosparse/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "cosparse/bounds.hpp"
#include "cosparse/errors.hpp"
#include "cosparse/parallel.hpp"

namespace cosparse {

namespace {

WidthEstimate estimate_from(const std::vector<double>& values) {
  const auto ms = parallel::mean_stderr(values);
  return WidthEstimate{ms.mean, ms.std_error, static_cast<std::int64_t>(values.size())};
}

// Mean/std_err of fn(g-stream for sample i) over n samples, one child stream
// per sample index so the result is independent of the thread partition.
WidthEstimate mc_estimate(std::int64_t n_samples, int threads, rng::Stream stream,
                          const std::function<double(rng::Stream&)>& fn) {
  if (n_samples < 2) throw InvalidArgument("MC estimators need n_samples >= 2");
  std::vector<double> values(static_cast<size_t>(n_samples));
  parallel::for_each_index(n_samples, threads, [&](std::int64_t i) {
    rng::Stream child = stream.child(static_cast<std::uint64_t>(i));
    values[static_cast<size_t>(i)] = fn(child);
  });
  return estimate_from(values);
}

}  // namespace

double soft_threshold(double x, double t) {
  if (t < 0.0) throw InvalidArgument("soft_threshold: t must be >= 0");
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

WidthEstimate soft_threshold_moment_mc(double t, std::int64_t n_samples, rng::Stream stream,
                                       int threads) {
  return mc_estimate(n_samples, threads, stream, [t](rng::Stream& s) {
    const double v = soft_threshold(s.gaussian(), t);
    return v * v;
  });
}

TangentConeSampler make_tangent_sampler(const Frame& frame, const Eigen::VectorXd& x,
                                        double tol) {
  if (x.size() != frame.d()) throw InvalidArgument("make_tangent_sampler: dimension mismatch");
  TangentConeSampler sampler;
  sampler.omega = frame.omega;
  sampler.anchor = x;
  const Eigen::VectorXd coeffs = frame.omega * x;
  std::vector<double> signs;
  for (int i = 0; i < static_cast<int>(coeffs.size()); ++i) {
    if (std::abs(coeffs[i]) > tol) {
      sampler.support.push_back(i);
      signs.push_back(coeffs[i] > 0.0 ? 1.0 : -1.0);
    } else {
      sampler.cosupport.push_back(i);
    }
  }
  sampler.sign_on_support =
      Eigen::Map<const Eigen::VectorXd>(signs.data(), static_cast<Eigen::Index>(signs.size()));
  return sampler;
}

bool tangent_dir_test(const TangentConeSampler& sampler, const Eigen::VectorXd& w) {
  if (w.size() != sampler.omega.cols())
    throw InvalidArgument("tangent_dir_test: dimension mismatch");
  const Eigen::VectorXd coeffs = sampler.omega * w;
  double derivative = 0.0;
  for (size_t k = 0; k < sampler.support.size(); ++k)
    derivative += sampler.sign_on_support[static_cast<Eigen::Index>(k)] *
                  coeffs[sampler.support[k]];
  for (int i : sampler.cosupport) derivative += std::abs(coeffs[i]);
  return derivative <= 1e-12;
}

double polar_cone_sqdist(const Eigen::VectorXd& g, const std::vector<int>& support,
                         const Eigen::VectorXd& sign_on_support) {
  const int p = static_cast<int>(g.size());
  const int s = static_cast<int>(support.size());
  if (sign_on_support.size() != s)
    throw InvalidArgument("polar_cone_sqdist: one sign per support index");
  // Empty support: z = clamp(g, +-t) with t = max|g_i| reaches g exactly.
  if (s == 0) return 0.0;
  std::vector<bool> on_support(static_cast<size_t>(p), false);
  for (int i : support) {
    if (i < 0 || i >= p) throw InvalidArgument("polar_cone_sqdist: support index out of range");
    on_support[static_cast<size_t>(i)] = true;
  }

  // Off-support magnitudes, ascending, with suffix sums: for t between
  // consecutive magnitudes the active (unclamped) set is a suffix.
  std::vector<double> mags;
  mags.reserve(static_cast<size_t>(p - s));
  double support_dot = 0.0;  // sum over S of sign_i * g_i
  for (int i = 0, k = 0; i < p; ++i) {
    if (on_support[static_cast<size_t>(i)])
      support_dot += sign_on_support[k++] * g[i];
    else
      mags.push_back(std::abs(g[i]));
  }
  std::sort(mags.begin(), mags.end());
  const int n_off = static_cast<int>(mags.size());
  std::vector<double> suffix(static_cast<size_t>(n_off) + 1, 0.0);
  for (int k = n_off - 1; k >= 0; --k)
    suffix[static_cast<size_t>(k)] = suffix[static_cast<size_t>(k) + 1] + mags[static_cast<size_t>(k)];

  const auto f = [&](double t) {
    double value = 0.0;
    for (int k = 0, i = 0; i < p; ++i) {
      if (on_support[static_cast<size_t>(i)]) {
        const double r = g[i] - t * sign_on_support[k++];
        value += r * r;
      } else {
        const double r = soft_threshold(g[i], t);
        value += r * r;
      }
    }
    return value;
  };

  // Ternary search on the convex objective.
  double lo = 0.0;
  double hi = g.cwiseAbs().maxCoeff() + std::sqrt(static_cast<double>(s));
  while (hi - lo > 1e-10) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) <= f(m2))
      hi = m2;
    else
      lo = m1;
  }
  const double located = 0.5 * (lo + hi);

  // Exact refinement: between breakpoints f is one quadratic whose minimizer
  // is (support_dot + sum of active magnitudes) / (s + #active). Try the
  // segment containing the located t and its neighbors, clamped in place.
  double best = f(located);
  const auto consider = [&](double t) {
    if (t >= 0.0) best = std::min(best, f(t));
  };
  consider(0.0);
  const int j_located = static_cast<int>(
      std::upper_bound(mags.begin(), mags.end(), located) - mags.begin());
  for (int j = std::max(0, j_located - 2); j <= std::min(n_off, j_located + 2); ++j) {
    const double seg_lo = (j == 0) ? 0.0 : mags[static_cast<size_t>(j) - 1];
    const double seg_hi = (j == n_off) ? std::numeric_limits<double>::infinity()
                                       : mags[static_cast<size_t>(j)];
    const double t_star =
        (support_dot + suffix[static_cast<size_t>(j)]) / static_cast<double>(s + n_off - j);
    consider(std::clamp(t_star, seg_lo, seg_hi));
    consider(seg_lo);
  }
  return best;
}

WidthEstimate width_polar_mc(const std::vector<int>& support,
                             const Eigen::VectorXd& sign_on_support, int p,
                             std::int64_t n_samples, rng::Stream stream, int threads) {
  return mc_estimate(n_samples, threads, stream, [&](rng::Stream& s) {
    const Eigen::VectorXd g = rng::gaussian_vector(s, p);
    return std::sqrt(polar_cone_sqdist(g, support, sign_on_support));
  });
}

WidthEstimate polar_sqdist_moment_mc(const std::vector<int>& support,
                                     const Eigen::VectorXd& sign_on_support, int p,
                                     std::int64_t n_samples, rng::Stream stream, int threads) {
  return mc_estimate(n_samples, threads, stream, [&](rng::Stream& s) {
    const Eigen::VectorXd g = rng::gaussian_vector(s, p);
    return polar_cone_sqdist(g, support, sign_on_support);
  });
}

double width_bound_cone(int s, int p) {
  if (s < 1 || s > p) throw InvalidArgument("width_bound_cone: need 1 <= s <= p");
  return std::sqrt(2.0 * s * std::log(std::numbers::e * p / s));
}

double width_bound_D(int s, int p) {
  return width_bound_cone(s, p) + std::sqrt(static_cast<double>(s));
}

double d_norm(const Eigen::VectorXd& x, int s) {
  const int p = static_cast<int>(x.size());
  if (s < 1 || s > p) throw InvalidArgument("d_norm: need 1 <= s <= p");
  std::vector<double> mags(static_cast<size_t>(p));
  for (int i = 0; i < p; ++i) mags[static_cast<size_t>(i)] = std::abs(x[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double total = 0.0;
  for (int start = 0; start < p; start += s) {
    double block_sq = 0.0;
    for (int i = start; i < std::min(start + s, p); ++i)
      block_sq += mags[static_cast<size_t>(i)] * mags[static_cast<size_t>(i)];
    total += std::sqrt(block_sq);
  }
  return total;
}

WidthEstimate width_D_mc(int p, int s, std::int64_t n_samples, rng::Stream stream,
                         int threads) {
  if (s < 1 || s > p) throw InvalidArgument("width_D_mc: need 1 <= s <= p");
  return mc_estimate(n_samples, threads, stream, [&](rng::Stream& st) {
    Eigen::VectorXd g = rng::gaussian_vector(st, p);
    std::vector<double> mags(static_cast<size_t>(p));
    for (int i = 0; i < p; ++i) mags[static_cast<size_t>(i)] = std::abs(g[i]);
    std::nth_element(mags.begin(), mags.begin() + (s - 1), mags.end(), std::greater<>());
    double top_sq = 0.0;
    for (int i = 0; i < s; ++i) top_sq += mags[static_cast<size_t>(i)] * mags[static_cast<size_t>(i)];
    return std::sqrt(top_sq);
  });
}

Eigen::MatrixXd sample_tangent_dirs(const Frame& frame, const CosparseSignal& signal,
                                    int n_dirs, rng::Stream stream,
                                    std::int64_t max_proposals) {
  if (n_dirs < 1) throw InvalidArgument("sample_tangent_dirs: need n_dirs >= 1");
  const TangentConeSampler sampler = make_tangent_sampler(frame, signal.x);
  const double level = (frame.omega * signal.x).lpNorm<1>();
  if (!(level > 0.0))
    throw InvalidArgument("sample_tangent_dirs: anchor has zero analysis coefficients");

  Eigen::MatrixXd dirs(frame.d(), n_dirs);
  int accepted = 0;
  for (std::int64_t proposal = 0; proposal < max_proposals && accepted < n_dirs; ++proposal) {
    Eigen::VectorXd u = rng::gaussian_vector(stream, frame.d());
    const double l1 = (frame.omega * u).lpNorm<1>();
    if (l1 <= 1e-12) continue;
    // Point on the same l1 level set; moving from the anchor toward it never
    // increases the objective, so the chord direction is a descent direction.
    const Eigen::VectorXd v = u * (level / l1) - signal.x;
    const double vnorm = v.norm();
    if (vnorm <= 1e-9) continue;
    const Eigen::VectorXd w = v / vnorm;
    if (!tangent_dir_test(sampler, w)) continue;
    dirs.col(accepted++) = w;
  }
  if (accepted < n_dirs)
    throw RejectionStall("sample_tangent_dirs: accepted " + std::to_string(accepted) + " of " +
                         std::to_string(n_dirs) + " directions within the proposal budget");
  return dirs;
}

EscapeResult escape_frequency_dirs(const Frame& frame, const Eigen::MatrixXd& dirs, int m,
                                   double t, std::int64_t n_width_samples, int n_trials,
                                   rng::Stream stream, int threads) {
  if (m < 1) throw InvalidArgument("escape_frequency_dirs: need m >= 1");
  if (t < 0.0) throw InvalidArgument("escape_frequency_dirs: need t >= 0");
  if (n_trials < 1) throw InvalidArgument("escape_frequency_dirs: need n_trials >= 1");
  if (dirs.rows() != frame.d() || dirs.cols() < 1)
    throw InvalidArgument("escape_frequency_dirs: dirs must be d x k, k >= 1");
  for (Eigen::Index j = 0; j < dirs.cols(); ++j)
    if (std::abs(dirs.col(j).norm() - 1.0) > 1e-8)
      throw InvalidArgument("escape_frequency_dirs: directions must be unit vectors");

  EscapeResult result;
  result.n_dirs = static_cast<int>(dirs.cols());
  result.n_trials = n_trials;
  result.prob_bound = 1.0 - std::exp(-0.5 * t * t);

  // Width of the finite image set Omega(T): exact max per Gaussian sample.
  const Eigen::MatrixXd images = frame.omega * dirs;  // p x k
  const WidthEstimate width =
      mc_estimate(n_width_samples, threads, stream.child(0), [&](rng::Stream& s) {
        const Eigen::VectorXd g = rng::gaussian_vector(s, images.rows());
        return (images.transpose() * g).maxCoeff();
      });
  result.width_estimate = width.mean;
  result.width_std_err = width.std_err;
  result.threshold = e_m(m) - width.mean / std::sqrt(frame.bound_lower) - t;

  rng::Stream trial_root = stream.child(1);
  std::vector<double> hits(static_cast<size_t>(n_trials));
  parallel::for_each_index(n_trials, threads, [&](std::int64_t i) {
    rng::Stream s = trial_root.child(static_cast<std::uint64_t>(i));
    const Eigen::MatrixXd mat = rng::gaussian_matrix(s, m, frame.d());
    const double smallest = (mat * dirs).colwise().norm().minCoeff();
    hits[static_cast<size_t>(i)] = smallest > result.threshold ? 1.0 : 0.0;
  });
  result.frequency = parallel::ordered_sum(hits) / static_cast<double>(n_trials);
  return result;
}

EscapeResult escape_frequency(const Frame& frame, const CosparseSignal& signal, int m,
                              double t, int n_dirs, int n_trials, rng::Stream stream,
                              int threads) {
  const Eigen::MatrixXd dirs = sample_tangent_dirs(frame, signal, n_dirs, stream.child(0));
  return escape_frequency_dirs(frame, dirs, m, t, 10000, n_trials, stream.child(1), threads);
}

}  // namespace cosparse
