#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cosparse/frame.hpp"
#include "cosparse/model.hpp"
#include "cosparse/rng.hpp"

namespace cosparse {

// Support/sign data of Omega*x at a fixed anchor x, used to test membership
// in the descent cone of ||Omega . ||_1 at x.
struct TangentConeSampler {
  Eigen::MatrixXd omega;
  Eigen::VectorXd anchor;
  std::vector<int> support;      // indices with |(Omega x)_i| > tol
  std::vector<int> cosupport;    // complement
  Eigen::VectorXd sign_on_support;  // aligned with `support`
};

TangentConeSampler make_tangent_sampler(const Frame& frame, const Eigen::VectorXd& x,
                                        double tol = 1e-10);

// Monte-Carlo estimate with its standard error.
struct WidthEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::int64_t n_samples = 0;
};

// Shrink toward zero by t >= 0.
double soft_threshold(double x, double t);

// MC estimate of E S_t(g)^2 for scalar standard normal g.
WidthEstimate soft_threshold_moment_mc(double t, std::int64_t n_samples, rng::Stream stream,
                                       int threads = 1);

// Squared distance from g to the cone {z : z_i = t*sign_i on S, |z_i| <= t
// off S, t >= 0}: ternary search over t down to 1e-10, then an exact
// minimization on the located quadratic segment.
double polar_cone_sqdist(const Eigen::VectorXd& g, const std::vector<int>& support,
                         const Eigen::VectorXd& sign_on_support);

// MC mean/std_err of sqrt(polar_cone_sqdist(g)) over standard Gaussian g.
WidthEstimate width_polar_mc(const std::vector<int>& support,
                             const Eigen::VectorXd& sign_on_support, int p,
                             std::int64_t n_samples, rng::Stream stream, int threads = 1);

// Same sampler, second moment: mean/std_err of polar_cone_sqdist(g) itself.
WidthEstimate polar_sqdist_moment_mc(const std::vector<int>& support,
                                     const Eigen::VectorXd& sign_on_support, int p,
                                     std::int64_t n_samples, rng::Stream stream,
                                     int threads = 1);

// sqrt(2 s ln(e p / s)).
double width_bound_cone(int s, int p);

// sqrt(2 s ln(e p / s)) + sqrt(s), width bound for the convex hull of
// s-sparse unit vectors.
double width_bound_D(int s, int p);

// Sum of l2 norms of size-s blocks of the non-increasing magnitude
// rearrangement (last block ragged).
double d_norm(const Eigen::VectorXd& x, int s);

// MC width of the convex hull of s-sparse unit vectors: per sample the
// support value is the l2 norm of the s largest magnitudes of g.
WidthEstimate width_D_mc(int p, int s, std::int64_t n_samples, rng::Stream stream,
                         int threads = 1);

// One-sided directional derivative of v -> ||Omega v||_1 at the anchor along
// w is <= 1e-12 (descent direction, boundary included).
bool tangent_dir_test(const TangentConeSampler& sampler, const Eigen::VectorXd& w);

// Unit descent directions at signal.x. Proposals are Gaussian draws mapped
// onto the level set {z : ||Omega z||_1 = ||Omega x||_1}; directions toward
// that level set never increase the objective, and every candidate is still
// gated through tangent_dir_test. Throws RejectionStall if fewer than n_dirs
// pass within max_proposals.
Eigen::MatrixXd sample_tangent_dirs(const Frame& frame, const CosparseSignal& signal,
                                    int n_dirs, rng::Stream stream,
                                    std::int64_t max_proposals = 1000000);

struct EscapeResult {
  double frequency = 0.0;       // fraction of M draws with inf_T ||Mv|| above threshold
  double width_estimate = 0.0;  // MC estimate of the width of Omega(T)
  double width_std_err = 0.0;
  double threshold = 0.0;       // E_m - width/sqrt(A) - t
  double prob_bound = 0.0;      // 1 - exp(-t^2/2)
  int n_dirs = 0;
  int n_trials = 0;
};

// Escape-through-a-mesh check over a fixed finite set of unit directions
// (columns of dirs): frequency of inf_j ||M dirs_j||_2 > E_m - width/sqrt(A) - t
// over n_trials Gaussian M.
EscapeResult escape_frequency_dirs(const Frame& frame, const Eigen::MatrixXd& dirs, int m,
                                   double t, std::int64_t n_width_samples, int n_trials,
                                   rng::Stream stream, int threads = 1);

// Builds T from sample_tangent_dirs, then runs escape_frequency_dirs with
// 1e4 width samples.
EscapeResult escape_frequency(const Frame& frame, const CosparseSignal& signal, int m,
                              double t, int n_dirs, int n_trials, rng::Stream stream,
                              int threads = 1);

}  // namespace cosparse
