#pragma once

#include <utility>

#include <Eigen/Dense>

#include "cosparse/rng.hpp"

namespace cosparse {

// Analysis operator whose rows are the frame vectors: Omega is p x d with
// p >= d and A ||z||^2 <= ||Omega z||^2 <= B ||z||^2 for the stored bounds.
struct Frame {
  Eigen::MatrixXd omega;
  double bound_lower = 0.0;  // A, squared smallest singular value
  double bound_upper = 0.0;  // B, squared largest singular value

  Eigen::Index p() const { return omega.rows(); }
  Eigen::Index d() const { return omega.cols(); }
  double ratio() const { return bound_upper / bound_lower; }
  bool is_tight(double tol = 1e-8) const {
    return bound_upper - bound_lower <= tol * bound_upper;
  }

  Eigen::VectorXd analysis(const Eigen::VectorXd& z) const { return omega * z; }
};

// Squared extreme singular values of omega as (A, B). Throws NotAFrame when
// the rows fail to span R^d (A numerically zero).
std::pair<double, double> frame_bounds(const Eigen::MatrixXd& omega);

// Wraps an operator together with freshly computed bounds. Same NotAFrame
// contract as frame_bounds.
Frame make_frame(Eigen::MatrixXd omega);

// Parseval tight frame: orthonormal basis of the column space of a p x d
// matrix with rows drawn uniformly on the unit sphere, so Omega^T Omega = I
// and A = B = 1. Requires p >= d; retries a rank-deficient draw up to 3 times.
Frame tight_frame(Eigen::Index p, Eigen::Index d, rng::Stream stream);

// Rescales row i of base by row_scales[i] (> 0) and recomputes bounds.
Frame scaled_frame(const Frame& base, const Eigen::VectorXd& row_scales);

// Non-tight frame with B/A calibrated to target_ratio (>= 1): a tight frame
// with log-uniform row scales exp(alpha * (u_i - 1/2)), alpha found by
// bisection so the realized ratio matches target_ratio to relative 1e-6.
Frame frame_with_ratio(Eigen::Index p, Eigen::Index d, double target_ratio, rng::Stream stream);

}  // namespace cosparse
