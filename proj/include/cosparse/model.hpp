#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cosparse/frame.hpp"
#include "cosparse/rng.hpp"

namespace cosparse {

// Unit-norm signal annihilated by the frame rows indexed by cosupport.
// Indices are 0-based throughout.
struct CosparseSignal {
  Eigen::VectorXd x;
  std::vector<int> cosupport;  // sorted, size = cosparsity
  int cosparsity = 0;
};

// One recovery problem: y = M x + w with ||w||_2 <= eta.
struct SensingInstance {
  Eigen::MatrixXd M;
  Eigen::VectorXd y;
  double eta = 0.0;
  std::optional<CosparseSignal> truth;
};

struct CosparsityResult {
  int l = 0;
  std::vector<int> cosupport;  // sorted
};

// Rows of the frame whose inner product with x is at most tol in magnitude.
CosparsityResult cosparsity(const Frame& frame, const Eigen::VectorXd& x, double tol);

// Random l-cosparse unit signal: pick a uniform size-l cosupport, take an
// orthonormal kernel basis of the selected rows (SVD, threshold
// 1e-10 * sigma_max), and point x along a Gaussian direction in that kernel.
// Throws EmptyKernel when the selected rows already span R^d.
CosparseSignal synth_cosparse(const Frame& frame, int l, rng::Stream stream);

// l1 distance from v to the best s-sparse approximation: the sum of the
// p - s smallest magnitudes of v.
double sigma_s(const Eigen::VectorXd& v, int s);

// Standard Gaussian M (m x d, row-major draw order) and y = M x + w with w
// uniform on the sphere of radius eta (w = 0 when eta = 0).
SensingInstance gaussian_instance(const Frame& frame, const CosparseSignal& signal, int m,
                                  double eta, rng::Stream stream);

}  // namespace cosparse
