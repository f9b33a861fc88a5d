#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cosparse/bounds.hpp"
#include "cosparse/frame.hpp"
#include "cosparse/rng.hpp"

namespace cosparse {

enum class NspVariant { Plain, L2Stable, Robust };
enum class NspStatus { Falsified, NotFalsified };

struct NspReport {
  NspVariant variant = NspVariant::Plain;
  NspStatus status = NspStatus::NotFalsified;
  // Largest LHS - RHS seen over the tested vectors; > 0 means a violation.
  double worst_margin = 0.0;
  Eigen::VectorXd witness_v;            // empty when n_tested = 0
  std::vector<int> witness_cosupport;   // the Lambda achieving worst_margin
  std::int64_t n_tested = 0;
  int s = 0;
  double rho = 0.0;
  double tau = 0.0;
};

// Lambda maximizing the checked inequality's LHS (and minimizing its RHS)
// for this analysis vector: the complement of the s largest magnitudes,
// ties resolved toward lower indices.
std::vector<int> worst_cosupport(const Eigen::VectorXd& v_analysis, int s);

// LHS - RHS of the plain and l2-stable inequalities for v at its worst
// cosupport. Positive margin = violated.
struct NspMargins {
  double plain = 0.0;
  double l2_stable = 0.0;
};
NspMargins nsp_margins(const Frame& frame, const Eigen::VectorXd& v, int s, double rho);

// Same for the robust variant (RHS gains tau * ||Mv||_2).
double nsp_margin_robust(const Frame& frame, const Eigen::MatrixXd& M,
                         const Eigen::VectorXd& v, int s, double rho, double tau);

// Sampling falsifier. Plain/l2-stable variants draw unit vectors from ker M
// (orthonormal SVD basis, Gaussian coefficients); if the kernel is trivial
// the report is vacuously NotFalsified with n_tested = 0. The robust variant
// draws v uniformly on the unit sphere of R^d. NotFalsified is a sampling
// verdict, never a proof.
NspReport nsp_check(const Eigen::MatrixXd& M, const Frame& frame, int s, double rho,
                    NspVariant variant, std::int64_t n_samples, rng::Stream stream,
                    double tau = 1.0, int threads = 1);

// Recovery-error radii implied by an NSP constant rho (delegates to
// error_bounds with the raw tau form).
ErrorBounds implied_errors(double rho, double A, int s, double sigma_s_value, double tau,
                           double eta, int m);

// Robust NSP constant calibrated for Gaussian M: tau * sqrt(2B/m).
double gaussian_robust_tau(double tau, double B, int m);

}  // namespace cosparse
