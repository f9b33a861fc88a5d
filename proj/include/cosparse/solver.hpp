#pragma once

#include <string>

#include <Eigen/Dense>

#include "cosparse/frame.hpp"

namespace cosparse {

struct SolverOptions {
  int max_iters = 50000;
  // Feasibility residual target; negative means the default 1e-8 * ||y||_2.
  double tol_feas = -1.0;
  // Optimality certificate target.
  double tol_gap = 1e-6;
  // Over-relaxation parameter of the equality-path primal-dual scheme, in [0, 1].
  double theta = 1.0;
  // Equality path: tau = step_ratio / L, sigma = 1 / (step_ratio * L).
  // Ball path: the splitting penalty parameter.
  double step_ratio = 1.0;
  // Base certificate cadence; the interval doubles after each unsuccessful
  // certification (capped at 128x) so checks stay cheap on long runs.
  int check_every = 100;
  // Optional per-checkpoint trace CSV (iter, objective, feas_residual, gap).
  std::string trace_path;
};

enum class SolveStatus { Converged, MaxIters };

struct SolveResult {
  Eigen::VectorXd z;
  double objective = 0.0;      // ||Omega z||_1
  double feas_residual = 0.0;  // ||Mz - y|| or max(0, ||Mz - y|| - eta)
  double cert_gap = 0.0;
  int iters = 0;
  SolveStatus status = SolveStatus::MaxIters;
};

// min ||Omega z||_1 subject to M z = y, via a primal-dual splitting on the
// stacked operator [Omega; M]. Stops when the feasibility residual and the
// independent certificate gap both clear their tolerances. When ker M = {0}
// the feasible set is a single point and it is returned directly.
SolveResult solve_abp(const Frame& frame, const Eigen::MatrixXd& M, const Eigen::VectorXd& y,
                      const SolverOptions& opts = {});

// min ||Omega z||_1 subject to ||M z - y||_2 <= eta. eta = 0 falls back to
// the equality-constrained path.
SolveResult solve_abpdn(const Frame& frame, const Eigen::MatrixXd& M, const Eigen::VectorXd& y,
                        double eta, const SolverOptions& opts = {});

// First-order optimality gap of z: the best dual vector u with u = sgn(Omega z)
// on the numerical support of Omega z and |u| <= 1 elsewhere is fitted so that
// Omega^T u lies in range(M^T) (equality case) or aligns with the active-ball
// normal (eta > 0); returns that least residual norm plus the
// complementary-slackness defect. Zero iff z satisfies the subgradient
// optimality condition.
double certify(const Frame& frame, const Eigen::MatrixXd& M, const Eigen::VectorXd& z,
               const Eigen::VectorXd& y, double eta);

// Slow independent reference: projected subgradient descent of ||Omega z||_1
// over {z : M z = y}, step c/sqrt(k) within geometric restart blocks, best
// iterate returned. Intended for small instances (d <= 50).
Eigen::VectorXd oracle_subgradient(const Frame& frame, const Eigen::MatrixXd& M,
                                   const Eigen::VectorXd& y, int iters);

}  // namespace cosparse
