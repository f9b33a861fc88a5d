#pragma once

namespace cosparse {

// Inputs shared by the measurement-count and error bounds. Each bound reads
// only the fields it needs and validates them on entry.
struct BoundQuery {
  double A = 1.0;    // lower frame bound
  double B = 1.0;    // upper frame bound
  int s = 1;         // sparsity of the analysis coefficients, s = p - l
  int p = 1;         // number of frame rows
  double eps = 0.01; // failure probability, in (0,1)
  double rho = 0.5;  // null-space-property constant, in (0,1)
  double tau = 1.0;  // robustness constant
  double eta = 0.0;  // noise level, >= 0
};

struct NoisyBoundResult {
  int m = 0;
  double error_radius = 0.0;  // 2 eta / tau
};

struct RobustBoundResult {
  int m = 0;
  double sigma_coeff = 0.0;  // multiplies sigma_s / sqrt(s)
  double noise_coeff = 0.0;  // multiplies eta, evaluated at the returned m
};

struct ErrorBounds {
  double l1 = 0.0;
  double l2 = 0.0;
  double l2_robust = 0.0;
  double cone = 0.0;
};

// Expected norm of an m-dimensional standard Gaussian,
// E_m = sqrt(2) Gamma((m+1)/2) / Gamma(m/2), via log-gamma differences.
double e_m(int m);

// Smallest m with m^2/(m+1) >= (2Bs/A) (sqrt(ln(ep/s)) + sqrt(A ln(1/eps)/(Bs)))^2.
int m_nonuniform(const BoundQuery& q);

// Noisy variant: the bracket gains tau * sqrt(A/(2sB)); the recovery error
// radius for the eta-constrained program is 2 eta / tau.
NoisyBoundResult m_nonuniform_noisy(const BoundQuery& q);

// Uniform bound with F = 1 + (1 + 1/rho)^2:
// smallest m with m^2/(m+1) >= (2BsF/A) (sqrt(ln(ep/s)) + 1/sqrt(2) + sqrt(A ln(1/eps)/(BsF)))^2.
int m_uniform(const BoundQuery& q);

// Robust uniform bound: the uniform RHS picks up the prefactor tau^2/(tau-1)^2
// (tau > 1). Also reports the error coefficients of the robust l2 bound.
RobustBoundResult m_uniform_robust(const BoundQuery& q);

// Right-hand sides of the four recovery-error bounds at a given best-s-term
// error sigma_s_value and noise eta. With gaussian_tau the l2_robust noise
// coefficient uses the Gaussian calibration 2 tau sqrt(2B) (3+rho) / (sqrt(m) sqrt(A) (1-rho));
// otherwise the raw form 2 tau (3+rho) / (sqrt(A) (1-rho)).
ErrorBounds error_bounds(const BoundQuery& q, double sigma_s_value, int m,
                         bool gaussian_tau = false);

// The raw right-hand sides the integer searches run against, in extended
// precision. Exposed so callers can recheck the defining inequalities.
long double rhs_nonuniform(const BoundQuery& q);
long double rhs_nonuniform_noisy(const BoundQuery& q);
long double rhs_uniform(const BoundQuery& q);
long double rhs_uniform_robust(const BoundQuery& q);

// The defining inequality m^2/(m+1) >= rhs, evaluated in extended precision.
bool m_admissible(long long m, long double rhs);

}  // namespace cosparse
