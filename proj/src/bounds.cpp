#include "cosparse/bounds.hpp"

#include <cmath>
#include <numbers>

#include "cosparse/errors.hpp"

namespace cosparse {

namespace {

void validate_common(const BoundQuery& q) {
  if (!(q.A > 0.0) || !(q.B >= q.A)) throw InvalidArgument("bounds: need 0 < A <= B");
  if (q.s < 1 || q.s > q.p) throw InvalidArgument("bounds: need 1 <= s <= p");
  if (!(q.eps > 0.0) || !(q.eps < 1.0)) throw InvalidArgument("bounds: need eps in (0,1)");
}

void validate_rho(const BoundQuery& q) {
  if (!(q.rho > 0.0) || !(q.rho < 1.0)) throw InvalidArgument("bounds: need rho in (0,1)");
}

long double ln_ep_over_s(const BoundQuery& q) {
  return std::log((std::numbers::e_v<long double> * q.p) / q.s);
}

// Smallest integer m >= 1 with m^2/(m+1) >= rhs. The quadratic
// m^2 - rhs*m - rhs = 0 gives the real crossing point; scan a small window
// around it so floating-point error in the root cannot shift the answer.
int smallest_admissible_m(long double rhs) {
  if (!(rhs > 0.0L)) return 1;
  const long double root = 0.5L * (rhs + std::sqrt(rhs * rhs + 4.0L * rhs));
  long long m = static_cast<long long>(std::floor(root)) - 2;
  if (m < 1) m = 1;
  while (!m_admissible(m, rhs)) ++m;
  if (m > 2000000000LL) throw InvalidArgument("bounds: required m overflows int");
  return static_cast<int>(m);
}

long double square(long double x) { return x * x; }

}  // namespace

bool m_admissible(long long m, long double rhs) {
  const long double lm = static_cast<long double>(m);
  return lm * lm / (lm + 1.0L) >= rhs;
}

double e_m(int m) {
  if (m < 1) throw InvalidArgument("e_m: need m >= 1");
  const double half = 0.5 * static_cast<double>(m);
  return std::exp(0.5 * std::log(2.0) + std::lgamma(half + 0.5) - std::lgamma(half));
}

long double rhs_nonuniform(const BoundQuery& q) {
  validate_common(q);
  const long double bracket =
      std::sqrt(ln_ep_over_s(q)) +
      std::sqrt(static_cast<long double>(q.A) * std::log(1.0L / q.eps) /
                (static_cast<long double>(q.B) * q.s));
  return (2.0L * q.B * q.s / q.A) * square(bracket);
}

long double rhs_nonuniform_noisy(const BoundQuery& q) {
  validate_common(q);
  if (!(q.tau > 0.0)) throw InvalidArgument("bounds: noisy bound needs tau > 0");
  const long double bracket =
      std::sqrt(ln_ep_over_s(q)) +
      std::sqrt(static_cast<long double>(q.A) * std::log(1.0L / q.eps) /
                (static_cast<long double>(q.B) * q.s)) +
      q.tau * std::sqrt(static_cast<long double>(q.A) /
                        (2.0L * q.s * static_cast<long double>(q.B)));
  return (2.0L * q.B * q.s / q.A) * square(bracket);
}

long double rhs_uniform(const BoundQuery& q) {
  validate_common(q);
  validate_rho(q);
  const long double f = 1.0L + square(1.0L + 1.0L / static_cast<long double>(q.rho));
  const long double bracket =
      std::sqrt(ln_ep_over_s(q)) + 1.0L / std::sqrt(2.0L) +
      std::sqrt(static_cast<long double>(q.A) * std::log(1.0L / q.eps) /
                (static_cast<long double>(q.B) * q.s * f));
  return (2.0L * q.B * q.s * f / q.A) * square(bracket);
}

long double rhs_uniform_robust(const BoundQuery& q) {
  if (!(q.tau > 1.0)) throw InvalidArgument("bounds: robust bound needs tau > 1");
  const long double t = q.tau;
  return rhs_uniform(q) * square(t / (t - 1.0L));
}

int m_nonuniform(const BoundQuery& q) { return smallest_admissible_m(rhs_nonuniform(q)); }

NoisyBoundResult m_nonuniform_noisy(const BoundQuery& q) {
  NoisyBoundResult r;
  r.m = smallest_admissible_m(rhs_nonuniform_noisy(q));
  if (q.eta < 0.0) throw InvalidArgument("bounds: need eta >= 0");
  r.error_radius = 2.0 * q.eta / q.tau;
  return r;
}

int m_uniform(const BoundQuery& q) { return smallest_admissible_m(rhs_uniform(q)); }

RobustBoundResult m_uniform_robust(const BoundQuery& q) {
  RobustBoundResult r;
  r.m = smallest_admissible_m(rhs_uniform_robust(q));
  const double rho = q.rho;
  r.sigma_coeff = 2.0 * (1.0 + rho) * (1.0 + rho) / (std::sqrt(q.A) * (1.0 - rho));
  r.noise_coeff = 2.0 * q.tau * std::sqrt(2.0 * q.B) * (3.0 + rho) /
                  (std::sqrt(static_cast<double>(r.m)) * std::sqrt(q.A) * (1.0 - rho));
  return r;
}

ErrorBounds error_bounds(const BoundQuery& q, double sigma_s_value, int m, bool gaussian_tau) {
  validate_common(q);
  validate_rho(q);
  if (sigma_s_value < 0.0) throw InvalidArgument("error_bounds: sigma_s must be >= 0");
  if (q.eta < 0.0) throw InvalidArgument("error_bounds: need eta >= 0");
  if (!(q.tau > 0.0)) throw InvalidArgument("error_bounds: need tau > 0");
  const double rho = q.rho;
  ErrorBounds out;
  out.l1 = 2.0 * (1.0 + rho) / (1.0 - rho) * sigma_s_value;
  out.l2 = 2.0 * (1.0 + rho) * (1.0 + rho) / (std::sqrt(q.A) * (1.0 - rho)) * sigma_s_value /
           std::sqrt(static_cast<double>(q.s));
  double noise_coeff;
  if (gaussian_tau) {
    if (m < 1) throw InvalidArgument("error_bounds: Gaussian-tau form needs m >= 1");
    noise_coeff = 2.0 * q.tau * std::sqrt(2.0 * q.B) * (3.0 + rho) /
                  (std::sqrt(static_cast<double>(m)) * std::sqrt(q.A) * (1.0 - rho));
  } else {
    noise_coeff = 2.0 * q.tau * (3.0 + rho) / (std::sqrt(q.A) * (1.0 - rho));
  }
  out.l2_robust = out.l2 + noise_coeff * q.eta;
  out.cone = 2.0 * q.eta / q.tau;
  return out;
}

}  // namespace cosparse
