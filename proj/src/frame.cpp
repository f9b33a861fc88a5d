#include "cosparse/frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cosparse/errors.hpp"

namespace cosparse {

namespace {

// NotAFrame when sigma_min^2 <= rel_tol * sigma_max^2.
constexpr double kNotAFrameRelTol = 1e-12;

Eigen::JacobiSVD<Eigen::MatrixXd> svd_of(const Eigen::MatrixXd& omega) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(omega);
}

double ratio_of(const Eigen::MatrixXd& omega) {
  auto [a, b] = frame_bounds(omega);
  return b / a;
}

Eigen::MatrixXd apply_log_scales(const Eigen::MatrixXd& base, const Eigen::VectorXd& u,
                                 double alpha) {
  Eigen::MatrixXd scaled = base;
  for (Eigen::Index i = 0; i < scaled.rows(); ++i)
    scaled.row(i) *= std::exp(alpha * (u[i] - 0.5));
  return scaled;
}

}  // namespace

std::pair<double, double> frame_bounds(const Eigen::MatrixXd& omega) {
  if (omega.rows() == 0 || omega.cols() == 0)
    throw InvalidArgument("frame_bounds: empty operator");
  if (omega.rows() < omega.cols())
    throw NotAFrame("fewer rows than columns, rows cannot span R^" +
                    std::to_string(omega.cols()));
  if (!omega.allFinite()) throw InvalidArgument("frame_bounds: non-finite entries");
  auto svd = svd_of(omega);
  const double smax = svd.singularValues().maxCoeff();
  const double smin = svd.singularValues().minCoeff();
  const double a = smin * smin;
  const double b = smax * smax;
  if (b <= 0.0 || a <= kNotAFrameRelTol * b)
    throw NotAFrame("rows do not span R^" + std::to_string(omega.cols()) +
                    " (lower frame bound is numerically zero)");
  return {a, b};
}

Frame make_frame(Eigen::MatrixXd omega) {
  auto [a, b] = frame_bounds(omega);
  return Frame{std::move(omega), a, b};
}

Frame tight_frame(Eigen::Index p, Eigen::Index d, rng::Stream stream) {
  if (d < 1 || p < d)
    throw InvalidArgument("tight_frame needs p >= d >= 1, got p=" + std::to_string(p) +
                          " d=" + std::to_string(d));
  for (int attempt = 0; attempt < 3; ++attempt) {
    Eigen::MatrixXd g(p, d);
    for (Eigen::Index i = 0; i < p; ++i) g.row(i) = rng::sphere_vector(stream, d).transpose();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::VectorXd rdiag = qr.matrixQR().diagonal().head(d).cwiseAbs();
    if (rdiag.minCoeff() <= 1e-12 * rdiag.maxCoeff()) continue;
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(p, d);
    return Frame{std::move(q), 1.0, 1.0};
  }
  throw DegenerateDraw("tight_frame: rank-deficient draw three times in a row");
}

Frame scaled_frame(const Frame& base, const Eigen::VectorXd& row_scales) {
  if (row_scales.size() != base.p())
    throw InvalidArgument("scaled_frame: need one scale per row");
  if (!(row_scales.array() > 0.0).all())
    throw InvalidArgument("scaled_frame: scales must be positive");
  Eigen::MatrixXd scaled = base.omega;
  for (Eigen::Index i = 0; i < scaled.rows(); ++i) scaled.row(i) *= row_scales[i];
  return make_frame(std::move(scaled));
}

Frame frame_with_ratio(Eigen::Index p, Eigen::Index d, double target_ratio,
                       rng::Stream stream) {
  if (!(target_ratio >= 1.0))
    throw InvalidArgument("frame_with_ratio: target ratio must be >= 1");
  Frame base = tight_frame(p, d, stream.child(0));
  if (target_ratio <= 1.0 + 1e-9) return base;

  rng::Stream scale_stream = stream.child(1);
  Eigen::VectorXd u(p);
  for (Eigen::Index i = 0; i < p; ++i) u[i] = scale_stream.uniform();

  // ratio(alpha) is 1 at alpha = 0 and grows without bound as the log-uniform
  // spread widens; bracket the target, then bisect the spread parameter.
  double lo = 0.0, hi = 1.0;
  int expand = 0;
  while (ratio_of(apply_log_scales(base.omega, u, hi)) < target_ratio) {
    lo = hi;
    hi *= 2.0;
    if (++expand > 60) throw DegenerateDraw("frame_with_ratio: could not bracket target ratio");
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = ratio_of(apply_log_scales(base.omega, u, mid));
    if (std::abs(r - target_ratio) <= 1e-6 * target_ratio) {
      lo = hi = mid;
      break;
    }
    (r < target_ratio ? lo : hi) = mid;
  }
  return make_frame(apply_log_scales(base.omega, u, 0.5 * (lo + hi)));
}

}  // namespace cosparse
