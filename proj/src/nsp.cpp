#include "cosparse/nsp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cosparse/errors.hpp"
#include "cosparse/parallel.hpp"

namespace cosparse {

namespace {

// Indices of the s largest magnitudes, ties toward lower index; the
// complement (sorted) is the worst-case cosupport.
std::vector<int> top_s_indices(const Eigen::VectorXd& v, int s) {
  const int p = static_cast<int>(v.size());
  std::vector<int> order(static_cast<size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(v[a]);
    const double mb = std::abs(v[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  });
  order.resize(static_cast<size_t>(s));
  return order;
}

struct SplitNorms {
  double top_l1 = 0.0;   // over Lambda^c (the s largest)
  double top_l2 = 0.0;
  double rest_l1 = 0.0;  // over Lambda
};

SplitNorms split_norms(const Eigen::VectorXd& analysis, int s) {
  SplitNorms n;
  std::vector<char> is_top(static_cast<size_t>(analysis.size()), 0);
  for (int i : top_s_indices(analysis, s)) is_top[static_cast<size_t>(i)] = 1;
  double top_sq = 0.0;
  for (Eigen::Index i = 0; i < analysis.size(); ++i) {
    const double mag = std::abs(analysis[i]);
    if (is_top[static_cast<size_t>(i)]) {
      n.top_l1 += mag;
      top_sq += mag * mag;
    } else {
      n.rest_l1 += mag;
    }
  }
  n.top_l2 = std::sqrt(top_sq);
  return n;
}

void validate(const Frame& frame, int s, double rho) {
  if (s < 1 || s > frame.p()) throw InvalidArgument("nsp: need 1 <= s <= p");
  if (!(rho > 0.0) || !(rho < 1.0)) throw InvalidArgument("nsp: need rho in (0,1)");
}

// Orthonormal basis of ker M, empty when the kernel is trivial.
Eigen::MatrixXd kernel_basis_of(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv.maxCoeff() : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-10 * smax) ++rank;
  const Eigen::Index d = m.cols();
  if (rank >= d) return Eigen::MatrixXd(d, 0);
  return svd.matrixV().rightCols(d - rank);
}

}  // namespace

std::vector<int> worst_cosupport(const Eigen::VectorXd& v_analysis, int s) {
  const int p = static_cast<int>(v_analysis.size());
  if (s < 1 || s > p) throw InvalidArgument("worst_cosupport: need 1 <= s <= p");
  std::vector<char> is_top(static_cast<size_t>(p), 0);
  for (int i : top_s_indices(v_analysis, s)) is_top[static_cast<size_t>(i)] = 1;
  std::vector<int> lambda;
  lambda.reserve(static_cast<size_t>(p - s));
  for (int i = 0; i < p; ++i)
    if (!is_top[static_cast<size_t>(i)]) lambda.push_back(i);
  return lambda;
}

NspMargins nsp_margins(const Frame& frame, const Eigen::VectorXd& v, int s, double rho) {
  validate(frame, s, rho);
  if (v.size() != frame.d()) throw InvalidArgument("nsp_margins: dimension mismatch");
  const SplitNorms n = split_norms(frame.omega * v, s);
  NspMargins m;
  m.plain = n.top_l1 - rho * n.rest_l1;
  m.l2_stable = n.top_l2 - rho / std::sqrt(static_cast<double>(s)) * n.rest_l1;
  return m;
}

double nsp_margin_robust(const Frame& frame, const Eigen::MatrixXd& M,
                         const Eigen::VectorXd& v, int s, double rho, double tau) {
  validate(frame, s, rho);
  if (!(tau > 0.0)) throw InvalidArgument("nsp: robust variant needs tau > 0");
  if (M.cols() != frame.d() || v.size() != frame.d())
    throw InvalidArgument("nsp_margin_robust: dimension mismatch");
  const SplitNorms n = split_norms(frame.omega * v, s);
  return n.top_l2 - rho / std::sqrt(static_cast<double>(s)) * n.rest_l1 -
         tau * (M * v).norm();
}

NspReport nsp_check(const Eigen::MatrixXd& M, const Frame& frame, int s, double rho,
                    NspVariant variant, std::int64_t n_samples, rng::Stream stream,
                    double tau, int threads) {
  validate(frame, s, rho);
  if (M.cols() != frame.d()) throw InvalidArgument("nsp_check: M and frame dimension mismatch");
  if (n_samples < 1) throw InvalidArgument("nsp_check: need n_samples >= 1");
  if (variant == NspVariant::Robust && !(tau > 0.0))
    throw InvalidArgument("nsp_check: robust variant needs tau > 0");

  NspReport report;
  report.variant = variant;
  report.s = s;
  report.rho = rho;
  report.tau = tau;

  Eigen::MatrixXd basis;  // kernel variants only
  if (variant != NspVariant::Robust) {
    basis = kernel_basis_of(M);
    if (basis.cols() == 0) {
      report.status = NspStatus::NotFalsified;
      report.n_tested = 0;
      return report;
    }
  }

  const auto draw_v = [&](rng::Stream& child) -> Eigen::VectorXd {
    if (variant == NspVariant::Robust) return rng::sphere_vector(child, frame.d());
    // Unit vector of ker M; the basis is orthonormal, so normalizing the
    // coefficients normalizes v.
    return basis * rng::sphere_vector(child, basis.cols());
  };

  std::vector<double> margins(static_cast<size_t>(n_samples));
  parallel::for_each_index(n_samples, threads, [&](std::int64_t i) {
    rng::Stream child = stream.child(static_cast<std::uint64_t>(i));
    const Eigen::VectorXd v = draw_v(child);
    margins[static_cast<size_t>(i)] =
        variant == NspVariant::Plain
            ? nsp_margins(frame, v, s, rho).plain
            : (variant == NspVariant::L2Stable
                   ? nsp_margins(frame, v, s, rho).l2_stable
                   : nsp_margin_robust(frame, M, v, s, rho, tau));
  });

  std::int64_t worst = 0;
  for (std::int64_t i = 1; i < n_samples; ++i)
    if (margins[static_cast<size_t>(i)] > margins[static_cast<size_t>(worst)]) worst = i;
  report.n_tested = n_samples;
  report.worst_margin = margins[static_cast<size_t>(worst)];
  rng::Stream worst_stream = stream.child(static_cast<std::uint64_t>(worst));
  report.witness_v = draw_v(worst_stream);
  report.witness_cosupport = worst_cosupport(frame.omega * report.witness_v, s);
  report.status =
      report.worst_margin > 0.0 ? NspStatus::Falsified : NspStatus::NotFalsified;
  return report;
}

ErrorBounds implied_errors(double rho, double A, int s, double sigma_s_value, double tau,
                           double eta, int m) {
  BoundQuery q;
  q.A = A;
  q.B = A;  // unused by the raw-tau error forms
  q.s = s;
  q.p = s;
  q.rho = rho;
  q.tau = tau;
  q.eta = eta;
  return error_bounds(q, sigma_s_value, m, false);
}

double gaussian_robust_tau(double tau, double B, int m) {
  if (m < 1) throw InvalidArgument("gaussian_robust_tau: need m >= 1");
  if (!(tau > 0.0) || !(B > 0.0))
    throw InvalidArgument("gaussian_robust_tau: need tau > 0 and B > 0");
  return tau * std::sqrt(2.0 * B / static_cast<double>(m));
}

}  // namespace cosparse
