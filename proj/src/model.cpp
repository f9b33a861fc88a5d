#include "cosparse/model.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "cosparse/errors.hpp"

namespace cosparse {

namespace {

// Uniform size-l subset of {0, ..., p-1} via partial Fisher-Yates, sorted.
std::vector<int> sample_subset(int p, int l, rng::Stream& stream) {
  std::vector<int> pool(static_cast<size_t>(p));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < l; ++i) {
    const auto j = i + static_cast<int>(stream.uniform_index(static_cast<std::uint64_t>(p - i)));
    std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
  }
  std::vector<int> subset(pool.begin(), pool.begin() + l);
  std::sort(subset.begin(), subset.end());
  return subset;
}

}  // namespace

CosparsityResult cosparsity(const Frame& frame, const Eigen::VectorXd& x, double tol) {
  if (tol < 0.0) throw InvalidArgument("cosparsity: tol must be >= 0");
  if (x.size() != frame.d()) throw InvalidArgument("cosparsity: x has wrong dimension");
  const Eigen::VectorXd coeffs = frame.omega * x;
  CosparsityResult result;
  for (int i = 0; i < static_cast<int>(coeffs.size()); ++i)
    if (std::abs(coeffs[i]) <= tol) result.cosupport.push_back(i);
  result.l = static_cast<int>(result.cosupport.size());
  return result;
}

CosparseSignal synth_cosparse(const Frame& frame, int l, rng::Stream stream) {
  const int p = static_cast<int>(frame.p());
  const int d = static_cast<int>(frame.d());
  if (l < 0 || l > p) throw InvalidArgument("synth_cosparse: need 0 <= l <= p");

  std::vector<int> cosupport = sample_subset(p, l, stream);

  Eigen::MatrixXd kernel_basis;
  if (l == 0) {
    kernel_basis = Eigen::MatrixXd::Identity(d, d);
  } else {
    Eigen::MatrixXd rows(l, d);
    for (int i = 0; i < l; ++i) rows.row(i) = frame.omega.row(cosupport[static_cast<size_t>(i)]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
    const double smax = svd.singularValues().size() ? svd.singularValues().maxCoeff() : 0.0;
    const double threshold = 1e-10 * smax;
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > threshold) ++rank;
    if (rank >= d)
      throw EmptyKernel("selected cosupport rows span R^" + std::to_string(d) +
                        ", no nonzero signal is annihilated (l=" + std::to_string(l) + ")");
    kernel_basis = svd.matrixV().rightCols(d - rank);
  }

  // Gaussian direction in the kernel; the basis is orthonormal so
  // normalizing the coefficients normalizes x.
  Eigen::VectorXd c;
  double cnorm = 0.0;
  for (int attempt = 0; attempt < 64; ++attempt) {
    c = rng::gaussian_vector(stream, kernel_basis.cols());
    cnorm = c.norm();
    if (cnorm > 1e-12) break;
  }
  if (cnorm <= 1e-12) throw DegenerateDraw("synth_cosparse: zero coefficient draw");

  CosparseSignal signal;
  signal.x = kernel_basis * (c / cnorm);
  signal.cosupport = std::move(cosupport);
  signal.cosparsity = l;
  return signal;
}

double sigma_s(const Eigen::VectorXd& v, int s) {
  const int p = static_cast<int>(v.size());
  if (s < 0 || s > p) throw InvalidArgument("sigma_s: need 0 <= s <= p");
  std::vector<double> mags(static_cast<size_t>(p));
  for (int i = 0; i < p; ++i) mags[static_cast<size_t>(i)] = std::abs(v[i]);
  // Keep the s largest magnitudes; the tail sum is the approximation error.
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double tail = 0.0;
  for (int i = p - 1; i >= s; --i) tail += mags[static_cast<size_t>(i)];
  return tail;
}

SensingInstance gaussian_instance(const Frame& frame, const CosparseSignal& signal, int m,
                                  double eta, rng::Stream stream) {
  if (m < 1) throw InvalidArgument("gaussian_instance: need m >= 1");
  if (eta < 0.0) throw InvalidArgument("gaussian_instance: need eta >= 0");
  if (signal.x.size() != frame.d())
    throw InvalidArgument("gaussian_instance: signal dimension mismatch");
  SensingInstance inst;
  inst.M = rng::gaussian_matrix(stream, m, frame.d());
  inst.y = inst.M * signal.x;
  if (eta > 0.0) inst.y += eta * rng::sphere_vector(stream, m);
  inst.eta = eta;
  inst.truth = signal;
  return inst;
}

}  // namespace cosparse
