#include "cosparse/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cosparse/errors.hpp"
#include "cosparse/io.hpp"

namespace cosparse {

namespace {

constexpr double kRankRelTol = 1e-10;

// SVD-backed view of the measurement matrix: rank decision, least-squares
// solves, and the orthogonal projector onto ker M. Shared by the solver, the
// certificate, and the subgradient oracle.
struct MeasurementDecomp {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd;
  int rank = 0;
  Eigen::MatrixXd kernel_projector;  // d x d, I - Vr Vr^T

  explicit MeasurementDecomp(const Eigen::MatrixXd& M)
      : svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV) {
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv.maxCoeff() : 0.0;
    const int full = static_cast<int>(std::min(M.rows(), M.cols()));
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] > kRankRelTol * smax) ++rank;
    if (rank < full)
      throw RankDeficient("measurement matrix is numerically rank-deficient (rank " +
                          std::to_string(rank) + " of " + std::to_string(full) + ")");
    const Eigen::MatrixXd vr = svd.matrixV().leftCols(rank);
    kernel_projector =
        Eigen::MatrixXd::Identity(M.cols(), M.cols()) - vr * vr.transpose();
  }

  bool kernel_trivial() const { return rank >= kernel_projector.rows(); }

  Eigen::VectorXd least_squares(const Eigen::VectorXd& rhs) const { return svd.solve(rhs); }
};

// Largest eigenvalue of a symmetric PSD matrix by power iteration with a
// deterministic start, reported after `iters` rounds.
double power_lambda_max(const Eigen::MatrixXd& g, int iters) {
  const Eigen::Index n = g.rows();
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i)
    x[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
  x /= x.norm();
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd gx = g * x;
    const double nm = gx.norm();
    if (nm <= 1e-300) return 0.0;
    x = gx / nm;
  }
  return x.dot(g * x);
}

// minimize ||c + A w||^2 over lo <= w <= hi (coordinatewise, hi may be +inf)
// by projected FISTA on the k x k Gram system; w is both warm start and
// output. Returns the best objective value reached.
double box_least_squares(const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
                         const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                         Eigen::VectorXd& w, int max_iters) {
  const Eigen::Index k = a.cols();
  if (k == 0) return c.squaredNorm();
  const Eigen::MatrixXd gram = a.transpose() * a;
  const Eigen::VectorXd b = a.transpose() * c;
  const double lambda = power_lambda_max(gram, 60);
  const double step = 1.0 / std::max(2.5 * lambda, 1e-300);

  const auto project = [&](Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < k; ++i) v[i] = std::min(hi[i], std::max(lo[i], v[i]));
  };
  const auto value = [&](const Eigen::VectorXd& v) {
    return c.squaredNorm() + 2.0 * b.dot(v) + v.dot(gram * v);
  };

  project(w);
  Eigen::VectorXd prev = w;
  Eigen::VectorXd momentum = w;
  double t = 1.0;
  double best = value(w);
  Eigen::VectorXd best_w = w;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd next = momentum - step * 2.0 * (b + gram * momentum);
    project(next);
    const double val = value(next);
    if (val < best) {
      best = val;
      best_w = next;
    } else if (val > value(prev)) {
      // Monotone restart keeps the momentum sequence from overshooting.
      t = 1.0;
      momentum = next;
      prev = next;
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    momentum = next + ((t - 1.0) / tn) * (next - prev);
    if ((next - prev).norm() <= 1e-15 * (1.0 + next.norm())) {
      prev = next;
      break;
    }
    t = tn;
    prev = next;
  }
  w = best_w;
  return std::max(0.0, best);
}

struct SupportSplit {
  std::vector<int> support;
  std::vector<int> off;
  std::vector<double> sign_on_support;
};

// Numerical support of the analysis coefficients: relative threshold
// 1e-7 * ||Omega z||_inf, with everything treated as off-support when the
// whole vector sits below an absolute floor (z numerically zero).
SupportSplit split_support(const Eigen::VectorXd& oz, double abs_floor) {
  SupportSplit sp;
  const int p = static_cast<int>(oz.size());
  const double zmax = p ? oz.cwiseAbs().maxCoeff() : 0.0;
  if (zmax <= abs_floor) {
    for (int i = 0; i < p; ++i) sp.off.push_back(i);
    return sp;
  }
  const double threshold = 1e-7 * zmax;
  for (int i = 0; i < p; ++i) {
    if (std::abs(oz[i]) > threshold) {
      sp.support.push_back(i);
      sp.sign_on_support.push_back(oz[i] > 0.0 ? 1.0 : -1.0);
    } else {
      sp.off.push_back(i);
    }
  }
  return sp;
}

// Least-squares dual certificate fit; see certify() in the header. warm_u
// (full p-vector) and warm_mu seed the free coordinates when provided.
double certify_impl(const Frame& frame, const MeasurementDecomp& dec,
                    const Eigen::MatrixXd& M, const Eigen::VectorXd& z,
                    const Eigen::VectorXd& y, double eta, const Eigen::VectorXd* warm_u,
                    double warm_mu) {
  const Eigen::Index d = frame.d();
  const Eigen::VectorXd oz = frame.omega * z;
  const double abs_floor = 1e-10 * (1.0 + y.norm());
  const SupportSplit sp = split_support(oz, abs_floor);
  const auto k = static_cast<Eigen::Index>(sp.off.size());

  Eigen::VectorXd fixed = Eigen::VectorXd::Zero(d);
  for (size_t j = 0; j < sp.support.size(); ++j)
    fixed += sp.sign_on_support[j] * frame.omega.row(sp.support[j]).transpose();
  Eigen::MatrixXd free_cols(d, k);
  for (Eigen::Index j = 0; j < k; ++j)
    free_cols.col(j) = frame.omega.row(sp.off[static_cast<size_t>(j)]).transpose();

  Eigen::VectorXd w0 = Eigen::VectorXd::Zero(k);
  if (warm_u)
    for (Eigen::Index j = 0; j < k; ++j)
      w0[j] = std::clamp((*warm_u)[sp.off[static_cast<size_t>(j)]], -1.0, 1.0);

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k);
  if (eta == 0.0) {
    // Equality constraints: Omega^T u must lie in range(M^T).
    if (dec.kernel_trivial()) return 0.0;
    const Eigen::VectorXd c = dec.kernel_projector * fixed;
    const Eigen::MatrixXd a = dec.kernel_projector * free_cols;
    return std::sqrt(box_least_squares(c, a, -ones, ones, w0, 400));
  }

  const Eigen::VectorXd r = M * z - y;
  const double rn = r.norm();
  if (rn < eta * (1.0 - 1e-7)) {
    // Ball constraint inactive: the subgradient itself must vanish.
    return std::sqrt(box_least_squares(fixed, free_cols, -ones, ones, w0, 400));
  }
  // Active ball: Omega^T u + mu M^T rhat = 0 with mu >= 0.
  const Eigen::VectorXd q = M.transpose() * (r / std::max(rn, 1e-300));
  Eigen::MatrixXd a(d, k + 1);
  a.leftCols(k) = free_cols;
  a.col(k) = q;
  Eigen::VectorXd lo(k + 1), hi(k + 1), w(k + 1);
  lo.head(k) = -ones;
  hi.head(k) = ones;
  lo[k] = 0.0;
  hi[k] = std::numeric_limits<double>::infinity();
  w.head(k) = w0;
  w[k] = std::max(0.0, warm_mu);
  const double residual = std::sqrt(box_least_squares(fixed, a, lo, hi, w, 400));
  const double defect = w[k] * std::max(0.0, eta - rn);
  return residual + defect;
}

// Support-identification polish. The analysis coordinates of a first-order
// iterate decay toward zero only at a sublinear rate, so the exact-zero
// pattern of the minimizer is read off from a coarse magnitude band instead:
// coordinates with |(Omega z)_i| <= rel_th * max become the candidate
// cosupport Lambda, z is restricted to V = ker(Omega_Lambda), and the
// sign-restricted objective (linear on V) is minimized there exactly. The
// returned point is only accepted by the caller if the independent
// certificate passes, so a wrong guess costs nothing but the attempt.
std::optional<Eigen::VectorXd> polish_candidate(const Frame& frame, const Eigen::MatrixXd& M,
                                                const Eigen::VectorXd& y, double eta,
                                                const Eigen::VectorXd& z, double rel_th,
                                                double feas_tol) {
  const Eigen::Index d = frame.d();
  const Eigen::Index p = frame.p();
  const Eigen::VectorXd oz = frame.omega * z;
  const double mx = oz.cwiseAbs().maxCoeff();
  if (!(mx > 0.0)) return std::nullopt;

  std::vector<int> lambda;
  Eigen::VectorXd sgn = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (std::abs(oz[i]) <= rel_th * mx)
      lambda.push_back(static_cast<int>(i));
    else
      sgn[i] = oz[i] > 0.0 ? 1.0 : -1.0;
  }
  if (lambda.empty()) return std::nullopt;

  Eigen::MatrixXd sub(static_cast<Eigen::Index>(lambda.size()), d);
  for (size_t j = 0; j < lambda.size(); ++j) sub.row(static_cast<Eigen::Index>(j)) =
      frame.omega.row(lambda[j]);
  Eigen::JacobiSVD<Eigen::MatrixXd> sub_svd(sub, Eigen::ComputeFullV);
  const auto& sv = sub_svd.singularValues();
  const double smax = sv.size() ? sv.maxCoeff() : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > kRankRelTol * smax) ++rank;
  const Eigen::Index nullity = d - rank;
  if (nullity == 0) return std::nullopt;
  const Eigen::MatrixXd q = sub_svd.matrixV().rightCols(nullity);

  const Eigen::MatrixXd g = M * q;
  Eigen::JacobiSVD<Eigen::MatrixXd> g_svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd a_ls = g_svd.solve(y);
  const double res_min = (g * a_ls - y).norm();

  if (eta == 0.0) {
    // Equality constraints: V must contain a feasible point; the
    // least-squares fit is it (or the guess is wrong).
    if (res_min > feas_tol) return std::nullopt;
    return std::optional<Eigen::VectorXd>(q * a_ls);
  }

  if (res_min > eta) return std::nullopt;
  const Eigen::VectorXd h = q.transpose() * (frame.omega.transpose() * sgn);
  if (h.norm() <= 1e-12 * (1.0 + sgn.lpNorm<1>())) return std::optional<Eigen::VectorXd>(q * a_ls);

  // Minimize h . a over ||Ga - y|| <= eta: stationarity gives
  // a(mu) = a_ls - (G^T G)^+ h / mu with the residual norm decreasing in mu.
  const auto& gs = g_svd.singularValues();
  const double gsmax = gs.size() ? gs.maxCoeff() : 0.0;
  Eigen::Index grank = 0;
  for (Eigen::Index i = 0; i < gs.size(); ++i)
    if (gs[i] > kRankRelTol * gsmax) ++grank;
  if (grank < nullity) {
    // h must vanish along ker G or the linear objective is unbounded on the
    // slice, meaning the sign pattern cannot be optimal.
    const Eigen::MatrixXd vk = g_svd.matrixV().rightCols(nullity - grank);
    if ((vk.transpose() * h).norm() > 1e-10 * h.norm()) return std::nullopt;
  }
  const Eigen::MatrixXd vr = g_svd.matrixV().leftCols(grank);
  Eigen::VectorXd pinv_h = vr.transpose() * h;
  for (Eigen::Index i = 0; i < grank; ++i) pinv_h[i] /= gs[i] * gs[i];
  const Eigen::VectorXd dir = vr * pinv_h;  // (G^T G)^+ h

  const auto residual_at = [&](double inv_mu) { return (g * (a_ls - inv_mu * dir) - y).norm(); };
  if (res_min >= eta * (1.0 - 1e-13)) return std::optional<Eigen::VectorXd>(q * a_ls);
  // Bracket inv_mu = 1/mu so the residual crosses eta, then bisect.
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && residual_at(hi) < eta; ++i) hi *= 2.0;
  if (residual_at(hi) < eta) return std::nullopt;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (residual_at(mid) < eta ? lo : hi) = mid;
  }
  return std::optional<Eigen::VectorXd>(q * (a_ls - lo * dir));
}

void validate_solve_inputs(const Frame& frame, const Eigen::MatrixXd& M,
                           const Eigen::VectorXd& y, double eta, const SolverOptions& opts) {
  if (M.cols() != frame.d()) throw InvalidArgument("solver: M and frame dimension mismatch");
  if (y.size() != M.rows()) throw InvalidArgument("solver: y size mismatch");
  if (M.rows() < 1) throw InvalidArgument("solver: M needs at least one row");
  if (eta < 0.0) throw InvalidArgument("solver: eta must be >= 0");
  if (opts.max_iters < 1) throw InvalidArgument("solver: max_iters must be >= 1");
  if (!(opts.tol_gap > 0.0)) throw InvalidArgument("solver: tol_gap must be > 0");
  if (opts.theta < 0.0 || opts.theta > 1.0)
    throw InvalidArgument("solver: theta must be in [0, 1]");
  if (!(opts.step_ratio > 0.0)) throw InvalidArgument("solver: step_ratio must be > 0");
  if (opts.check_every < 1) throw InvalidArgument("solver: check_every must be >= 1");
}

SolveResult solve_core(const Frame& frame, const Eigen::MatrixXd& M, const Eigen::VectorXd& y,
                       double eta, const SolverOptions& opts) {
  validate_solve_inputs(frame, M, y, eta, opts);
  const Eigen::Index d = frame.d();
  const Eigen::Index m = M.rows();
  const MeasurementDecomp dec(M);
  const double tol_feas = opts.tol_feas > 0.0 ? opts.tol_feas : 1e-8 * y.norm();

  const auto feas_of = [&](const Eigen::VectorXd& z) {
    const double r = (M * z - y).norm();
    return eta > 0.0 ? std::max(0.0, r - eta) : r;
  };

  std::vector<std::vector<std::string>> trace_rows;
  const auto trace = [&](int it, double objective, double feas, double gap) {
    if (opts.trace_path.empty()) return;
    trace_rows.push_back({std::to_string(it), io::format_double(objective),
                          io::format_double(feas), io::format_double(gap)});
  };
  const auto flush_trace = [&]() {
    if (!opts.trace_path.empty())
      io::write_table_csv(opts.trace_path, {"iter", "objective", "feas_residual", "gap"},
                          trace_rows);
  };

  // ker M = {0} with equality constraints: the feasible set is the single
  // least-squares point, which is therefore the minimizer.
  if (eta == 0.0 && dec.kernel_trivial()) {
    SolveResult res;
    res.z = dec.least_squares(y);
    res.objective = (frame.omega * res.z).lpNorm<1>();
    res.feas_residual = feas_of(res.z);
    res.cert_gap = certify_impl(frame, dec, M, res.z, y, eta, nullptr, 0.0);
    res.iters = 0;
    res.status =
        res.feas_residual <= tol_feas ? SolveStatus::Converged : SolveStatus::MaxIters;
    trace(0, res.objective, res.feas_residual, res.cert_gap);
    flush_trace();
    return res;
  }

  SolveResult res;
  res.cert_gap = std::numeric_limits<double>::infinity();
  Eigen::VectorXd z = dec.least_squares(y);
  bool converged = false;

  // Shared checkpoint: exact support-identification candidates first (the
  // certificate is the acceptance gate, so a wrong candidate just costs the
  // attempt), then the raw iterate once it is feasible.
  const auto checkpoint = [&](int it, const Eigen::VectorXd& u_warm, double mu_warm) {
    for (double rel_th : {1e-3, 1e-5}) {
      std::optional<Eigen::VectorXd> cand =
          polish_candidate(frame, M, y, eta, z, rel_th, tol_feas);
      if (!cand) continue;
      const double cand_feas = feas_of(*cand);
      if (cand_feas > tol_feas) continue;
      const double cand_gap = certify_impl(frame, dec, M, *cand, y, eta, &u_warm, mu_warm);
      if (cand_gap <= opts.tol_gap) {
        z = *cand;
        res.cert_gap = cand_gap;
        trace(it, (frame.omega * z).lpNorm<1>(), cand_feas, cand_gap);
        converged = true;
        return;
      }
    }
    const double feas = feas_of(z);
    if (feas <= tol_feas) {
      const double gap = certify_impl(frame, dec, M, z, y, eta, &u_warm, mu_warm);
      res.cert_gap = gap;
      trace(it, (frame.omega * z).lpNorm<1>(), feas, gap);
      if (gap <= opts.tol_gap) converged = true;
    }
  };

  int it = 0;
  // Certification cadence: every check_every iterations at first, doubling
  // after each unsuccessful certification (capped), so the certificate cost
  // never dominates the cheap iterations on long runs.
  int interval = opts.check_every;
  int next_check = opts.check_every;

  if (eta == 0.0) {
    // Equality path: primal-dual splitting on the stacked K = [Omega; M]
    // with sigma tau ||K||^2 < 1.
    const Eigen::MatrixXd gram_k =
        frame.omega.transpose() * frame.omega + M.transpose() * M;
    const double op_norm = 1.01 * std::sqrt(std::max(power_lambda_max(gram_k, 100), 1e-300));
    const double tau = opts.step_ratio / op_norm;
    const double sigma = 1.0 / (opts.step_ratio * op_norm);

    Eigen::VectorXd zbar = z;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(frame.p());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd znew(d);
    while (it < opts.max_iters && !converged) {
      ++it;
      // Dual ascent: l_inf projection on the analysis block, pure
      // translation on the measurement block.
      u = (u + sigma * (frame.omega * zbar)).cwiseMax(-1.0).cwiseMin(1.0);
      v += sigma * (M * zbar - y);
      // Primal descent and over-relaxation.
      znew = z - tau * (frame.omega.transpose() * u + M.transpose() * v);
      zbar = znew + opts.theta * (znew - z);
      z.swap(znew);
      if (it >= next_check || it == opts.max_iters) {
        checkpoint(it, u, v.norm());
        interval = std::min(interval * 2, 128 * opts.check_every);
        next_check = it + interval;
      }
    }
    if (!std::isfinite(res.cert_gap))
      res.cert_gap = certify_impl(frame, dec, M, z, y, eta, &u, v.norm());
  } else {
    // Ball path: operator splitting with exact prefactored linear solves,
    // w = Omega z against the l1 term and r = M z - y against the eta-ball.
    // The first-order scheme above stalls here because the minimizer keeps
    // many small nonzero analysis coordinates whose signs settle late.
    const double rho = opts.step_ratio;
    const Eigen::LLT<Eigen::MatrixXd> llt(frame.omega.transpose() * frame.omega +
                                          M.transpose() * M);
    Eigen::VectorXd w = frame.omega * z;
    Eigen::VectorXd uw = Eigen::VectorXd::Zero(frame.p());
    Eigen::VectorXd r = M * z - y;
    if (r.norm() > eta) r *= eta / r.norm();
    Eigen::VectorXd ur = Eigen::VectorXd::Zero(m);
    while (it < opts.max_iters && !converged) {
      ++it;
      z = llt.solve(frame.omega.transpose() * (w - uw) + M.transpose() * (y + r - ur));
      const Eigen::VectorXd oz = frame.omega * z;
      const Eigen::VectorXd mzy = M * z - y;
      Eigen::VectorXd a = oz + uw;
      for (Eigen::Index i = 0; i < a.size(); ++i)
        w[i] = std::copysign(std::max(0.0, std::abs(a[i]) - 1.0 / rho), a[i]);
      Eigen::VectorXd b = mzy + ur;
      const double bn = b.norm();
      r = bn > eta ? Eigen::VectorXd((eta / bn) * b) : b;
      uw += oz - w;
      ur += mzy - r;
      if (it >= next_check || it == opts.max_iters) {
        checkpoint(it, Eigen::VectorXd(rho * uw), rho * ur.norm());
        interval = std::min(interval * 2, 128 * opts.check_every);
        next_check = it + interval;
      }
    }
    if (!std::isfinite(res.cert_gap)) {
      const Eigen::VectorXd u_warm = rho * uw;
      res.cert_gap = certify_impl(frame, dec, M, z, y, eta, &u_warm, rho * ur.norm());
    }
  }

  res.z = z;
  res.objective = (frame.omega * z).lpNorm<1>();
  res.feas_residual = feas_of(z);
  res.iters = it;
  res.status = converged ? SolveStatus::Converged : SolveStatus::MaxIters;
  trace(it, res.objective, res.feas_residual, res.cert_gap);
  flush_trace();
  return res;
}

}  // namespace

SolveResult solve_abp(const Frame& frame, const Eigen::MatrixXd& M, const Eigen::VectorXd& y,
                      const SolverOptions& opts) {
  return solve_core(frame, M, y, 0.0, opts);
}

SolveResult solve_abpdn(const Frame& frame, const Eigen::MatrixXd& M, const Eigen::VectorXd& y,
                        double eta, const SolverOptions& opts) {
  return solve_core(frame, M, y, eta, opts);
}

double certify(const Frame& frame, const Eigen::MatrixXd& M, const Eigen::VectorXd& z,
               const Eigen::VectorXd& y, double eta) {
  if (!z.allFinite()) throw InvalidArgument("certify: z must be finite");
  const MeasurementDecomp dec(M);
  return certify_impl(frame, dec, M, z, y, eta, nullptr, 0.0);
}

Eigen::VectorXd oracle_subgradient(const Frame& frame, const Eigen::MatrixXd& M,
                                   const Eigen::VectorXd& y, int iters) {
  if (iters < 1) throw InvalidArgument("oracle_subgradient: need iters >= 1");
  const MeasurementDecomp dec(M);
  Eigen::VectorXd z = dec.least_squares(y);
  if (dec.kernel_trivial()) return z;

  const Eigen::MatrixXd& proj = dec.kernel_projector;
  Eigen::VectorXd best_z = z;
  double best_obj = (frame.omega * z).lpNorm<1>();
  constexpr int kBlock = 500;
  double c = 0.25 * std::max(z.norm(), 1e-6);
  int k_local = 0;

  for (int it = 1; it <= iters; ++it) {
    const Eigen::VectorXd oz = frame.omega * z;
    const double obj = oz.lpNorm<1>();
    if (obj < best_obj) {
      best_obj = obj;
      best_z = z;
    }
    Eigen::VectorXd sg(oz.size());
    for (Eigen::Index i = 0; i < oz.size(); ++i)
      sg[i] = oz[i] > 0.0 ? 1.0 : (oz[i] < 0.0 ? -1.0 : 0.0);
    const Eigen::VectorXd g = proj * (frame.omega.transpose() * sg);
    const double gn = g.norm();
    if (gn <= 1e-14) break;
    ++k_local;
    z -= (c / std::sqrt(static_cast<double>(k_local))) * (g / gn);
    if (it % kBlock == 0) {
      // Geometric restart: resume from the incumbent with a halved step
      // constant and re-project onto the affine constraint set.
      c *= 0.5;
      k_local = 0;
      z = best_z;
      z -= dec.least_squares(M * z - y);
    }
  }
  const double final_obj = (frame.omega * z).lpNorm<1>();
  if (final_obj < best_obj) best_z = z;
  return best_z;
}

}  // namespace cosparse
