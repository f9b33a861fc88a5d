#include <cmath>

#include <doctest.h>

#include "cosparse/errors.hpp"
#include "cosparse/frame.hpp"
#include "cosparse/model.hpp"
#include "cosparse/rng.hpp"

using cosparse::Frame;

TEST_SUITE("model") {
  TEST_CASE("cosparsity counts annihilated rows") {
    Frame id = cosparse::make_frame(Eigen::MatrixXd::Identity(3, 3));
    Eigen::VectorXd x(3);
    x << 0.0, 2.0, 0.0;
    const auto r = cosparse::cosparsity(id, x, 1e-12);
    CHECK(r.l == 2);
    REQUIRE(r.cosupport.size() == 2);
    CHECK(r.cosupport[0] == 0);
    CHECK(r.cosupport[1] == 2);
  }

  TEST_CASE("synth_cosparse meets its contract") {
    Frame f = cosparse::tight_frame(20, 12, cosparse::rng::Stream(3));
    const auto sig = cosparse::synth_cosparse(f, 8, cosparse::rng::Stream(4));
    CHECK(sig.cosparsity == 8);
    REQUIRE(static_cast<int>(sig.cosupport.size()) == 8);
    CHECK(std::abs(sig.x.norm() - 1.0) <= 1e-12);
    for (int i : sig.cosupport) CHECK(std::abs(f.omega.row(i).dot(sig.x)) <= 1e-9);
    // Generic draw: no accidental extra zero rows.
    const auto recount = cosparse::cosparsity(f, sig.x, 1e-8);
    CHECK(recount.l == 8);
    CHECK(recount.cosupport == sig.cosupport);
    // Deterministic in the stream.
    const auto again = cosparse::synth_cosparse(f, 8, cosparse::rng::Stream(4));
    CHECK(again.x == sig.x);
  }

  TEST_CASE("cosparsity d and above is impossible for a generic frame") {
    Frame f = cosparse::tight_frame(20, 12, cosparse::rng::Stream(3));
    CHECK_THROWS_AS(cosparse::synth_cosparse(f, 12, cosparse::rng::Stream(4)),
                    cosparse::EmptyKernel);
  }

  TEST_CASE("sigma_s sums the smallest magnitudes") {
    Eigen::VectorXd v(4);
    v << 3.0, -1.0, 2.0, 0.5;
    CHECK(cosparse::sigma_s(v, 2) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(cosparse::sigma_s(v, 0) == doctest::Approx(6.5).epsilon(1e-12));
    CHECK(cosparse::sigma_s(v, 4) == 0.0);
    CHECK_THROWS_AS(cosparse::sigma_s(v, 9), cosparse::InvalidArgument);
  }

  TEST_CASE("gaussian_instance embeds the truth and calibrates the noise") {
    Frame f = cosparse::tight_frame(15, 10, cosparse::rng::Stream(6));
    const auto sig = cosparse::synth_cosparse(f, 7, cosparse::rng::Stream(7));

    const auto clean = cosparse::gaussian_instance(f, sig, 8, 0.0, cosparse::rng::Stream(9));
    REQUIRE(clean.M.rows() == 8);
    REQUIRE(clean.M.cols() == 10);
    CHECK(clean.eta == 0.0);
    CHECK((clean.y - clean.M * sig.x).norm() == 0.0);
    REQUIRE(clean.truth.has_value());
    CHECK(clean.truth->x == sig.x);

    const auto noisy = cosparse::gaussian_instance(f, sig, 8, 0.5, cosparse::rng::Stream(9));
    CHECK(std::abs((noisy.y - noisy.M * sig.x).norm() - 0.5) <= 1e-12);
    // Same stream, same measurement matrix; only the noise differs.
    CHECK(noisy.M == clean.M);
  }

  TEST_CASE("measurement entries look standard normal") {
    cosparse::rng::Stream s(31);
    const Eigen::MatrixXd M = cosparse::rng::gaussian_matrix(s, 250, 400);
    const double n = static_cast<double>(M.size());
    const double mean = M.mean();
    const double var = (M.array() - mean).square().sum() / n;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(n));
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
  }
}
