#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <doctest.h>

#include "cosparse/errors.hpp"
#include "cosparse/io.hpp"
#include "cosparse/rng.hpp"

namespace {

std::string scratch_path(const std::string& name) {
  return std::string("rng_io_scratch_") + name;
}

}  // namespace

TEST_SUITE("rng") {
  TEST_CASE("same seed gives the same sequence") {
    cosparse::rng::Stream a(12345), b(12345);
    for (int i = 0; i < 200; ++i) CHECK(a.next_u64() == b.next_u64());
    for (int i = 0; i < 200; ++i) CHECK(a.gaussian() == b.gaussian());
    for (int i = 0; i < 200; ++i) CHECK(a.uniform() == b.uniform());
  }

  TEST_CASE("different seeds diverge") {
    cosparse::rng::Stream a(1), b(2);
    int equal = 0;
    for (int i = 0; i < 64; ++i) equal += a.next_u64() == b.next_u64();
    CHECK(equal == 0);
  }

  TEST_CASE("uniform stays in [0, 1) with the right mean") {
    cosparse::rng::Stream s(7);
    const int n = 20000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = s.uniform();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      sum += u;
    }
    // stderr of the mean is 1/sqrt(12 n)
    CHECK(std::abs(sum / n - 0.5) < 4.0 / std::sqrt(12.0 * n));
  }

  TEST_CASE("uniform_index respects its range") {
    cosparse::rng::Stream s(3);
    std::vector<int> seen(7, 0);
    for (int i = 0; i < 7000; ++i) {
      const auto k = s.uniform_index(7);
      REQUIRE(k < 7);
      ++seen[static_cast<int>(k)];
    }
    for (int c : seen) CHECK(c > 700);  // each bucket near 1000
    for (int i = 0; i < 10; ++i) CHECK(s.uniform_index(1) == 0);
    CHECK_THROWS_AS(s.uniform_index(0), cosparse::InvalidArgument);
  }

  TEST_CASE("gaussian moments") {
    cosparse::rng::Stream s(99);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = s.gaussian();
      sum += g;
      sumsq += g * g;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
  }

  TEST_CASE("child streams are addressable and order-sensitive") {
    cosparse::rng::Stream root(42);
    cosparse::rng::Stream c1 = root.child(5);
    cosparse::rng::Stream c2 = root.child(5);
    CHECK(c1.key() == c2.key());
    for (int i = 0; i < 50; ++i) CHECK(c1.next_u64() == c2.next_u64());

    cosparse::rng::Stream a = root.child(1, 2);
    cosparse::rng::Stream b = root.child(2, 1);
    CHECK(a.key() != b.key());
    CHECK(a.next_u64() != b.next_u64());

    // Sibling child keys differ from each other and from the parent.
    CHECK(root.child(0).key() != root.child(1).key());
    CHECK(root.child(0).key() != root.key());

    // Brace and variadic spellings agree.
    CHECK(root.child({3, 4, 5}).key() == root.child(3, 4, 5).key());
  }

  TEST_CASE("gaussian_matrix fills row-major in draw order") {
    cosparse::rng::Stream s1(11), s2(11);
    const Eigen::MatrixXd m = cosparse::rng::gaussian_matrix(s1, 2, 3);
    const Eigen::VectorXd v = cosparse::rng::gaussian_vector(s2, 6);
    int k = 0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) CHECK(m(i, j) == v[k++]);
  }

  TEST_CASE("sphere_vector is unit norm and deterministic") {
    cosparse::rng::Stream s1(4), s2(4);
    const Eigen::VectorXd a = cosparse::rng::sphere_vector(s1, 9);
    const Eigen::VectorXd b = cosparse::rng::sphere_vector(s2, 9);
    REQUIRE(a.size() == 9);
    CHECK(std::abs(a.norm() - 1.0) < 1e-12);
    CHECK(a == b);
  }
}

TEST_SUITE("io") {
  TEST_CASE("matrix CSV round-trips exactly") {
    Eigen::MatrixXd m(3, 4);
    cosparse::rng::Stream s(17);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) = s.gaussian() * std::pow(10.0, j - 2);
    m(0, 0) = 1.0 / 3.0;
    m(1, 1) = -1e-300;
    m(2, 2) = 12345678.987654321;
    const std::string path = scratch_path("mat.csv");
    cosparse::io::write_matrix_csv(path, m);
    const Eigen::MatrixXd r = cosparse::io::read_matrix_csv(path);
    REQUIRE(r.rows() == 3);
    REQUIRE(r.cols() == 4);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) CHECK(r(i, j) == m(i, j));
    std::remove(path.c_str());
  }

  TEST_CASE("vector CSV round-trips and accepts a single row") {
    Eigen::VectorXd v(5);
    v << 1.5, -2.25, 0.0, 3e-7, 8.0;
    const std::string path = scratch_path("vec.csv");
    cosparse::io::write_vector_csv(path, v);
    const Eigen::VectorXd r = cosparse::io::read_vector_csv(path);
    REQUIRE(r.size() == 5);
    CHECK(r == v);

    // A one-line CSV reads back as a row vector.
    cosparse::io::write_text_file(path, "1,2,3\n");
    const Eigen::VectorXd row = cosparse::io::read_vector_csv(path);
    REQUIRE(row.size() == 3);
    CHECK(row[2] == 3.0);

    // A genuinely 2-D matrix is not a vector.
    cosparse::io::write_text_file(path, "1,2\n3,4\n");
    CHECK_THROWS_AS(cosparse::io::read_vector_csv(path), cosparse::IoError);
    std::remove(path.c_str());
  }

  TEST_CASE("format_double round-trips through parsing") {
    const double values[] = {0.0,   1.0,       -1.0,   1.0 / 3.0, 3.141592653589793,
                             1e300, -2.5e-308, 1e-17, 123456789.123456789};
    for (double x : values) CHECK(std::stod(cosparse::io::format_double(x)) == x);
  }

  TEST_CASE("malformed CSVs raise IoError") {
    const std::string path = scratch_path("bad.csv");
    cosparse::io::write_text_file(path, "1,2\n3\n");
    CHECK_THROWS_AS(cosparse::io::read_matrix_csv(path), cosparse::IoError);
    cosparse::io::write_text_file(path, "1,fish\n");
    CHECK_THROWS_AS(cosparse::io::read_matrix_csv(path), cosparse::IoError);
    cosparse::io::write_text_file(path, "");
    CHECK_THROWS_AS(cosparse::io::read_matrix_csv(path), cosparse::IoError);
    std::remove(path.c_str());
    CHECK_THROWS_AS(cosparse::io::read_matrix_csv("no_such_file_here.csv"), cosparse::IoError);
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = 1.0;
    CHECK_THROWS_AS(cosparse::io::write_matrix_csv("no_such_dir_xyz/m.csv", m),
                    cosparse::IoError);
  }

  TEST_CASE("table CSV writes header plus rows verbatim") {
    const std::string path = scratch_path("table.csv");
    cosparse::io::write_table_csv(path, {"a", "b"}, {{"1", "2"}, {"3", "4"}});
    CHECK(cosparse::io::read_text_file(path) == "a,b\n1,2\n3,4\n");
    CHECK_THROWS_AS(cosparse::io::write_table_csv(path, {"a", "b"}, {{"1"}}),
                    cosparse::IoError);
    std::remove(path.c_str());
  }

  TEST_CASE("text file round-trip") {
    const std::string path = scratch_path("text.txt");
    const std::string body = "line one\nline two\n";
    cosparse::io::write_text_file(path, body);
    CHECK(cosparse::io::read_text_file(path) == body);
    std::remove(path.c_str());
  }
}
