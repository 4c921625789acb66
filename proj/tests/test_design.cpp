#include <doctest.h>

#include <cmath>

#include "gsreg/design.hpp"

using namespace gsreg;

TEST_CASE("x_norm_star is the max column norm") {
  Eigen::MatrixXd x(3, 2);
  x << 3.0, 1.0, 4.0, 0.0, 0.0, 1.0;
  CHECK(x_norm_star(x) == doctest::Approx(5.0));
}

TEST_CASE("orthogonal design has unit compatibility numbers") {
  const Eigen::MatrixXd x = 2.0 * Eigen::MatrixXd::Identity(4, 4);
  for (int s : {1, 2}) {
    CHECK(phi2(x, s) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(phi1(x, s) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("duplicated column drives phi to zero at s = 2") {
  Eigen::MatrixXd x(4, 3);
  x.col(0) = Eigen::VectorXd::LinSpaced(4, 1.0, 4.0);
  x.col(1) = x.col(0);
  x.col(2) = Eigen::VectorXd::Unit(4, 0);
  CHECK(phi2(x, 2) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(phi1(x, 2) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(phi2(x, 1) > 0.0);
}

TEST_CASE("phi1 dominates phi2 and both shrink with s") {
  Eigen::MatrixXd x(6, 4);
  int k = 1;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 4; ++j) x(i, j) = std::sin(1.7 * k++);
  double prev1 = 1e300, prev2 = 1e300;
  for (int s : {1, 2, 3}) {
    const double p1 = phi1(x, s), p2 = phi2(x, s);
    CHECK(p1 >= p2 - 1e-12);
    CHECK(p1 <= prev1 + 1e-12);
    CHECK(p2 <= prev2 + 1e-12);
    prev1 = p1;
    prev2 = p2;
  }
}

TEST_CASE("phi1 closed-form inner minimum beats naive vertex guesses") {
  // two correlated columns: the l1-sphere minimum lies strictly inside an edge
  Eigen::MatrixXd x(2, 2);
  x << 1.0, 0.9, 0.0, std::sqrt(1.0 - 0.81);
  const double p1 = phi1(x, 2);
  // grid oracle over u = (t, -(1-t)) and (t, 1-t)
  double best = 1e300;
  for (int g = 0; g <= 100000; ++g) {
    const double t = g / 100000.0;
    for (double sg : {1.0, -1.0})
      best = std::min(best,
                      (t * x.col(0) + sg * (1.0 - t) * x.col(1)).squaredNorm());
  }
  CHECK(p1 ==
        doctest::Approx(std::sqrt(2.0 * best) / x_norm_star(x)).epsilon(1e-6));
}

TEST_CASE("joint singular value accounts for the nuisance block") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(4, 2);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(4, 1);
  z(3, 0) = 2.0;
  CHECK(joint_min_singular(x, z, 1) == doctest::Approx(1.0).epsilon(1e-12));
  // nuisance column collinear with x kills the joint spectrum
  Eigen::MatrixXd z2 = x.col(0);
  CHECK(joint_min_singular(x, z2, 1) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("beta_min_threshold flags a degenerate design") {
  Eigen::MatrixXd x(4, 3);
  x.col(0) = Eigen::VectorXd::LinSpaced(4, 1.0, 4.0);
  x.col(1) = Eigen::VectorXd::Zero(4);  // dead predictor, phi2 exactly zero
  x.col(2) = Eigen::VectorXd::Unit(4, 1);
  bool zero = false;
  const double t = beta_min_threshold(x, 1, 1.0, 1.0, &zero);
  CHECK(zero);
  CHECK(std::isinf(t));
}

TEST_CASE("diagnostics report uses the randomized tag over budget") {
  Eigen::MatrixXd x(10, 30);
  int k = 1;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 30; ++j) x(i, j) = std::cos(0.37 * k++);
  SupportScanOptions opts;
  opts.budget = 100;  // force the fallback at s = 2
  opts.randomized_fallback = true;
  opts.sample_size = 500;
  opts.seed = 3;
  const DiagnosticsReport rep = diagnostics(x, 2, 1.0, 1.0, opts);
  CHECK(rep.method == "randomized-lower-bound");
  CHECK(rep.phi2.at(1) > 0.0);
  // exact within budget keeps the exact tag
  SupportScanOptions exact_opts;
  const DiagnosticsReport rep2 =
      diagnostics(x.leftCols(4), 2, 1.0, 1.0, exact_opts);
  CHECK(rep2.method == "exact");
  CHECK(rep2.beta_min.has_value());
}
