#include <doctest.h>

#include <Eigen/Dense>

#include "gsreg/errors.hpp"
#include "gsreg/linalg.hpp"

using namespace gsreg;

TEST_CASE("spd sqrt and inverse square root invert each other") {
  for (int seed = 0; seed < 5; ++seed) {
    const Eigen::MatrixXd a = random_spd(6, 0.2, 4.0, seed);
    const Eigen::MatrixXd r = spd_sqrt(a, "a");
    const Eigen::MatrixXd ri = spd_inv_sqrt(a, "a");
    CHECK((r * r - a).norm() < 1e-10);
    CHECK((r * ri - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-10);
    CHECK((spd_inverse(a, "a") * a - Eigen::MatrixXd::Identity(6, 6)).norm() <
          1e-10);
  }
}

TEST_CASE("spd_log_det matches eigenvalue sum") {
  const Eigen::MatrixXd a = random_spd(5, 0.5, 2.0, 7);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  CHECK(spd_log_det(a, "a") ==
        doctest::Approx(es.eigenvalues().array().log().sum()).epsilon(1e-12));
}

TEST_CASE("require_spd rejects asymmetric and indefinite input") {
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(require_spd(asym, "asym"), NotSpdError);
  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(require_spd(indef, "indef"), NotSpdError);
  CHECK_NOTHROW(require_spd(Eigen::MatrixXd::Identity(3, 3), "id"));
}

TEST_CASE("random_spd spectrum stays inside the requested interval") {
  const Eigen::MatrixXd a = random_spd(8, 0.3, 3.0, 11);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  CHECK(es.eigenvalues().minCoeff() >= 0.3 - 1e-10);
  CHECK(es.eigenvalues().maxCoeff() <= 3.0 + 1e-10);
  CHECK((a - a.transpose()).norm() < 1e-12);
  // deterministic in the seed
  CHECK((a - random_spd(8, 0.3, 3.0, 11)).norm() == 0.0);
}
