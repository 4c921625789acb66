#include <doctest.h>

#include <cmath>

#include "gsreg/families.hpp"
#include "gsreg/linalg.hpp"
#include "gsreg/model.hpp"
#include "gsreg/rng.hpp"

using namespace gsreg;

namespace {

// dense multivariate normal log density, written independently of the library
double dense_mvn_log_density(const Eigen::VectorXd& y, const Eigen::VectorXd& mu,
                             const Eigen::MatrixXd& sigma) {
  const int m = static_cast<int>(y.size());
  const Eigen::MatrixXd inv = sigma.inverse();
  const double quad = (y - mu).dot(inv * (y - mu));
  return -0.5 * (m * std::log(2.0 * M_PI) + std::log(sigma.determinant()) +
                 quad);
}

}  // namespace

TEST_CASE("log likelihood matches a dense evaluator") {
  ParamCorrelationParams fam;
  fam.kind = CorrelationKind::CS;
  fam.alpha = 0.3;
  fam.sigma2 = 1.5;
  Eigen::VectorXd vals(2);
  vals << 1.0, -0.5;
  const SparseVector theta({0, 2}, vals, 4);
  SimulateOptions opts;
  opts.group_size = 3;
  const GroupedDataset data = simulate(fam, theta, 6, 4, 99, opts);
  const NuisanceState eta(fam, data);
  double expected = 0.0;
  for (int i = 0; i < data.n(); ++i)
    expected += dense_mvn_log_density(
        data.group(i).y, data.group(i).x * theta.to_dense() + eta.xi(i),
        eta.delta(i));
  CHECK(log_likelihood(data, theta, eta) ==
        doctest::Approx(expected).epsilon(1e-10));

  const SparseVector zero({}, Eigen::VectorXd(0), 4);
  CHECK(log_likelihood_ratio(data, theta, eta, zero, eta) ==
        doctest::Approx(log_likelihood(data, theta, eta) -
                        log_likelihood(data, zero, eta))
            .epsilon(1e-12));
}

TEST_CASE("whitening reproduces the likelihood quadratic form") {
  MixedEffectsParams fam;
  fam.psi = 0.4 * Eigen::MatrixXd::Identity(2, 2);
  fam.sigma2 = 0.8;
  Eigen::VectorXd vals(1);
  vals << 1.2;
  const SparseVector theta0({1, }, vals, 3);
  SimulateOptions opts;
  opts.group_size = 4;
  const GroupedDataset data = simulate(fam, theta0, 5, 3, 17, opts);
  const NuisanceState eta(fam, data);
  const WhitenedDesign wd = whiten(data, eta, theta0);
  REQUIRE(wd.x_tilde.rows() == data.n_star());
  // ||U||^2 equals the Mahalanobis residual sum
  double quad = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const Eigen::VectorXd r =
        data.group(i).y - data.group(i).x * theta0.to_dense() - eta.xi(i);
    quad += r.dot(eta.delta(i).inverse() * r);
  }
  CHECK(wd.u.squaredNorm() == doctest::Approx(quad).epsilon(1e-10));
  CHECK(wd.u == standardized_residual(data, theta0, eta));
  // whitened block i equals Delta_i^{-1/2} X_i
  const Eigen::MatrixXd b0 = wd.x_tilde.block(wd.offsets[1], 0, 4, 3);
  CHECK((b0 - spd_inv_sqrt(eta.delta(1), "d") * data.group(1).x).norm() <
        1e-10);
}
