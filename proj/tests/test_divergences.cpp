#include <doctest.h>

#include <cmath>

#include "gsreg/divergences.hpp"
#include "gsreg/families.hpp"
#include "gsreg/linalg.hpp"

using namespace gsreg;

TEST_CASE("univariate closed forms") {
  // N(m1, v1) vs N(m2, v2) with hand-computable answers
  const double m1 = 0.3, v1 = 1.2, m2 = -0.4, v2 = 0.7;
  GaussianPair pair(Eigen::VectorXd::Constant(1, m1),
                    Eigen::MatrixXd::Constant(1, 1, v1),
                    Eigen::VectorXd::Constant(1, m2),
                    Eigen::MatrixXd::Constant(1, 1, v2));
  const double kl = 0.5 * (std::log(v2 / v1) + v1 / v2 - 1.0 +
                           (m1 - m2) * (m1 - m2) / v2);
  CHECK(gaussian_kl(pair) == doctest::Approx(kl).epsilon(1e-12));
  const double ratio = v1 / v2;
  const double kv = 0.5 * (ratio * ratio - 2.0 * ratio + 1.0) +
                    v1 * (m1 - m2) * (m1 - m2) / (v2 * v2);
  CHECK(gaussian_kl_variation(pair) == doctest::Approx(kv).epsilon(1e-12));
  const double vb = 0.5 * (v1 + v2);
  const double db = 0.25 * std::log(vb * vb / (v1 * v2)) +
                    0.125 * (m1 - m2) * (m1 - m2) / vb;
  CHECK(bhattacharyya(pair) == doctest::Approx(db).epsilon(1e-12));
}

TEST_CASE("divergences vanish on identical models") {
  const Eigen::MatrixXd s = random_spd(3, 0.5, 2.0, 1);
  const Eigen::VectorXd mu = Eigen::VectorXd::LinSpaced(3, -1.0, 1.0);
  GaussianPair pair(mu, s, mu, s);
  CHECK(gaussian_kl(pair) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(gaussian_kl_variation(pair) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(bhattacharyya(pair) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(affinity_defect(s, s) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(affinity_defect(s, 2.0 * s) > 0.0);
}

TEST_CASE("bhattacharyya is symmetric, kl is not") {
  const Eigen::MatrixXd s1 = random_spd(2, 0.5, 2.0, 2);
  const Eigen::MatrixXd s2 = random_spd(2, 0.5, 2.0, 3);
  const Eigen::VectorXd mu1 = Eigen::VectorXd::Constant(2, 0.5);
  const Eigen::VectorXd mu2 = Eigen::VectorXd::Zero(2);
  GaussianPair fwd(mu1, s1, mu2, s2), bwd(mu2, s2, mu1, s1);
  CHECK(bhattacharyya(fwd) == doctest::Approx(bhattacharyya(bwd)).epsilon(1e-12));
  CHECK(gaussian_kl(fwd) != doctest::Approx(gaussian_kl(bwd)).epsilon(1e-9));
}

TEST_CASE("avg_renyi averages per-group Bhattacharyya distances") {
  ParamCorrelationParams fam;
  fam.kind = CorrelationKind::AR;
  fam.alpha = 0.3;
  Eigen::VectorXd vals(1);
  vals << 0.8;
  const SparseVector theta({0}, vals, 2);
  const SparseVector zero({}, Eigen::VectorXd(0), 2);
  SimulateOptions opts;
  opts.group_size = 2;
  const GroupedDataset data = simulate(fam, theta, 6, 2, 31, opts);
  const NuisanceState eta(fam, data);
  ParamCorrelationParams fam0 = fam;
  fam0.alpha = -0.2;
  const NuisanceState eta0(fam0, data);
  double expected = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    GaussianPair pair(data.group(i).x * theta.to_dense() + eta.xi(i),
                      eta.delta(i), eta0.xi(i), eta0.delta(i));
    expected += bhattacharyya(pair) / data.n();
  }
  CHECK(avg_renyi(data, theta, eta, zero, eta0) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("np_test thresholds the likelihood ratio at zero") {
  ParamCorrelationParams fam;
  fam.kind = CorrelationKind::AR;
  fam.alpha = 0.0;
  Eigen::VectorXd vals(1);
  vals << 3.0;
  const SparseVector theta1({0}, vals, 1);
  const SparseVector theta0({}, Eigen::VectorXd(0), 1);
  // strong signal: data simulated under theta1 should reject theta0
  const GroupedDataset data = simulate(fam, theta1, 50, 1, 77);
  const NuisanceState eta(fam, data);
  CHECK(np_test(data, theta1, eta, theta0, eta));
  const GroupedDataset null_data = simulate(fam, theta0, 50, 1, 78);
  const NuisanceState eta_null(fam, null_data);
  CHECK_FALSE(np_test(null_data, theta1, eta_null, theta0, eta_null));
}

TEST_CASE("pseudo metrics combine mean and covariance gaps") {
  std::vector<Eigen::VectorXd> xi1{Eigen::VectorXd::Zero(2),
                                   Eigen::VectorXd::Zero(2)};
  std::vector<Eigen::VectorXd> xi2{Eigen::VectorXd::Constant(2, 1.0),
                                   Eigen::VectorXd::Zero(2)};
  std::vector<Eigen::MatrixXd> d1{Eigen::MatrixXd::Identity(2, 2),
                                  Eigen::MatrixXd::Identity(2, 2)};
  std::vector<Eigen::MatrixXd> d2{Eigen::MatrixXd::Identity(2, 2),
                                  2.0 * Eigen::MatrixXd::Identity(2, 2)};
  const PseudoMetrics m = pseudo_metrics(NuisanceState::from_moments(xi1, d1),
                                         NuisanceState::from_moments(xi2, d2));
  CHECK(m.d_a == doctest::Approx(std::sqrt(2.0 / 2.0)));
  CHECK(m.d_b == doctest::Approx(std::sqrt(2.0 / 2.0)));
  CHECK(m.d_n == doctest::Approx(std::sqrt(m.d_a * m.d_a + m.d_b * m.d_b)));
}
