#include <doctest.h>

#include <cmath>

#include "gsreg/errors.hpp"
#include "gsreg/linalg.hpp"
#include "gsreg/priors.hpp"
#include "gsreg/rng.hpp"

using namespace gsreg;

TEST_CASE("dimension prior is normalized and geometric in p^{-a}") {
  SpikeSlabSpec spec{20, 2.0, 1.0};
  double total = 0.0;
  for (int s = 0; s <= spec.p; ++s) total += std::exp(dimension_log_prior(s, spec));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dimension_log_prior(3, spec) - dimension_log_prior(2, spec) ==
        doctest::Approx(-2.0 * std::log(20.0)).epsilon(1e-12));
}

TEST_CASE("slab density and joint prior agree") {
  Eigen::VectorXd vals(2);
  vals << 0.7, -1.1;
  const SparseVector theta({0, 3}, vals, 10);
  SpikeSlabSpec spec{10, 2.0, 1.3};
  const double slab = slab_log_density(vals, spec.lambda);
  CHECK(slab == doctest::Approx(2.0 * std::log(1.3 / 2.0) -
                                1.3 * (0.7 + 1.1)).epsilon(1e-12));
  CHECK(joint_log_prior(theta, spec) ==
        doctest::Approx(dimension_log_prior(2, spec) - log_binom(10, 2) + slab)
            .epsilon(1e-12));
}

TEST_CASE("log_binom matches small cases") {
  CHECK(log_binom(6, 2) == doctest::Approx(std::log(15.0)).epsilon(1e-12));
  CHECK(log_binom(5, 0) == doctest::Approx(0.0));
}

TEST_CASE("lambda bounds") {
  const auto [lo, hi] = lambda_bounds(10.0, 20, 100, 2.0, 1.0, 4.0);
  CHECK(lo == doctest::Approx(10.0 / 40.0));
  CHECK(hi == doctest::Approx(4.0));
  CHECK_THROWS_AS(lambda_bounds(10.0, 2, 10000, 1.0, 0.0, 1.0),
                  ParameterRangeError);
}

TEST_CASE("boundary-avoiding alpha prior integrates to one") {
  const AlphaPrior prior(-1.0, 1.0, 1.0, 1.0);
  // trapezoid over a fine interior grid
  const int grid = 20000;
  double total = 0.0;
  for (int k = 0; k < grid; ++k) {
    const double a = -1.0 + 2.0 * (k + 0.5) / grid;
    total += std::exp(prior.log_density(a)) * (2.0 / grid);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  bool out = false;
  CHECK(prior.log_density(1.5, &out) == -std::numeric_limits<double>::infinity());
  CHECK(out);
  Rng rng = make_rng(5);
  for (int k = 0; k < 100; ++k) {
    const double a = prior.sample(rng);
    CHECK(a > -1.0);
    CHECK(a < 1.0);
  }
}

TEST_CASE("inverse gamma density matches the formula") {
  const double shape = 2.5, rate = 1.5, x = 0.8;
  const double expected = shape * std::log(rate) - std::lgamma(shape) -
                          (shape + 1.0) * std::log(x) - rate / x;
  CHECK(inverse_gamma_log_density(x, shape, rate) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("inverse Wishart sampling concentrates near its mean") {
  const int d = 2;
  const Eigen::MatrixXd scale = Eigen::MatrixXd::Identity(d, d);
  const double df = 12.0;
  Rng rng = make_rng(6);
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(d, d);
  const int reps = 4000;
  for (int k = 0; k < reps; ++k)
    mean += inverse_wishart_sample(df, scale, rng) / reps;
  // E = scale / (df - d - 1)
  CHECK((mean - scale / (df - d - 1)).norm() < 0.02);
}

TEST_CASE("graphical prior flags support violations") {
  GraphicalPriorSpec spec;
  spec.truncation = 2.0;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Identity(3, 3);
  omega(0, 1) = omega(1, 0) = 0.3;
  bool out = false;
  CHECK(std::isfinite(graphical_log_prior(omega, spec, &out)));
  CHECK_FALSE(out);
  Eigen::MatrixXd big = 5.0 * Eigen::MatrixXd::Identity(3, 3);
  graphical_log_prior(big, spec, &out);  // spectrum above the truncation
  CHECK(out);
  // denser edge sets cost prior mass at the default hyperparameters
  Eigen::MatrixXd denser = omega;
  denser(1, 2) = denser(2, 1) = 0.3;
  CHECK(graphical_log_prior(denser, spec) < graphical_log_prior(omega, spec));
}

TEST_CASE("nuisance prior density and sampling cover each family") {
  NuisancePriorSpec spec;
  ParamCorrelationParams corr;
  corr.kind = CorrelationKind::AR;
  corr.alpha = 0.2;
  corr.sigma2 = 1.1;
  CHECK(std::isfinite(nuisance_prior_log_density(corr, spec)));
  bool out = false;
  corr.sigma2 = -1.0;
  nuisance_prior_log_density(corr, spec, &out);
  CHECK(out);
  Rng rng = make_rng(8);
  const FamilyParams draw = nuisance_prior_sample(FamilyParams(corr), spec, rng);
  const auto* c = std::get_if<ParamCorrelationParams>(&draw);
  REQUIRE(c != nullptr);
  CHECK(c->sigma2 > 0.0);
  CHECK(std::abs(c->alpha) < 1.0);
}
