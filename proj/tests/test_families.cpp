#include <doctest.h>

#include "gsreg/errors.hpp"
#include "gsreg/families.hpp"
#include "gsreg/linalg.hpp"

using namespace gsreg;

TEST_CASE("correlation matrices have the advertised entries") {
  const Eigen::MatrixXd cs = correlation_matrix(CorrelationKind::CS, 0.4, 3);
  CHECK(cs(0, 0) == 1.0);
  CHECK(cs(0, 2) == 0.4);
  const Eigen::MatrixXd ar = correlation_matrix(CorrelationKind::AR, -0.5, 4);
  CHECK(ar(0, 3) == doctest::Approx(-0.125));
  CHECK(ar(1, 2) == -0.5);
  const Eigen::MatrixXd ma = correlation_matrix(CorrelationKind::MA, 0.3, 4);
  CHECK(ma(0, 1) == 0.3);
  CHECK(ma(0, 2) == 0.0);
  CHECK_THROWS_AS(correlation_matrix(CorrelationKind::CS, 1.0, 3),
                  ParameterRangeError);
  CHECK_THROWS_AS(correlation_matrix(CorrelationKind::MA, 0.5, 3),
                  ParameterRangeError);
}

TEST_CASE("compound symmetry bounds are attained") {
  const int m = 5;
  const double alpha = 0.35;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      correlation_matrix(CorrelationKind::CS, alpha, m));
  const auto [lo, hi] = correlation_eigen_bounds(CorrelationKind::CS, alpha, m);
  CHECK(es.eigenvalues().minCoeff() == doctest::Approx(lo).epsilon(1e-12));
  CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(hi).epsilon(1e-12));
}

TEST_CASE("missing covariance picks the principal submatrix") {
  const Eigen::MatrixXd sigma = random_spd(4, 0.5, 2.0, 5);
  Eigen::VectorXi pattern(4);
  pattern << 1, 0, 1, 0;
  const Eigen::MatrixXd sub = missing_covariance(sigma, pattern);
  REQUIRE(sub.rows() == 2);
  CHECK(sub(0, 1) == sigma(0, 2));
  CHECK(sub(1, 1) == sigma(2, 2));
  CHECK_THROWS(missing_covariance(sigma, Eigen::VectorXi::Zero(4)));
}

TEST_CASE("measurement error group moments") {
  MeasurementErrorParams mem;
  mem.alpha = 0.5;
  mem.beta = Eigen::VectorXd::Constant(2, 2.0);
  mem.mu = Eigen::VectorXd::Constant(2, -1.0);
  mem.sigma2 = 0.7;
  mem.sigma = random_spd(2, 0.5, 1.5, 3);
  mem.psi = random_spd(2, 0.5, 1.5, 4);
  const Eigen::VectorXd x_star = Eigen::VectorXd::LinSpaced(3, 0.0, 1.0);
  const MemGroup g = mem_assemble(mem, x_star);
  CHECK(g.xi(0) == doctest::Approx(mem.alpha + mem.mu.dot(mem.beta)));
  CHECK(g.xi(1) == mem.mu(0));
  CHECK(g.delta(0, 0) ==
        doctest::Approx(mem.beta.dot(mem.sigma * mem.beta) + mem.sigma2));
  CHECK((g.delta.block(1, 1, 2, 2) - mem.sigma - mem.psi).norm() < 1e-12);
  CHECK((g.delta.block(1, 0, 2, 1) - mem.sigma * mem.beta).norm() < 1e-12);
  CHECK(g.x.rows() == 3);
  CHECK(g.x.row(0) == x_star.transpose());
  CHECK(g.x.bottomRows(2).norm() == 0.0);
  require_spd(g.delta, "mem delta");
}

TEST_CASE("validate_family rejects bad parameters") {
  ParamCorrelationParams corr;
  corr.kind = CorrelationKind::CS;
  corr.alpha = -0.1;
  CHECK_THROWS_AS(validate_family(FamilyParams(corr)), ParameterRangeError);
  corr.alpha = 0.2;
  corr.sigma2 = -1.0;
  CHECK_THROWS_AS(validate_family(FamilyParams(corr)), ParameterRangeError);
  MixedEffectsParams me;
  me.psi = -Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(validate_family(FamilyParams(me)), NotSpdError);
}

TEST_CASE("simulation is deterministic and shaped by the family") {
  MissingResponseParams fam;
  fam.sigma = random_spd(3, 0.5, 2.0, 9);
  const SparseVector theta({}, Eigen::VectorXd(0), 2);
  const GroupedDataset a = simulate(fam, theta, 10, 2, 123);
  const GroupedDataset b = simulate(fam, theta, 10, 2, 123);
  REQUIRE(a.n() == 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(a.group(i).y == b.group(i).y);
    REQUIRE(a.group(i).meta.pattern.has_value());
    CHECK(a.group(i).y.size() == a.group(i).meta.pattern->sum());
  }
  CHECK(simulate(fam, theta, 10, 2, 124).group(0).y != a.group(0).y);
}

TEST_CASE("design normalization fixes the max column norm") {
  ParamCorrelationParams fam;
  fam.kind = CorrelationKind::AR;
  fam.alpha = 0.0;
  const SparseVector theta({}, Eigen::VectorXd(0), 5);
  const GroupedDataset data = simulate(fam, theta, 50, 5, 7);
  const Eigen::MatrixXd x = data.stacked_design();
  double max_norm = 0.0;
  for (int j = 0; j < 5; ++j) max_norm = std::max(max_norm, x.col(j).norm());
  CHECK(max_norm == doctest::Approx(std::sqrt(50.0)).epsilon(1e-12));
}

TEST_CASE("spline families evaluate their moment maps") {
  const SplineBasis basis(6, 3);
  HeteroSplineParams hs{Eigen::VectorXd::LinSpaced(6, 0.5, 1.5), basis};
  const SparseVector theta({}, Eigen::VectorXd(0), 2);
  const GroupedDataset data = simulate(hs, theta, 8, 2, 21);
  const NuisanceState eta(hs, data);
  for (int i = 0; i < data.n(); ++i) {
    REQUIRE(data.group(i).meta.z.has_value());
    CHECK(*data.group(i).meta.z == doctest::Approx((i + 0.5) / 8.0));
    CHECK(eta.delta(i)(0, 0) ==
          doctest::Approx(hetero_variance(hs.beta, basis, *data.group(i).meta.z)));
    CHECK(eta.xi(i)(0) == 0.0);
  }
  PartialLinearParams pl{Eigen::VectorXd::LinSpaced(6, -1.0, 1.0), 0.9, basis};
  const GroupedDataset data2 = simulate(pl, theta, 8, 2, 22);
  const NuisanceState eta2(pl, data2);
  CHECK(eta2.xi(3)(0) ==
        doctest::Approx(partial_linear_mean(pl.beta, basis,
                                            *data2.group(3).meta.z)));
  CHECK(eta2.delta(3)(0, 0) == 0.9);
}
