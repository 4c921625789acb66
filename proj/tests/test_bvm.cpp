#include <doctest.h>

#include <cmath>

#include "gsreg/bvm.hpp"
#include "gsreg/families.hpp"
#include "gsreg/model.hpp"
#include "gsreg/splines.hpp"

using namespace gsreg;

namespace {

FamilyParams iid_family() {
  ParamCorrelationParams p;
  p.kind = CorrelationKind::AR;
  p.alpha = 0.0;
  p.sigma2 = 1.0;
  return p;
}

}  // namespace

TEST_CASE("gram and center reduce to least squares without a projection") {
  Eigen::VectorXd vals(1);
  vals << 1.0;
  const SparseVector theta0({0}, vals, 3);
  const GroupedDataset data = simulate(iid_family(), theta0, 20, 3, 61);
  const NuisanceState eta(iid_family(), data);
  const WhitenedDesign wd = whiten(data, eta, theta0);
  const Eigen::MatrixXd empty_h;
  Eigen::MatrixXd xs(wd.x_tilde.rows(), 2);
  xs << wd.x_tilde.col(0), wd.x_tilde.col(2);
  const Eigen::MatrixXd g = gram(xs, empty_h);
  CHECK((g - xs.transpose() * xs).norm() < 1e-10);
  const Eigen::VectorXd c =
      ls_center(xs, wd.x_tilde, empty_h, wd.u, theta0.to_dense());
  // with sigma2 = 1 the whitened design is the design itself, so the center
  // is the least squares fit of y on the two columns
  const Eigen::VectorXd ls =
      (xs.transpose() * xs).ldlt().solve(xs.transpose() *
                                         data.stacked_response());
  CHECK((c - ls).norm() < 1e-9);
}

TEST_CASE("mixture weights are normalized and the modal support is truth") {
  Eigen::VectorXd vals(2);
  vals << 2.0, -1.5;
  const SparseVector theta0({1, 3}, vals, 5);
  const GroupedDataset data = simulate(iid_family(), theta0, 200, 5, 62);
  const NuisanceState eta(iid_family(), data);
  SpikeSlabSpec spec{5, 2.0, 2.0};
  ProjectionChoice proj;  // Zero
  const SupportMixture mix = build_bvm(data, theta0, eta, spec, proj, 3);
  double total = 0.0;
  for (double lw : mix.log_weights) total += std::exp(lw);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(mix.supports[mix.modal_component()] == theta0.support());
  CHECK(mix.mode == "oracle");
  // centers on the modal support sit near the truth
  const Eigen::VectorXd center = mix.centers[mix.modal_component()];
  CHECK(std::abs(center(0) - 2.0) < 0.3);
  CHECK(std::abs(center(1) + 1.5) < 0.3);
}

TEST_CASE("log_lambda_star matches its quadratic expansion") {
  Eigen::VectorXd vals(1);
  vals << 0.5;
  const SparseVector theta0({0}, vals, 2);
  const GroupedDataset data = simulate(iid_family(), theta0, 15, 2, 63);
  const NuisanceState eta(iid_family(), data);
  const WhitenedDesign wd = whiten(data, eta, theta0);
  const Eigen::MatrixXd empty_h;
  Eigen::VectorXd theta(2);
  theta << 0.8, -0.2;
  const Eigen::VectorXd d = wd.x_tilde * (theta - theta0.to_dense());
  const double expected = -0.5 * d.squaredNorm() + wd.u.dot(d);
  CHECK(log_lambda_star(theta, theta0.to_dense(), wd.x_tilde, empty_h, wd.u) ==
        doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("nuisance design stacks identity blocks for measurement error") {
  MeasurementErrorParams mem;
  mem.alpha = 0.1;
  mem.beta = Eigen::VectorXd::Constant(2, 1.0);
  mem.mu = Eigen::VectorXd::Zero(2);
  mem.sigma = Eigen::MatrixXd::Identity(2, 2);
  mem.psi = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  const SparseVector theta0({}, Eigen::VectorXd(0), 3);
  const GroupedDataset data = simulate(mem, theta0, 6, 3, 64);
  const NuisanceState eta(mem, data);
  const Eigen::MatrixXd z = nuisance_design(data, eta);
  REQUIRE(z.rows() == data.n_star());
  REQUIRE(z.cols() == 3);  // one indicator column per group row coordinate
  for (int i = 0; i < data.n(); ++i)
    CHECK((z.block(3 * i, 0, 3, 3) - Eigen::MatrixXd::Identity(3, 3)).norm() ==
          0.0);
  // no mean component for plain correlation families
  const GroupedDataset other = simulate(iid_family(), theta0, 5, 3, 65);
  CHECK(nuisance_design(other, NuisanceState(iid_family(), other)).size() == 0);
}

TEST_CASE("partial linear nuisance design evaluates the basis") {
  PartialLinearParams pl{Eigen::VectorXd::Zero(5), 1.0, SplineBasis(5, 3)};
  const SparseVector theta0({}, Eigen::VectorXd(0), 2);
  const GroupedDataset data = simulate(pl, theta0, 7, 2, 66);
  const NuisanceState eta(pl, data);
  const Eigen::MatrixXd z = nuisance_design(data, eta);
  REQUIRE(z.rows() == 7);
  REQUIRE(z.cols() == 5);
  for (int i = 0; i < 7; ++i)
    CHECK((z.row(i).transpose() - pl.basis.eval(*data.group(i).meta.z)).norm() <
          1e-12);
}

TEST_CASE("tv estimate is zero against a matching mixture and bounded") {
  SupportMixture a;
  a.p = 2;
  a.supports = {{}, {0}};
  a.log_weights = {std::log(0.3), std::log(0.7)};
  a.centers = {Eigen::VectorXd(0), Eigen::VectorXd::Constant(1, 1.0)};
  a.covariances = {Eigen::MatrixXd(0, 0), Eigen::MatrixXd::Identity(1, 1)};
  SupportPosterior post;
  post.supports = a.supports;
  post.log_weights = a.log_weights;
  post.means = {std::nullopt, Eigen::VectorXd::Constant(1, 1.0)};
  post.covs = {std::nullopt, Eigen::MatrixXd::Identity(1, 1)};
  post.inclusion_probs = Eigen::VectorXd::Zero(2);
  post.inclusion_probs(0) = 0.7;
  CHECK(tv_support_mixture(post, a) == doctest::Approx(0.0).epsilon(1e-10));
  // shifting the modal center raises the estimate but keeps it in [0, 1]
  post.means[1] = Eigen::VectorXd::Constant(1, 4.0);
  const double tv = tv_support_mixture(post, a);
  CHECK(tv > 0.0);
  CHECK(tv <= 1.0);
}

TEST_CASE("credible intervals are symmetric about the modal center") {
  Eigen::VectorXd vals(1);
  vals << 1.0;
  const SparseVector theta0({2}, vals, 4);
  const GroupedDataset data = simulate(iid_family(), theta0, 150, 4, 67);
  const NuisanceState eta(iid_family(), data);
  SpikeSlabSpec spec{4, 2.0, 1.0};
  ProjectionChoice proj;
  const SupportMixture mix = build_bvm(data, theta0, eta, spec, proj, 2);
  const auto cis = credible_intervals(mix, 0.95);
  REQUIRE(cis.size() == mix.supports[mix.modal_component()].size());
  const Eigen::VectorXd center = mix.centers[mix.modal_component()];
  const Eigen::MatrixXd cov = mix.covariances[mix.modal_component()];
  for (std::size_t k = 0; k < cis.size(); ++k) {
    CHECK(cis[k].upper - center(static_cast<int>(k)) ==
          doctest::Approx(center(static_cast<int>(k)) - cis[k].lower)
              .epsilon(1e-10));
    // half width = z_{0.975} * sd
    CHECK((cis[k].upper - cis[k].lower) / 2.0 ==
          doctest::Approx(1.959963984540054 *
                          std::sqrt(cov(static_cast<int>(k),
                                        static_cast<int>(k))))
              .epsilon(1e-9));
  }
  // wider level, wider interval
  const auto wide = credible_intervals(mix, 0.99);
  CHECK(wide[0].upper - wide[0].lower > cis[0].upper - cis[0].lower);
}
