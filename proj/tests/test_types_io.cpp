#include <doctest.h>

#include <cstdio>
#include <random>

#include "gsreg/errors.hpp"
#include "gsreg/families.hpp"
#include "gsreg/io.hpp"
#include "gsreg/types.hpp"

using namespace gsreg;

TEST_CASE("sparse vector canonical form") {
  Eigen::VectorXd vals(3);
  vals << 2.0, 0.0, -1.0;
  const SparseVector v({4, 1, 2}, vals, 6);
  CHECK(v.support() == std::vector<int>{2, 4});  // zero dropped, sorted
  CHECK(v.to_dense()(4) == 2.0);
  CHECK(v.to_dense()(2) == -1.0);
  CHECK(v.size() == 2);
  CHECK(SparseVector::from_dense(v.to_dense()) == v);
  CHECK_THROWS_AS(SparseVector({6}, Eigen::VectorXd::Ones(1), 6),
                  std::invalid_argument);
}

TEST_CASE("dataset stacking") {
  std::vector<Group> groups;
  Eigen::VectorXd y1(2);
  y1 << 1.0, 2.0;
  groups.push_back({y1, Eigen::MatrixXd::Ones(2, 3), {}});
  groups.push_back({Eigen::VectorXd::Constant(1, 5.0),
                    2.0 * Eigen::MatrixXd::Ones(1, 3), {}});
  const GroupedDataset data(groups, 3);
  CHECK(data.n_star() == 3);
  CHECK(data.stacked_response()(2) == 5.0);
  CHECK(data.stacked_design()(2, 0) == 2.0);
}

namespace {

GroupedDataset awkward_dataset() {
  // doubles that expose lossy formatting
  std::mt19937_64 rng(3);
  std::normal_distribution<double> norm;
  std::vector<Group> groups;
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd y(2);
    y << norm(rng) * 1e-17, norm(rng) * 1e13;
    Eigen::MatrixXd x(2, 2);
    x << norm(rng), 0.1, 1.0 / 3.0, norm(rng);
    GroupMeta meta;
    if (i == 0) meta.z = 0.123456789012345678;
    if (i == 1) meta.pattern = Eigen::VectorXi::Ones(2);
    if (i == 2) meta.random_design = x;
    groups.push_back({y, x, meta});
  }
  return GroupedDataset(groups, 2);
}

}  // namespace

TEST_CASE("dataset serialization round trips bit-exactly") {
  const GroupedDataset data = awkward_dataset();
  const GroupedDataset back = dataset_from_json(dataset_to_json(data));
  REQUIRE(back.n() == data.n());
  for (int i = 0; i < data.n(); ++i) {
    CHECK(back.group(i).y == data.group(i).y);  // exact, not approximate
    CHECK(back.group(i).x == data.group(i).x);
    CHECK(back.group(i).meta.z == data.group(i).meta.z);
  }
  // through a file as well
  const std::string path = "round_trip_test.json";
  save_dataset(path, data);
  const GroupedDataset loaded = load_dataset(path);
  CHECK(loaded.stacked_response() == data.stacked_response());
  CHECK(loaded.stacked_design() == data.stacked_design());
  std::remove(path.c_str());
}

TEST_CASE("family serialization round trips") {
  MeasurementErrorParams mem;
  mem.alpha = 0.3;
  mem.beta = Eigen::VectorXd::Constant(2, 1.5);
  mem.mu = Eigen::VectorXd::Zero(2);
  mem.sigma = Eigen::MatrixXd::Identity(2, 2);
  mem.psi = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  const FamilyParams back = family_from_json(family_to_json(mem));
  const auto* m = std::get_if<MeasurementErrorParams>(&back);
  REQUIRE(m != nullptr);
  CHECK(m->alpha == mem.alpha);
  CHECK(m->beta == mem.beta);
  CHECK(m->psi == mem.psi);

  ParamCorrelationParams corr;
  corr.kind = CorrelationKind::MA;
  corr.alpha = 0.25;
  const FamilyParams corr_back = family_from_json(family_to_json(corr));
  const auto* c = std::get_if<ParamCorrelationParams>(&corr_back);
  REQUIRE(c != nullptr);
  CHECK(c->kind == CorrelationKind::MA);
  CHECK(c->alpha == 0.25);
}

TEST_CASE("unknown keys are rejected") {
  Json j = {{"p", 2}, {"n", 1}, {"groups", Json::array()}, {"bogus", 1}};
  CHECK_THROWS_WITH_AS(dataset_from_json(j), "dataset: unknown key 'bogus'",
                       std::invalid_argument);
}

TEST_CASE("sparse vector and mixture json") {
  Eigen::VectorXd vals(1);
  vals << -0.75;
  const SparseVector v({3}, vals, 5);
  CHECK(sparse_vector_from_json(sparse_vector_to_json(v)) == v);

  SupportMixture mix;
  mix.p = 3;
  mix.mode = "oracle";
  mix.supports = {{}, {0, 2}};
  mix.log_weights = {-0.5, -0.9};
  mix.centers = {Eigen::VectorXd(0), Eigen::VectorXd::Constant(2, 1.25)};
  mix.covariances = {Eigen::MatrixXd(0, 0), Eigen::MatrixXd::Identity(2, 2)};
  const SupportMixture back = mixture_from_json(mixture_to_json(mix));
  CHECK(back.supports == mix.supports);
  CHECK(back.log_weights == mix.log_weights);
  CHECK(back.centers[1] == mix.centers[1]);
  CHECK(back.mode == "oracle");
}
