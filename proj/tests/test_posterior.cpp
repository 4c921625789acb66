#include <doctest.h>

#include <cmath>
#include <map>

#include "gsreg/errors.hpp"
#include "gsreg/families.hpp"
#include "gsreg/model.hpp"
#include "gsreg/posterior.hpp"
#include "gsreg/priors.hpp"

using namespace gsreg;

namespace {

FamilyParams iid_family(double sigma2 = 1.0) {
  ParamCorrelationParams p;
  p.kind = CorrelationKind::AR;
  p.alpha = 0.0;
  p.sigma2 = sigma2;
  return p;
}

GroupedDataset small_data(int n, int p, std::uint64_t seed) {
  Eigen::VectorXd vals(1);
  vals << 1.0;
  return simulate(iid_family(), SparseVector({0}, vals, p), n, p, seed);
}

}  // namespace

TEST_CASE("normal slab enumeration matches a direct computation") {
  const int p = 3, n = 12;
  const GroupedDataset data = small_data(n, p, 41);
  const NuisanceState eta(iid_family(), data);
  SpikeSlabSpec spec{p, 2.0, 1.0};
  EnumerationOptions opts;
  opts.slab_precision = 0.5;
  const SupportPosterior post =
      enumerate_posterior_normal_slab(data, spec, eta, p, opts);

  // independent route: dense marginal likelihood per support
  const Eigen::MatrixXd x = data.stacked_design();
  const Eigen::VectorXd y = data.stacked_response();
  std::vector<std::vector<int>> supports{{}, {0}, {1}, {2}, {0, 1}, {0, 2},
                                         {1, 2}, {0, 1, 2}};
  std::vector<double> logw;
  for (const auto& s : supports) {
    const int k = static_cast<int>(s.size());
    double lm = -0.5 * y.squaredNorm();
    if (k > 0) {
      Eigen::MatrixXd xs(n, k);
      for (int c = 0; c < k; ++c) xs.col(c) = x.col(s[c]);
      // integral of N(y; Xs t, I) N(t; 0, kappa^{-1} I) dt
      const Eigen::MatrixXd m =
          Eigen::MatrixXd::Identity(n, n) +
          xs * xs.transpose() / opts.slab_precision;
      lm = -0.5 * std::log(m.determinant()) - 0.5 * y.dot(m.inverse() * y);
    }
    logw.push_back(lm + dimension_log_prior(k, spec) - log_binom(p, k));
  }
  double mx = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  for (double v : logw) total += std::exp(v - mx);
  for (std::size_t k = 0; k < supports.size(); ++k) {
    const double expected = std::exp(logw[k] - mx) / total;
    CHECK(post.weight_of(supports[k]) ==
          doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("laplace quadrature matches a fine 1d oracle") {
  const int p = 2, n = 15;
  const GroupedDataset data = small_data(n, p, 43);
  const NuisanceState eta(iid_family(), data);
  SpikeSlabSpec spec{p, 2.0, 1.5};
  const SupportPosterior post =
      enumerate_posterior_laplace_slab(data, spec, eta, 1);

  const Eigen::MatrixXd x = data.stacked_design();
  const Eigen::VectorXd y = data.stacked_response();
  std::vector<double> logw{-0.5 * y.squaredNorm() +
                           dimension_log_prior(0, spec)};
  std::vector<double> means{0.0};
  for (int j = 0; j < p; ++j) {
    // midpoint rule on a wide grid, independent of the panel construction
    const double g = x.col(j).squaredNorm();
    const double center = x.col(j).dot(y) / g;
    const double half = 10.0 / std::sqrt(g);
    const int grid = 400000;
    double total = 0.0, m1 = 0.0, mx = -1e300;
    std::vector<double> vals(grid);
    for (int k = 0; k < grid; ++k) {
      const double t = center - half + 2.0 * half * (k + 0.5) / grid;
      vals[k] = -0.5 * (y - x.col(j) * t).squaredNorm() -
                spec.lambda * std::abs(t);
      mx = std::max(mx, vals[k]);
    }
    for (int k = 0; k < grid; ++k) {
      const double t = center - half + 2.0 * half * (k + 0.5) / grid;
      const double w = std::exp(vals[k] - mx);
      total += w;
      m1 += w * t;
    }
    m1 /= total;
    const double log_int = mx + std::log(total * 2.0 * half / grid);
    logw.push_back(log_int + std::log(spec.lambda / 2.0) +
                   dimension_log_prior(1, spec) - log_binom(p, 1));
    means.push_back(m1);
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double z = 0.0;
  for (double v : logw) z += std::exp(v - top);
  CHECK(post.weight_of({}) == doctest::Approx(std::exp(logw[0] - top) / z)
                                  .epsilon(1e-6));
  for (int j = 0; j < p; ++j) {
    CHECK(post.weight_of({j}) ==
          doctest::Approx(std::exp(logw[j + 1] - top) / z).epsilon(1e-6));
    const std::vector<int> s{j};
    for (std::size_t k = 0; k < post.supports.size(); ++k)
      if (post.supports[k] == s)
        CHECK((*post.means[k])(0) == doctest::Approx(means[j + 1]).epsilon(1e-6));
  }
}

TEST_CASE("laplace enumeration rejects quadrature above dimension three") {
  const GroupedDataset data = small_data(10, 5, 44);
  const NuisanceState eta(iid_family(), data);
  SpikeSlabSpec spec{5, 2.0, 1.0};
  CHECK_THROWS_AS(enumerate_posterior_laplace_slab(data, spec, eta, 4),
                  ParameterRangeError);
}

TEST_CASE("enumeration budget is enforced") {
  const GroupedDataset data = small_data(10, 8, 45);
  const NuisanceState eta(iid_family(), data);
  SpikeSlabSpec spec{8, 2.0, 1.0};
  EnumerationOptions opts;
  opts.budget = 5;
  CHECK_THROWS_AS(enumerate_posterior_normal_slab(data, spec, eta, 3, opts),
                  BudgetError);
}

TEST_CASE("prior-only chain reproduces the dimension prior") {
  const int p = 5;
  const GroupedDataset data = small_data(10, p, 46);
  SpikeSlabSpec spec{p, 2.0, 1.0};
  McmcState init;
  init.theta = SparseVector({}, Eigen::VectorXd(0), p);
  init.eta = iid_family();
  McmcOptions opts;
  opts.n_iter = 200000;
  opts.thin = 2;
  opts.likelihood_off = true;  // target collapses to the prior
  const McmcChain chain =
      rjmcmc_sample(data, spec, NuisancePriorSpec{}, init, 11, opts, true);
  std::map<int, double> size_freq;
  const int burn = 5000;
  for (std::size_t k = burn; k < chain.states.size(); ++k)
    size_freq[chain.states[k].theta.size()] +=
        1.0 / (chain.states.size() - burn);
  for (int s = 0; s <= 2; ++s) {
    const double expected = std::exp(dimension_log_prior(s, spec));
    CHECK(std::abs(size_freq[s] - expected) < 0.02);
  }
}

TEST_CASE("sampler respects the support size cap") {
  const int p = 6;
  const GroupedDataset data = small_data(30, p, 47);
  SpikeSlabSpec spec{p, 2.0, 1.0};
  McmcState init;
  init.theta = SparseVector({}, Eigen::VectorXd(0), p);
  init.eta = iid_family();
  McmcOptions opts;
  opts.n_iter = 20000;
  opts.s_max = 2;
  const McmcChain chain =
      rjmcmc_sample(data, spec, NuisancePriorSpec{}, init, 12, opts, true);
  for (const McmcState& st : chain.states) CHECK(st.theta.size() <= 2);
}

TEST_CASE("chain log posterior trace is consistent with the states") {
  const int p = 4;
  const GroupedDataset data = small_data(25, p, 48);
  const NuisanceState eta(iid_family(), data);
  SpikeSlabSpec spec{p, 2.0, 1.0};
  McmcState init;
  init.theta = SparseVector({}, Eigen::VectorXd(0), p);
  init.eta = iid_family();
  McmcOptions opts;
  opts.n_iter = 3000;
  opts.thin = 100;
  const McmcChain chain =
      rjmcmc_sample(data, spec, NuisancePriorSpec{}, init, 13, opts, true);
  REQUIRE(chain.states.size() == chain.log_posterior.size());
  for (std::size_t k = 0; k < chain.states.size(); ++k) {
    const McmcState& st = chain.states[k];
    const double expected = log_likelihood(data, st.theta, eta) +
                            joint_log_prior(st.theta, spec);
    CHECK(chain.log_posterior[k] == doctest::Approx(expected).epsilon(1e-8));
    CHECK(st.log_posterior == doctest::Approx(expected).epsilon(1e-8));
  }
  // identical seeds give identical chains
  const McmcChain again =
      rjmcmc_sample(data, spec, NuisancePriorSpec{}, init, 13, opts, true);
  for (std::size_t k = 0; k < chain.states.size(); ++k)
    CHECK(chain.states[k].theta == again.states[k].theta);
}

TEST_CASE("eta moves keep the nuisance inside its support") {
  ParamCorrelationParams fam;
  fam.kind = CorrelationKind::MA;
  fam.alpha = 0.2;
  fam.sigma2 = 1.0;
  Eigen::VectorXd vals(1);
  vals << 1.0;
  const SparseVector theta0({0}, vals, 3);
  SimulateOptions sopts;
  sopts.group_size = 3;
  const GroupedDataset data = simulate(fam, theta0, 20, 3, 49, sopts);
  SpikeSlabSpec spec{3, 2.0, 1.0};
  McmcState init;
  init.theta = theta0;
  init.eta = fam;
  McmcOptions opts;
  opts.n_iter = 5000;
  opts.thin = 10;
  const McmcChain chain =
      rjmcmc_sample(data, spec, NuisancePriorSpec{}, init, 14, opts, false);
  int moved = 0;
  for (const McmcState& st : chain.states) {
    const auto* c = std::get_if<ParamCorrelationParams>(&st.eta);
    REQUIRE(c != nullptr);
    CHECK(std::abs(c->alpha) < 0.5);  // MA range
    CHECK(c->sigma2 > 0.0);
    if (c->alpha != fam.alpha) ++moved;
  }
  CHECK(moved > 0);
  CHECK(chain.attempts[4] > 0);
}

TEST_CASE("support marginals and tv behave like distributions") {
  const int p = 4;
  const GroupedDataset data = small_data(30, p, 50);
  SpikeSlabSpec spec{p, 2.0, 1.0};
  McmcState init;
  init.theta = SparseVector({}, Eigen::VectorXd(0), p);
  init.eta = iid_family();
  McmcOptions opts;
  opts.n_iter = 20000;
  const McmcChain chain =
      rjmcmc_sample(data, spec, NuisancePriorSpec{}, init, 15, opts, true);
  const SupportPosterior marg = support_marginals(chain, 2000, p);
  double total = 0.0;
  for (double lw : marg.log_weights) total += std::exp(lw);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  for (double q : marg.inclusion_probs) {
    CHECK(q >= 0.0);
    CHECK(q <= 1.0);
  }
  CHECK(support_tv(marg, marg) == doctest::Approx(0.0).epsilon(1e-12));
  const NuisanceState eta(iid_family(), data);
  const SupportPosterior exact =
      enumerate_posterior_laplace_slab(data, spec, eta, 3);
  const double tv = support_tv(marg, exact);
  CHECK(tv >= 0.0);
  CHECK(tv <= 1.0);
}
