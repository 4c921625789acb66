#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "gsreg/families.hpp"
#include "gsreg/priors.hpp"
#include "gsreg/types.hpp"

namespace gsreg {

/// Posterior over supports: normalized log weights, optional per-support
/// Gaussian summaries of theta_S, and marginal inclusion probabilities.
struct SupportPosterior {
  std::vector<std::vector<int>> supports;
  std::vector<double> log_weights;  ///< normalized (logsumexp = 0)
  std::vector<std::optional<Eigen::VectorXd>> means;
  std::vector<std::optional<Eigen::MatrixXd>> covs;
  Eigen::VectorXd inclusion_probs;

  int modal_support() const;  ///< index of the highest-weight support
  double weight_of(const std::vector<int>& support) const;  ///< 0 if absent
};

struct EnumerationOptions {
  std::int64_t budget = 1000000;  ///< total supports
  double slab_precision = 1e-4;   ///< normal slab: theta_S ~ N(0, tau^2 I),
                                  ///< precision = 1/tau^2
  double ridge = 1e-10;           ///< Gram fallback when ill conditioned
};

/// Exact support posterior under a normal slab (semi-conjugate): closed-form
/// evidence, posterior mean and covariance per support, eta fixed.
SupportPosterior enumerate_posterior_normal_slab(const GroupedDataset& data,
                                                 const SpikeSlabSpec& spec,
                                                 const NuisanceState& eta_fixed,
                                                 int s_max,
                                                 const EnumerationOptions& opts = {});

struct QuadratureOptions {
  std::int64_t budget = 1000000;
  int max_points_per_dim = 96;  ///< refinement cap
  double rel_tol = 1e-4;
  double half_width_sds = 8.0;  ///< integration box around the LS center
};

/// Support posterior under the Laplace slab with per-support evidence by
/// tensor Gauss-Legendre quadrature over theta_S (dimension <= 3), centered
/// at the least-squares solution. Also records quadrature moments.
SupportPosterior enumerate_posterior_laplace_slab(
    const GroupedDataset& data, const SpikeSlabSpec& spec,
    const NuisanceState& eta_fixed, int s_max,
    const QuadratureOptions& opts = {});

// ---------------------------------------------------------------------------
// Reversible-jump MCMC over (S, theta_S, eta)
// ---------------------------------------------------------------------------

struct MoveMix {
  double add = 0.2;
  double remove = 0.2;
  double swap = 0.1;
  double theta_walk = 0.3;
  double eta_walk = 0.2;  ///< ignored when eta is fixed
};

struct McmcOptions {
  int n_iter = 10000;
  int thin = 1;
  MoveMix moves;
  double theta_step = 0.25;   ///< random-walk scale for active coordinates
  double birth_sd = 0.5;      ///< proposal sd for newly added coordinates
  double eta_step = 0.1;      ///< random-walk scale in unconstrained space
  int s_max = -1;             ///< support-size cap; -1 = unrestricted
  bool likelihood_off = false;  ///< prior-only target (validation runs)
};

struct McmcState {
  SparseVector theta;
  FamilyParams eta;
  double log_posterior = 0.0;
};

struct McmcChain {
  std::vector<McmcState> states;     ///< kept states (after thinning)
  std::vector<double> log_posterior; ///< trace, same length as states
  std::uint64_t seed = 0;
  // attempted / accepted per move type: add, remove, swap, theta, eta
  std::array<std::int64_t, 5> attempts{};
  std::array<std::int64_t, 5> accepts{};
  double acceptance_rate(int move) const {
    return attempts[move] ? static_cast<double>(accepts[move]) / attempts[move]
                          : 0.0;
  }
};

/// Random-walk Metropolis with trans-dimensional add/remove/swap moves on the
/// support, coordinate walks on theta_S, and reparameterized walks on eta
/// (log for scales, Cholesky-log for SPD matrices, boundary-logit for the
/// correlation parameter, edge add/delete for the graphical family).
/// If fix_eta, the nuisance parameters are held at init.eta.
McmcChain rjmcmc_sample(const GroupedDataset& data, const SpikeSlabSpec& spec,
                        const NuisancePriorSpec& eta_prior,
                        const McmcState& init, std::uint64_t seed,
                        const McmcOptions& opts, bool fix_eta = false);

/// Empirical support frequencies, inclusion probabilities, and per-support
/// sample moments after discarding the first burn_in kept states.
SupportPosterior support_marginals(const McmcChain& chain, int burn_in, int p);

/// Total-variation distance between two support posteriors restricted to the
/// support marginal: 0.5 * sum_S |w1(S) - w2(S)|.
double support_tv(const SupportPosterior& a, const SupportPosterior& b);

}  // namespace gsreg
