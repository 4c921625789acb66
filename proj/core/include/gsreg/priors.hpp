#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "gsreg/families.hpp"
#include "gsreg/rng.hpp"
#include "gsreg/types.hpp"

namespace gsreg {

/// Spike-and-slab prior settings: dimension prior pi_p(s) proportional
/// to p^{-a s} and a Laplace slab with rate lambda.
struct SpikeSlabSpec {
  int p = 1;
  double dim_decay = 2.0;  ///< a in pi_p(s) ~ p^{-a s}; default keeps A4 = a > 1
  double lambda = 1.0;
};

/// log pi_p(s), with pi_p(s) proportional to p^{-a s} normalized over 0..p.
double dimension_log_prior(int s, const SpikeSlabSpec& spec);

/// Sum over coordinates of log( lambda/2 exp(-lambda |theta_j|) ).
double slab_log_density(const Eigen::VectorXd& theta_s, double lambda);

/// Legal lambda interval ( ||X||_* / (L1 p^{L2}), L3 ||X||_* / sqrt(n) );
/// throws ParameterRangeError if the interval is empty.
std::pair<double, double> lambda_bounds(double x_norm_star, int p, int n,
                                        double l1, double l2, double l3);

/// Full log prior of a sparse vector: log pi_p(s) - log C(p, s) plus the slab
/// density on the nonzero part.
double joint_log_prior(const SparseVector& theta, const SpikeSlabSpec& spec);

/// log of the binomial coefficient via lgamma.
double log_binom(int n, int k);

// ---------------------------------------------------------------------------
// Boundary-avoiding prior for the correlation parameter on (b1, b2):
// density proportional to exp{ -1 / ((a-b1)^c1 (b2-a)^c2) }.
// ---------------------------------------------------------------------------

class AlphaPrior {
public:
  AlphaPrior(double b1, double b2, double c1, double c2, int grid_size = 10001);

  /// Normalized log density; -inf outside the open support (out_of_support
  /// set if the caller wants the flag).
  double log_density(double alpha, bool* out_of_support = nullptr) const;

  /// Inverse-CDF sampling on the quadrature grid.
  double sample(Rng& rng) const;

  double log_normalizer() const { return log_normalizer_; }
  double b1() const { return b1_; }
  double b2() const { return b2_; }

private:
  double unnorm_log_density(double alpha) const;
  double b1_, b2_, c1_, c2_;
  double log_normalizer_;
  std::vector<double> grid_;  // grid points
  std::vector<double> cdf_;   // cumulative masses at grid midpoints
};

// ---------------------------------------------------------------------------
// Scalar / matrix nuisance prior building blocks
// ---------------------------------------------------------------------------

/// Inverse-gamma(shape, rate) log density at x > 0.
double inverse_gamma_log_density(double x, double shape, double rate);
double inverse_gamma_sample(double shape, double rate, Rng& rng);

/// Inverse-Gaussian(mean mu, shape lam) log density at x > 0.
double inverse_gaussian_log_density(double x, double mu, double lam);
double inverse_gaussian_sample(double mu, double lam, Rng& rng);

/// Inverse-Wishart(df, scale) log density at SPD x; dimension from scale.
double inverse_wishart_log_density(const Eigen::MatrixXd& x, double df,
                                   const Eigen::MatrixXd& scale);
Eigen::MatrixXd inverse_wishart_sample(double df, const Eigen::MatrixXd& scale,
                                       Rng& rng);

/// Graphical prior on a sparse precision matrix Omega, truncated to M0+(L):
/// product of f1 over included off-diagonal entries and f2 over diagonal
/// entries, binomial edge prior with probability varpi given |Upsilon|, and
/// a size prior Pi(|Upsilon| = r) proportional to exp(-r log max(r, 2)).
struct GraphicalPriorSpec {
  double truncation = 10.0;  ///< L
  double varpi = 0.5;
  double offdiag_rate = 1.0;  ///< f1: exponential rate on |omega_jk|
  double diag_sd = 10.0;      ///< f2: normal scale on omega_jj
};

/// Unnormalized log prior density of Omega (diagonal + included entries +
/// edge pattern); -inf with out_of_support set when Omega leaves M0+(L).
double graphical_log_prior(const Eigen::MatrixXd& omega,
                           const GraphicalPriorSpec& spec,
                           bool* out_of_support = nullptr);

// ---------------------------------------------------------------------------
// Per-family nuisance priors
// ---------------------------------------------------------------------------

/// Hyperparameters of the nuisance prior for each family.
struct NuisancePriorSpec {
  // inverse-Wishart for covariance matrices (MissingResponse Sigma,
  // MixedEffects Psi, MeasurementError Sigma)
  double iw_df = 5.0;
  Eigen::MatrixXd iw_scale;  ///< empty = identity of the needed dimension
  // inverse-gamma for variances (sigma2)
  double ig_shape = 2.0, ig_rate = 1.0;
  // normal for location parameters (alpha, beta, mu of the MEM family;
  // partial-linear spline coefficients)
  double normal_sd = 10.0;
  // boundary-avoiding alpha prior exponents
  double alpha_c1 = 1.0, alpha_c2 = 1.0;
  // inverse-Gaussian per positive spline coefficient
  double igauss_mean = 1.0, igauss_shape = 1.0;
  GraphicalPriorSpec graphical;
};

/// Family-dispatched log prior density of a nuisance parameter bundle.
/// Returns -inf (with out_of_support set) on support violations.
double nuisance_prior_log_density(const FamilyParams& params,
                                  const NuisancePriorSpec& spec,
                                  bool* out_of_support = nullptr);

/// Family-dispatched prior draw; `like` fixes the family and dimensions.
FamilyParams nuisance_prior_sample(const FamilyParams& like,
                                   const NuisancePriorSpec& spec, Rng& rng);

}  // namespace gsreg
