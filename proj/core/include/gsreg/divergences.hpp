#pragma once

#include <Eigen/Dense>

#include "gsreg/families.hpp"
#include "gsreg/types.hpp"

namespace gsreg {

/// A pair of Gaussian models N(mu1, sigma1), N(mu2, sigma2) of common
/// dimension; covariances validated SPD at construction.
struct GaussianPair {
  GaussianPair(Eigen::VectorXd mu1, Eigen::MatrixXd sigma1,
               Eigen::VectorXd mu2, Eigen::MatrixXd sigma2);
  Eigen::VectorXd mu1, mu2;
  Eigen::MatrixXd sigma1, sigma2;
  int dim() const { return static_cast<int>(mu1.size()); }
};

/// K(p1, p2) = 1/2 { log det(S2)/det(S1) + tr(S1 S2^-1) - r
///                   + || S2^{-1/2}(mu1 - mu2) ||^2 }.
double gaussian_kl(const GaussianPair& pair);

/// V(p1, p2) = 1/2 { tr(S1 S2^-1 S1 S2^-1) - 2 tr(S1 S2^-1) + r }
///             + || S1^{1/2} S2^-1 (mu1 - mu2) ||^2.
double gaussian_kl_variation(const GaussianPair& pair);

/// Affinity defect g^2 in [0,1): 1 minus the Gaussian covariance affinity
/// det(S1)^{1/4} det(S2)^{1/4} / det((S1+S2)/2)^{1/2}; zero iff S1 = S2.
double affinity_defect(const Eigen::MatrixXd& sigma1,
                       const Eigen::MatrixXd& sigma2);

/// Bhattacharyya distance -log integral sqrt(p1 p2) for one Gaussian pair:
/// -log(1 - g^2) + 1/8 (mu1-mu2)^T ((S1+S2)/2)^{-1} (mu1-mu2).
double bhattacharyya(const GaussianPair& pair);

/// Average Renyi divergence of order 1/2 between the models at (theta, eta)
/// and (theta0, eta0): (1/n) sum of per-group Bhattacharyya distances with
/// mean gap X_i(theta - theta0) + xi_i - xi0_i.
double avg_renyi(const GroupedDataset& data, const SparseVector& theta,
                 const NuisanceState& eta, const SparseVector& theta0,
                 const NuisanceState& eta0);

struct PseudoMetrics {
  double d_a;  ///< sqrt(n^-1 sum ||xi1_i - xi2_i||^2)
  double d_b;  ///< sqrt(n^-1 sum ||Delta1_i - Delta2_i||_F^2)
  double d_n;  ///< sqrt(d_a^2 + d_b^2)
};

PseudoMetrics pseudo_metrics(const NuisanceState& eta1,
                             const NuisanceState& eta2);

/// Most powerful Neyman-Pearson test of (theta0, eta0) against
/// (theta1, eta1): rejects iff the log likelihood ratio is >= 0.
bool np_test(const GroupedDataset& data, const SparseVector& theta1,
             const NuisanceState& eta1, const SparseVector& theta0,
             const NuisanceState& eta0);

struct EigenRatioCheck {
  double lhs;  ///< rho_max^{-2}(S2) ||S1 - S2||_F^2
  double mid;  ///< sum (d_k^{-1} - 1)^2, d_k eigenvalues of S2^{1/2} S1^{-1} S2^{1/2}
  double rhs;  ///< rho_min^{-2}(S2) ||S1 - S2||_F^2
};

/// Sandwich lhs <= mid <= rhs relating the Frobenius gap to the relative
/// eigenvalue defects.
EigenRatioCheck eigen_ratio_check(const Eigen::MatrixXd& sigma1,
                                  const Eigen::MatrixXd& sigma2);

}  // namespace gsreg
