#pragma once

#include "gsreg/families.hpp"
#include "gsreg/types.hpp"

namespace gsreg {

/// Sum over groups of log N(y_i; X_i theta + xi_i, Delta_i).
double log_likelihood(const GroupedDataset& data, const SparseVector& theta,
                      const NuisanceState& eta);

/// log_likelihood(num) - log_likelihood(den).
double log_likelihood_ratio(const GroupedDataset& data,
                            const SparseVector& theta_num,
                            const NuisanceState& eta_num,
                            const SparseVector& theta_den,
                            const NuisanceState& eta_den);

/// Whitened design at eta0: block i of x_tilde is Delta_i^{-1/2} X_i, block i
/// of xi_tilde is Delta_i^{-1/2} xi_i, and u holds the standardized
/// residuals Delta_i^{-1/2}(y_i - X_i theta0 - xi_i) for theta0.
WhitenedDesign whiten(const GroupedDataset& data, const NuisanceState& eta0,
                      const SparseVector& theta0);

/// Convenience overload with theta0 = 0.
WhitenedDesign whiten(const GroupedDataset& data, const NuisanceState& eta0);

/// Standardized residual vector U at (theta0, eta0).
Eigen::VectorXd standardized_residual(const GroupedDataset& data,
                                      const SparseVector& theta0,
                                      const NuisanceState& eta0);

}  // namespace gsreg
