#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "gsreg/splines.hpp"
#include "gsreg/types.hpp"

namespace gsreg {

// ---------------------------------------------------------------------------
// Family parameter bundles. Each family maps its parameters to the per-group
// mean shift xi_i and covariance Delta_i of the grouped Gaussian model.
// ---------------------------------------------------------------------------

/// Multiple responses with missing components: Delta_i is the principal
/// submatrix of Sigma at the observed coordinates, xi_i = 0.
struct MissingResponseParams {
  Eigen::MatrixXd sigma;  ///< m_bar x m_bar SPD
};

/// Measurement error model: groups are (Y*, W) with q+1 rows.
struct MeasurementErrorParams {
  double alpha = 0.0;
  Eigen::VectorXd beta;   ///< R^q
  Eigen::VectorXd mu;     ///< R^q
  double sigma2 = 1.0;
  Eigen::MatrixXd sigma;  ///< q x q SPD
  Eigen::MatrixXd psi;    ///< q x q SPD, known
};

enum class CorrelationKind { CS, AR, MA };

/// Delta_i = sigma2 * G(alpha) with G compound-symmetric, AR(1) or MA(1).
struct ParamCorrelationParams {
  CorrelationKind kind = CorrelationKind::AR;
  double alpha = 0.0;
  double sigma2 = 1.0;
};

/// Delta_i = sigma2 I + Z_i Psi Z_i^T with sigma2 known.
struct MixedEffectsParams {
  Eigen::MatrixXd psi;  ///< q x q SPD
  double sigma2 = 1.0;
};

/// Delta_i = Omega^{-1}; sparsity pattern of Omega is the edge set.
struct GraphicalParams {
  Eigen::MatrixXd omega;  ///< m_bar x m_bar SPD
  double truncation = 10.0;  ///< L of the support set M0+(L)
};

/// Heteroskedastic variance v(z) = beta^T B_J(z); xi = 0, Delta_i = v(z_i).
struct HeteroSplineParams {
  Eigen::VectorXd beta;  ///< positive coefficients, length J
  SplineBasis basis;
};

/// Partial linear mean g(z) = beta^T B_J(z); xi_i = g(z_i), Delta_i = sigma2.
struct PartialLinearParams {
  Eigen::VectorXd beta;  ///< length J
  double sigma2 = 1.0;
  SplineBasis basis;
};

using FamilyParams =
    std::variant<MissingResponseParams, MeasurementErrorParams,
                 ParamCorrelationParams, MixedEffectsParams, GraphicalParams,
                 HeteroSplineParams, PartialLinearParams>;

/// Validates family invariants (SPD matrices, alpha strictly inside its
/// range, positive spline coefficients, M0+(L) membership); throws
/// ParameterRangeError / NotSpdError on violation.
void validate_family(const FamilyParams& params);

/// Legal open interval for the correlation parameter of each kind:
/// CS (0,1), AR (-1,1), MA (-1/2,1/2).
std::pair<double, double> correlation_alpha_range(CorrelationKind kind);

// ---------------------------------------------------------------------------
// Family-specific building blocks
// ---------------------------------------------------------------------------

/// Principal submatrix E_i^T Sigma E_i of Sigma at the coordinates where the
/// 0/1 pattern is one. Throws on an all-zero pattern.
Eigen::MatrixXd missing_covariance(const Eigen::MatrixXd& sigma,
                                   const Eigen::VectorXi& pattern);

struct MemGroup {
  Eigen::VectorXd xi;     ///< (alpha + mu^T beta, mu^T)^T
  Eigen::MatrixXd delta;  ///< [[b^T S b + s2, b^T S], [S b, S + Psi]]
  Eigen::MatrixXd x;      ///< (x*_i, 0_{p x q})^T, (q+1) x p
};

/// Joint (Y*, W) moments of the measurement error model for one group.
MemGroup mem_assemble(const MeasurementErrorParams& spec,
                      const Eigen::VectorXd& x_star);

/// Correlation matrix of the given kind; alpha must be strictly inside
/// its legal interval.
Eigen::MatrixXd correlation_matrix(CorrelationKind kind, double alpha, int m);

/// Closed-form lower/upper eigenvalue bounds for correlation_matrix:
/// CS exact (1-alpha, 1+(m-1) alpha); AR ((1-a^2)/(1+|a|)^2, (1-a^2)/(1-|a|)^2);
/// MA (1-2|a|, 1+2|a|).
std::pair<double, double> correlation_eigen_bounds(CorrelationKind kind,
                                                   double alpha, int m);

/// sigma2 I + Z Psi Z^T.
Eigen::MatrixXd mixed_effects_cov(double sigma2, const Eigen::MatrixXd& z,
                                  const Eigen::MatrixXd& psi);

/// Omega^{-1} via symmetric factorization.
Eigen::MatrixXd graphical_delta(const Eigen::MatrixXd& omega);

/// v(z) = beta^T B_J(z); strictly positive when all beta_j > 0.
double hetero_variance(const Eigen::VectorXd& beta, const SplineBasis& basis,
                       double z);

/// g(z) = beta^T B_J(z).
double partial_linear_mean(const Eigen::VectorXd& beta,
                           const SplineBasis& basis, double z);

// ---------------------------------------------------------------------------
// NuisanceState: family parameters plus the evaluated (xi_i, Delta_i) cache
// for a particular dataset's group structure.
// ---------------------------------------------------------------------------

class NuisanceState {
public:
  /// Evaluates (xi_i, Delta_i) for every group of the dataset. Validates the
  /// family parameters and the per-group metadata the family requires.
  NuisanceState(FamilyParams params, const GroupedDataset& data);

  /// Direct moment specification, without family parameters. Used where only
  /// the Gaussian moments matter (oracles, generic tests).
  static NuisanceState from_moments(std::vector<Eigen::VectorXd> xi,
                                    std::vector<Eigen::MatrixXd> delta);

  const std::optional<FamilyParams>& params() const { return params_; }
  int n() const { return static_cast<int>(delta_.size()); }
  const Eigen::VectorXd& xi(int i) const { return xi_.at(i); }
  const Eigen::MatrixXd& delta(int i) const { return delta_.at(i); }

private:
  NuisanceState() = default;
  std::optional<FamilyParams> params_;
  std::vector<Eigen::VectorXd> xi_;
  std::vector<Eigen::MatrixXd> delta_;
};

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

struct SimulateOptions {
  int group_size = 1;  ///< m for ParamCorrelation / MixedEffects groups
  /// Missing-response patterns; generated i.i.d. Bernoulli(obs_prob) per
  /// coordinate when absent, redrawing all-zero rows.
  std::optional<std::vector<Eigen::VectorXi>> patterns;
  double obs_prob = 0.8;
  /// Rescale design columns so max column norm equals sqrt(n_star).
  bool normalize_design = true;
};

/// Draws a dataset from the family's model at (theta0, family params):
/// X entries i.i.d. standard normal (columns rescaled so ||X||_* =
/// sqrt(n_star) when requested), z_i equispaced at (i - 1/2)/n for spline
/// families, then Y_i = X_i theta0 + xi_i + N(0, Delta_i). Deterministic
/// given the seed.
GroupedDataset simulate(const FamilyParams& family, const SparseVector& theta0,
                        int n, int p, std::uint64_t seed,
                        const SimulateOptions& opts = {});

}  // namespace gsreg
