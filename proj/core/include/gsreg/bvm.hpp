#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "gsreg/families.hpp"
#include "gsreg/posterior.hpp"
#include "gsreg/priors.hpp"
#include "gsreg/types.hpp"

namespace gsreg {

/// Finite mixture of support-indexed Gaussians: component S is
/// N(center_S, Gamma_S^{-1}) on the coordinates of S, with weight w_S.
struct SupportMixture {
  std::vector<std::vector<int>> supports;
  std::vector<double> log_weights;  ///< normalized
  std::vector<Eigen::VectorXd> centers;
  std::vector<Eigen::MatrixXd> covariances;  ///< Gamma_S^{-1}
  int p = 0;
  std::string mode;  ///< "oracle" or "plug-in": which reference eta was used

  int modal_component() const;
  double weight_of(const std::vector<int>& support) const;
};

/// Projection matrix choice for the mean-structure nuisance direction.
struct ProjectionChoice {
  enum class Kind {
    Zero,        ///< families with no mean component
    Given,       ///< caller-supplied H
    Whitened,    ///< H projects onto the whitened nuisance design columns
  };
  Kind kind = Kind::Zero;
  Eigen::MatrixXd h;  ///< used when kind == Given
};

/// Gamma_S = X~_S^T (I - H) X~_S; an empty H means H = 0.
Eigen::MatrixXd gram(const Eigen::MatrixXd& x_tilde_s, const Eigen::MatrixXd& h);

/// theta^_S = Gamma_S^{-1} X~_S^T (I - H)(U + X~ theta0).
Eigen::VectorXd ls_center(const Eigen::MatrixXd& x_tilde_s,
                          const Eigen::MatrixXd& x_tilde,
                          const Eigen::MatrixXd& h, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& theta0);

/// log of the shifted quadratic likelihood approximation
/// exp{ -1/2 ||(I-H) X~ (theta - theta0)||^2 + U^T (I-H) X~ (theta - theta0) }.
double log_lambda_star(const Eigen::VectorXd& theta,
                       const Eigen::VectorXd& theta0,
                       const Eigen::MatrixXd& x_tilde, const Eigen::MatrixXd& h,
                       const Eigen::VectorXd& u);

/// Normalized mixture log weights over the given supports:
/// log w_S = log pi_p(s) - log C(p,s) + s log(lambda/2) + (s/2) log(2 pi)
///           - 1/2 log det Gamma_S + 1/2 theta^_S^T Gamma_S theta^_S.
std::vector<double> mixture_weights(const std::vector<std::vector<int>>& supports,
                                    const SpikeSlabSpec& spec,
                                    const Eigen::MatrixXd& x_tilde,
                                    const Eigen::MatrixXd& h,
                                    const Eigen::VectorXd& u,
                                    const Eigen::VectorXd& theta0);

/// Builds the limit mixture at a reference (theta0, eta0) with supports of
/// size <= s_max. The projection choice fixes how the mean-structure nuisance
/// direction is removed; `mode` labels whether eta0 is the truth ("oracle")
/// or an estimate ("plug-in").
SupportMixture build_bvm(const GroupedDataset& data, const SparseVector& theta0,
                         const NuisanceState& eta0, const SpikeSlabSpec& spec,
                         const ProjectionChoice& projection, int s_max,
                         const std::string& mode = "oracle",
                         std::int64_t budget = 1000000);

/// Whitened nuisance design for the projection: the measurement-error family
/// stacks identity blocks (its mean shift is free), the partial-linear family
/// stacks the spline design at each group's z. Other families have no mean
/// component and return an empty matrix.
Eigen::MatrixXd nuisance_design(const GroupedDataset& data,
                                const NuisanceState& eta0);

/// Lower-bound total-variation estimate between a support posterior and the
/// mixture: the support-marginal TV plus, on the shared modal support, the
/// Hellinger lower bound min(w1, w2)(1 - exp(-D_B)) from the Gaussian
/// Bhattacharyya distance D_B. An estimator, not the exact TV.
double tv_support_mixture(const SupportPosterior& posterior,
                          const SupportMixture& mixture);

struct CredibleInterval {
  int coordinate = 0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Per-coordinate intervals theta^_{S,j} +/- z_{(1+level)/2} sqrt((Gamma_S^{-1})_jj)
/// from the mixture's modal component.
std::vector<CredibleInterval> credible_intervals(const SupportMixture& mixture,
                                                 double level);

}  // namespace gsreg
