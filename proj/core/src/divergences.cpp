#include "gsreg/divergences.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "gsreg/errors.hpp"
#include "gsreg/linalg.hpp"
#include "gsreg/model.hpp"

namespace gsreg {

GaussianPair::GaussianPair(Eigen::VectorXd m1, Eigen::MatrixXd s1,
                           Eigen::VectorXd m2, Eigen::MatrixXd s2)
    : mu1(std::move(m1)), mu2(std::move(m2)), sigma1(std::move(s1)),
      sigma2(std::move(s2)) {
  if (mu1.size() != mu2.size() || sigma1.rows() != mu1.size() ||
      sigma2.rows() != mu2.size())
    throw ShapeError("GaussianPair: dimension mismatch");
  require_spd(sigma1, "GaussianPair Sigma1");
  require_spd(sigma2, "GaussianPair Sigma2");
}

double gaussian_kl(const GaussianPair& pair) {
  const int r = pair.dim();
  Eigen::LLT<Eigen::MatrixXd> llt2(pair.sigma2);
  const double log_det1 = spd_log_det(pair.sigma1, "Sigma1");
  const double log_det2 = spd_log_det(pair.sigma2, "Sigma2");
  const double trace = llt2.solve(pair.sigma1).trace();
  const Eigen::VectorXd diff = pair.mu1 - pair.mu2;
  const double quad = diff.dot(llt2.solve(diff));
  return 0.5 * (log_det2 - log_det1 + trace - r + quad);
}

double gaussian_kl_variation(const GaussianPair& pair) {
  const int r = pair.dim();
  Eigen::LLT<Eigen::MatrixXd> llt2(pair.sigma2);
  const Eigen::MatrixXd a = llt2.solve(pair.sigma1);  // Sigma2^-1 Sigma1
  const double tr_a = a.trace();
  const double tr_aa = (a * a).trace();
  const Eigen::VectorXd w = llt2.solve(pair.mu1 - pair.mu2);
  return 0.5 * (tr_aa - 2.0 * tr_a + r) + w.dot(pair.sigma1 * w);
}

double affinity_defect(const Eigen::MatrixXd& sigma1,
                       const Eigen::MatrixXd& sigma2) {
  if (sigma1.rows() != sigma2.rows())
    throw ShapeError("affinity_defect: dimension mismatch");
  const double ld1 = spd_log_det(sigma1, "Sigma1");
  const double ld2 = spd_log_det(sigma2, "Sigma2");
  const double ld_mid = spd_log_det(0.5 * (sigma1 + sigma2), "(S1+S2)/2");
  return 1.0 - std::exp(0.25 * ld1 + 0.25 * ld2 - 0.5 * ld_mid);
}

double bhattacharyya(const GaussianPair& pair) {
  const Eigen::MatrixXd mid = 0.5 * (pair.sigma1 + pair.sigma2);
  const double g2 = affinity_defect(pair.sigma1, pair.sigma2);
  const Eigen::VectorXd diff = pair.mu1 - pair.mu2;
  Eigen::LLT<Eigen::MatrixXd> llt(mid);
  return -std::log1p(-g2) + 0.125 * diff.dot(llt.solve(diff));
}

double avg_renyi(const GroupedDataset& data, const SparseVector& theta,
                 const NuisanceState& eta, const SparseVector& theta0,
                 const NuisanceState& eta0) {
  if (eta.n() != data.n() || eta0.n() != data.n())
    throw ShapeError("avg_renyi: nuisance group count mismatch");
  const Eigen::VectorXd diff_theta = theta.to_dense() - theta0.to_dense();
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const Eigen::VectorXd mean_gap =
        data.group(i).x * diff_theta + eta.xi(i) - eta0.xi(i);
    GaussianPair pair(mean_gap, eta.delta(i),
                      Eigen::VectorXd::Zero(mean_gap.size()), eta0.delta(i));
    total += bhattacharyya(pair);
  }
  return total / data.n();
}

PseudoMetrics pseudo_metrics(const NuisanceState& eta1,
                             const NuisanceState& eta2) {
  if (eta1.n() != eta2.n())
    throw ShapeError("pseudo_metrics: group count mismatch");
  const int n = eta1.n();
  double da2 = 0.0, db2 = 0.0;
  for (int i = 0; i < n; ++i) {
    if (eta1.xi(i).size() != eta2.xi(i).size())
      throw ShapeError("pseudo_metrics: group dimension mismatch");
    da2 += (eta1.xi(i) - eta2.xi(i)).squaredNorm();
    db2 += (eta1.delta(i) - eta2.delta(i)).squaredNorm();
  }
  da2 /= n;
  db2 /= n;
  return {std::sqrt(da2), std::sqrt(db2), std::sqrt(da2 + db2)};
}

bool np_test(const GroupedDataset& data, const SparseVector& theta1,
             const NuisanceState& eta1, const SparseVector& theta0,
             const NuisanceState& eta0) {
  return log_likelihood_ratio(data, theta1, eta1, theta0, eta0) >= 0.0;
}

EigenRatioCheck eigen_ratio_check(const Eigen::MatrixXd& sigma1,
                                  const Eigen::MatrixXd& sigma2) {
  require_spd(sigma1, "Sigma1");
  require_spd(sigma2, "Sigma2");
  if (sigma1.rows() != sigma2.rows())
    throw ShapeError("eigen_ratio_check: dimension mismatch");
  const Eigen::MatrixXd root2 = spd_sqrt(sigma2, "Sigma2");
  const Eigen::MatrixXd inv1 = spd_inverse(sigma1, "Sigma1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(root2 * inv1 * root2);
  double mid = 0.0;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    const double d = es.eigenvalues()(k);
    mid += (1.0 / d - 1.0) * (1.0 / d - 1.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(sigma2);
  const double rho_min = es2.eigenvalues().minCoeff();
  const double rho_max = es2.eigenvalues().maxCoeff();
  const double frob2 = (sigma1 - sigma2).squaredNorm();
  return {frob2 / (rho_max * rho_max), mid, frob2 / (rho_min * rho_min)};
}

}  // namespace gsreg
