#include "gsreg/model.hpp"

#include <cmath>
#include <numbers>

#include "gsreg/errors.hpp"
#include "gsreg/linalg.hpp"

namespace gsreg {

namespace {

void check_eta(const GroupedDataset& data, const NuisanceState& eta) {
  if (eta.n() != data.n())
    throw ShapeError("nuisance state group count != dataset group count");
}

}  // namespace

double log_likelihood(const GroupedDataset& data, const SparseVector& theta,
                      const NuisanceState& eta) {
  check_eta(data, eta);
  if (theta.ambient_dim() != data.p())
    throw ShapeError("theta ambient dimension != p");
  const Eigen::VectorXd theta_dense = theta.to_dense();
  constexpr double log2pi = 1.8378770664093453;  // log(2 pi)
  double ll = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const auto& g = data.group(i);
    const Eigen::MatrixXd& delta = eta.delta(i);
    if (delta.rows() != g.y.size())
      throw ShapeError("Delta dimension != response length in group " +
                       std::to_string(i));
    Eigen::LLT<Eigen::MatrixXd> llt(delta);
    if (llt.info() != Eigen::Success)
      require_spd(delta, "Delta in group " + std::to_string(i));
    const Eigen::VectorXd resid = g.y - g.x * theta_dense - eta.xi(i);
    const double log_det =
        2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double quad = resid.dot(llt.solve(resid));
    ll += -0.5 * (g.y.size() * log2pi + log_det + quad);
  }
  return ll;
}

double log_likelihood_ratio(const GroupedDataset& data,
                            const SparseVector& theta_num,
                            const NuisanceState& eta_num,
                            const SparseVector& theta_den,
                            const NuisanceState& eta_den) {
  return log_likelihood(data, theta_num, eta_num) -
         log_likelihood(data, theta_den, eta_den);
}

WhitenedDesign whiten(const GroupedDataset& data, const NuisanceState& eta0,
                      const SparseVector& theta0) {
  check_eta(data, eta0);
  const Eigen::VectorXd theta_dense = theta0.to_dense();
  WhitenedDesign w;
  w.x_tilde.resize(data.n_star(), data.p());
  w.xi_tilde.resize(data.n_star());
  w.u.resize(data.n_star());
  w.offsets.reserve(data.n());
  int row = 0;
  for (int i = 0; i < data.n(); ++i) {
    const auto& g = data.group(i);
    const int m = static_cast<int>(g.y.size());
    const Eigen::MatrixXd root =
        spd_inv_sqrt(eta0.delta(i), "Delta in group " + std::to_string(i));
    w.offsets.push_back(row);
    w.x_tilde.middleRows(row, m) = root * g.x;
    w.xi_tilde.segment(row, m) = root * eta0.xi(i);
    w.u.segment(row, m) = root * (g.y - g.x * theta_dense - eta0.xi(i));
    row += m;
  }
  return w;
}

WhitenedDesign whiten(const GroupedDataset& data, const NuisanceState& eta0) {
  return whiten(data, eta0, SparseVector({}, Eigen::VectorXd(), data.p()));
}

Eigen::VectorXd standardized_residual(const GroupedDataset& data,
                                      const SparseVector& theta0,
                                      const NuisanceState& eta0) {
  return whiten(data, eta0, theta0).u;
}

}  // namespace gsreg
