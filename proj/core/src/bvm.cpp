#include "gsreg/bvm.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "gsreg/divergences.hpp"
#include "gsreg/errors.hpp"
#include "gsreg/model.hpp"

namespace gsreg {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x,
                               const std::vector<int>& support) {
  Eigen::MatrixXd out(x.rows(), support.size());
  for (std::size_t k = 0; k < support.size(); ++k)
    out.col(k) = x.col(support[k]);
  return out;
}

Eigen::VectorXd apply_annihilator(const Eigen::MatrixXd& h,
                                  const Eigen::VectorXd& v) {
  if (h.size() == 0) return v;
  return v - h * v;
}

std::int64_t n_choose_k(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t out = 1;
  for (int i = 0; i < k; ++i) {
    out = out * (n - i) / (i + 1);
    if (out > (std::int64_t{1} << 60)) return std::int64_t{1} << 60;
  }
  return out;
}

template <typename F>
void for_each_support(int p, int s_max, F&& visit) {
  std::vector<int> s;
  visit(s);
  for (int t = 1; t <= std::min(s_max, p); ++t) {
    s.assign(t, 0);
    for (int i = 0; i < t; ++i) s[i] = i;
    while (true) {
      visit(s);
      int i = t - 1;
      while (i >= 0 && s[i] == p - t + i) --i;
      if (i < 0) break;
      ++s[i];
      for (int j = i + 1; j < t; ++j) s[j] = s[j - 1] + 1;
    }
  }
}

double log_sum_exp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

int SupportMixture::modal_component() const {
  int best = 0;
  for (std::size_t k = 1; k < log_weights.size(); ++k)
    if (log_weights[k] > log_weights[best]) best = static_cast<int>(k);
  return best;
}

double SupportMixture::weight_of(const std::vector<int>& support) const {
  for (std::size_t k = 0; k < supports.size(); ++k)
    if (supports[k] == support) return std::exp(log_weights[k]);
  return 0.0;
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& x_tilde_s,
                     const Eigen::MatrixXd& h) {
  if (h.size() == 0) return x_tilde_s.transpose() * x_tilde_s;
  if (h.rows() != x_tilde_s.rows() || h.cols() != x_tilde_s.rows())
    throw ShapeError("gram: projection dimension mismatch");
  const Eigen::MatrixXd hx = x_tilde_s - h * x_tilde_s;
  // (I - H) is an orthogonal projector, so (I-H)^T (I-H) = I - H
  return x_tilde_s.transpose() * hx;
}

Eigen::VectorXd ls_center(const Eigen::MatrixXd& x_tilde_s,
                          const Eigen::MatrixXd& x_tilde,
                          const Eigen::MatrixXd& h, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& theta0) {
  const Eigen::VectorXd target =
      apply_annihilator(h, u + x_tilde * theta0);
  const Eigen::MatrixXd g = gram(x_tilde_s, h);
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success)
    throw NotSpdError("ls_center: Gram not positive definite");
  return llt.solve(x_tilde_s.transpose() * target);
}

double log_lambda_star(const Eigen::VectorXd& theta,
                       const Eigen::VectorXd& theta0,
                       const Eigen::MatrixXd& x_tilde, const Eigen::MatrixXd& h,
                       const Eigen::VectorXd& u) {
  const Eigen::VectorXd shift = apply_annihilator(h, x_tilde * (theta - theta0));
  return -0.5 * shift.squaredNorm() + u.dot(shift);
}

std::vector<double> mixture_weights(
    const std::vector<std::vector<int>>& supports, const SpikeSlabSpec& spec,
    const Eigen::MatrixXd& x_tilde, const Eigen::MatrixXd& h,
    const Eigen::VectorXd& u, const Eigen::VectorXd& theta0) {
  const int p = spec.p;
  std::vector<double> lw;
  lw.reserve(supports.size());
  for (const auto& supp : supports) {
    const int s = static_cast<int>(supp.size());
    double val = dimension_log_prior(s, spec) - log_binom(p, s) +
                 s * std::log(spec.lambda / 2.0) + 0.5 * s * kLog2Pi;
    if (s > 0) {
      const Eigen::MatrixXd xs = select_columns(x_tilde, supp);
      const Eigen::MatrixXd g = gram(xs, h);
      Eigen::LLT<Eigen::MatrixXd> llt(g);
      if (llt.info() != Eigen::Success)
        throw NotSpdError("mixture_weights: Gram not positive definite");
      double logdet = 0.0;
      for (int i = 0; i < s; ++i)
        logdet += 2.0 * std::log(llt.matrixL()(i, i));
      const Eigen::VectorXd target = apply_annihilator(h, u + x_tilde * theta0);
      const Eigen::VectorXd center = llt.solve(xs.transpose() * target);
      val += -0.5 * logdet + 0.5 * center.dot(g * center);
    }
    lw.push_back(val);
  }
  const double z = log_sum_exp(lw);
  for (double& x : lw) x -= z;
  return lw;
}

Eigen::MatrixXd nuisance_design(const GroupedDataset& data,
                                const NuisanceState& eta0) {
  if (!eta0.params()) return {};
  const FamilyParams& fam = *eta0.params();
  const int n_star = data.n_star();
  if (std::holds_alternative<MeasurementErrorParams>(fam)) {
    // free mean shift per response block: one constant column per coordinate
    const int m = static_cast<int>(data.group(0).y.size());
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n_star, m);
    int row = 0;
    for (int i = 0; i < data.n(); ++i)
      for (int k = 0; k < data.group(i).y.size(); ++k, ++row)
        z(row, k) = 1.0;
    return z;
  }
  if (const auto* pl = std::get_if<PartialLinearParams>(&fam)) {
    Eigen::MatrixXd z(n_star, pl->basis.dimension());
    int row = 0;
    for (int i = 0; i < data.n(); ++i) {
      if (!data.group(i).meta.z)
        throw ShapeError("nuisance_design: missing z covariate");
      z.row(row++) = pl->basis.eval(*data.group(i).meta.z).transpose();
    }
    return z;
  }
  return {};
}

namespace {

Eigen::MatrixXd whitened_projection(const GroupedDataset& data,
                                    const NuisanceState& eta0,
                                    const Eigen::MatrixXd& z_raw) {
  if (z_raw.size() == 0) return {};
  // whiten the nuisance columns block by block with Delta_i^{-1/2}
  Eigen::MatrixXd z_tilde(z_raw.rows(), z_raw.cols());
  int row = 0;
  for (int i = 0; i < data.n(); ++i) {
    const int m = static_cast<int>(data.group(i).y.size());
    Eigen::LLT<Eigen::MatrixXd> llt(eta0.delta(i));
    z_tilde.middleRows(row, m) = llt.matrixL().solve(z_raw.middleRows(row, m));
    row += m;
  }
  const Eigen::MatrixXd gram_z = z_tilde.transpose() * z_tilde;
  Eigen::LLT<Eigen::MatrixXd> llt(gram_z);
  if (llt.info() != Eigen::Success)
    throw NotSpdError("projection: nuisance design rank deficient");
  return z_tilde * llt.solve(z_tilde.transpose());
}

}  // namespace

SupportMixture build_bvm(const GroupedDataset& data, const SparseVector& theta0,
                         const NuisanceState& eta0, const SpikeSlabSpec& spec,
                         const ProjectionChoice& projection, int s_max,
                         const std::string& mode, std::int64_t budget) {
  const int p = data.p();
  if (spec.p != p) throw ShapeError("build_bvm: prior dimension mismatch");
  std::int64_t total = 0;
  for (int s = 0; s <= std::min(s_max, p); ++s) {
    total += n_choose_k(p, s);
    if (total > budget) throw BudgetError("build_bvm: support budget exceeded");
  }

  const WhitenedDesign wd = whiten(data, eta0, theta0);
  Eigen::MatrixXd h;
  switch (projection.kind) {
    case ProjectionChoice::Kind::Zero:
      break;
    case ProjectionChoice::Kind::Given:
      h = projection.h;
      break;
    case ProjectionChoice::Kind::Whitened:
      h = whitened_projection(data, eta0, nuisance_design(data, eta0));
      break;
  }
  const Eigen::VectorXd theta0_dense = theta0.to_dense();

  SupportMixture mix;
  mix.p = p;
  mix.mode = mode;
  for_each_support(p, std::min(s_max, p), [&](const std::vector<int>& supp) {
    mix.supports.push_back(supp);
    const int s = static_cast<int>(supp.size());
    if (s == 0) {
      mix.centers.emplace_back(0);
      mix.covariances.emplace_back(0, 0);
      return;
    }
    const Eigen::MatrixXd xs = select_columns(wd.x_tilde, supp);
    const Eigen::MatrixXd g = gram(xs, h);
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success)
      throw NotSpdError("build_bvm: Gram not positive definite");
    mix.centers.push_back(
        llt.solve(xs.transpose() *
                  apply_annihilator(h, wd.u + wd.x_tilde * theta0_dense)));
    mix.covariances.push_back(llt.solve(Eigen::MatrixXd::Identity(s, s)));
  });
  mix.log_weights =
      mixture_weights(mix.supports, spec, wd.x_tilde, h, wd.u, theta0_dense);
  return mix;
}

double tv_support_mixture(const SupportPosterior& posterior,
                          const SupportMixture& mixture) {
  std::map<std::vector<int>, double> diff;
  for (std::size_t k = 0; k < posterior.supports.size(); ++k)
    diff[posterior.supports[k]] += std::exp(posterior.log_weights[k]);
  for (std::size_t k = 0; k < mixture.supports.size(); ++k)
    diff[mixture.supports[k]] -= std::exp(mixture.log_weights[k]);
  double tv = 0.0;
  for (const auto& [supp, d] : diff) tv += std::abs(d);
  tv *= 0.5;

  // within-component term on the shared modal support
  const int km = mixture.modal_component();
  const std::vector<int>& modal = mixture.supports[km];
  if (modal.empty()) return std::min(tv, 1.0);
  for (std::size_t k = 0; k < posterior.supports.size(); ++k) {
    if (posterior.supports[k] != modal) continue;
    if (!posterior.means[k] || !posterior.covs[k]) break;
    const double w1 = std::exp(posterior.log_weights[k]);
    const double w2 = std::exp(mixture.log_weights[km]);
    GaussianPair pair(*posterior.means[k], *posterior.covs[k],
                      mixture.centers[km], mixture.covariances[km]);
    const double db = bhattacharyya(pair);
    // TV >= 1 - BC for the component pair; scaled by the shared mass
    tv += std::min(w1, w2) * (1.0 - std::exp(-db));
    break;
  }
  return std::min(tv, 1.0);
}

std::vector<CredibleInterval> credible_intervals(const SupportMixture& mixture,
                                                 double level) {
  if (level <= 0.0 || level >= 1.0)
    throw ParameterRangeError("credible_intervals: level must be in (0,1)");
  const int km = mixture.modal_component();
  const std::vector<int>& supp = mixture.supports[km];
  // normal quantile by bisection on erf; level is two-sided
  const double target = 0.5 * (1.0 + level);
  double lo = 0.0, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * (1.0 + std::erf(mid / std::sqrt(2.0))) < target)
      lo = mid;
    else
      hi = mid;
  }
  const double z = 0.5 * (lo + hi);

  std::vector<CredibleInterval> out;
  for (std::size_t j = 0; j < supp.size(); ++j) {
    const double c = mixture.centers[km](static_cast<int>(j));
    const double sd =
        std::sqrt(mixture.covariances[km](static_cast<int>(j),
                                          static_cast<int>(j)));
    out.push_back({supp[j], c - z * sd, c + z * sd});
  }
  return out;
}

}  // namespace gsreg
