#include "gsreg/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gsreg/errors.hpp"
#include "gsreg/linalg.hpp"

namespace gsreg {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093453;
}  // namespace

double log_binom(int n, int k) {
  if (k < 0 || k > n) throw ParameterRangeError("log_binom: k out of range");
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double dimension_log_prior(int s, const SpikeSlabSpec& spec) {
  if (s < 0 || s > spec.p)
    throw ParameterRangeError("dimension_log_prior: s outside [0, p]");
  const double log_r = -spec.dim_decay * std::log(static_cast<double>(spec.p));
  // normalizer: log sum_{t=0..p} r^t, computed in log space
  double log_norm;
  if (std::abs(log_r) < 1e-14) {
    log_norm = std::log(spec.p + 1.0);
  } else {
    // log((1 - r^{p+1}) / (1 - r)) with r = exp(log_r) < 1
    const double log_rp1 = (spec.p + 1) * log_r;
    log_norm = std::log1p(-std::exp(log_rp1)) - std::log1p(-std::exp(log_r));
  }
  return s * log_r - log_norm;
}

double slab_log_density(const Eigen::VectorXd& theta_s, double lambda) {
  if (lambda <= 0.0)
    throw ParameterRangeError("slab_log_density: lambda must be > 0");
  return theta_s.size() * std::log(lambda / 2.0) -
         lambda * theta_s.cwiseAbs().sum();
}

std::pair<double, double> lambda_bounds(double x_norm_star, int p, int n,
                                        double l1, double l2, double l3) {
  if (x_norm_star <= 0.0 || l1 <= 0.0 || l3 <= 0.0 || p < 1 || n < 1)
    throw ParameterRangeError("lambda_bounds: invalid inputs");
  const double lo = x_norm_star / (l1 * std::pow(static_cast<double>(p), l2));
  const double hi = l3 * x_norm_star / std::sqrt(static_cast<double>(n));
  if (lo > hi)
    throw ParameterRangeError("lambda_bounds: empty interval (lo > hi)");
  return {lo, hi};
}

double joint_log_prior(const SparseVector& theta, const SpikeSlabSpec& spec) {
  if (theta.ambient_dim() != spec.p)
    throw ShapeError("joint_log_prior: ambient dimension != p");
  const int s = theta.size();
  return dimension_log_prior(s, spec) - log_binom(spec.p, s) +
         slab_log_density(theta.values(), spec.lambda);
}

// ---------------------------------------------------------------------------
// AlphaPrior
// ---------------------------------------------------------------------------

AlphaPrior::AlphaPrior(double b1, double b2, double c1, double c2,
                       int grid_size)
    : b1_(b1), b2_(b2), c1_(c1), c2_(c2) {
  if (!(b1 < b2)) throw ParameterRangeError("AlphaPrior: need b1 < b2");
  if (c1 <= 0.0 || c2 <= 0.0)
    throw ParameterRangeError("AlphaPrior: need c1, c2 > 0");
  if (grid_size < 11) throw ParameterRangeError("AlphaPrior: grid too small");
  grid_.resize(grid_size);
  for (int i = 0; i < grid_size; ++i)
    grid_[i] = b1 + (b2 - b1) * i / (grid_size - 1.0);
  // midpoint quadrature in log space
  const double h = (b2 - b1) / (grid_size - 1.0);
  std::vector<double> log_mass(grid_size - 1);
  double max_lm = kNegInf;
  for (int i = 0; i + 1 < grid_size; ++i) {
    const double mid = 0.5 * (grid_[i] + grid_[i + 1]);
    log_mass[i] = unnorm_log_density(mid);
    max_lm = std::max(max_lm, log_mass[i]);
  }
  double sum = 0.0;
  cdf_.resize(grid_size - 1);
  for (int i = 0; i + 1 < grid_size; ++i) {
    sum += std::exp(log_mass[i] - max_lm);
    cdf_[i] = sum;
  }
  log_normalizer_ = max_lm + std::log(sum * h);
  for (auto& c : cdf_) c /= sum;
}

double AlphaPrior::unnorm_log_density(double alpha) const {
  return -1.0 /
         (std::pow(alpha - b1_, c1_) * std::pow(b2_ - alpha, c2_));
}

double AlphaPrior::log_density(double alpha, bool* out_of_support) const {
  if (out_of_support) *out_of_support = false;
  if (!(alpha > b1_ && alpha < b2_)) {
    if (out_of_support) *out_of_support = true;
    return kNegInf;
  }
  return unnorm_log_density(alpha) - log_normalizer_;
}

double AlphaPrior::sample(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  const std::size_t i =
      std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1);
  const double lo_mass = (i == 0) ? 0.0 : cdf_[i - 1];
  const double cell = cdf_[i] - lo_mass;
  const double frac = (cell > 0.0) ? (u - lo_mass) / cell : 0.5;
  return grid_[i] + frac * (grid_[i + 1] - grid_[i]);
}

// ---------------------------------------------------------------------------
// Scalar priors
// ---------------------------------------------------------------------------

double inverse_gamma_log_density(double x, double shape, double rate) {
  if (shape <= 0.0 || rate <= 0.0)
    throw ParameterRangeError("inverse_gamma: invalid hyperparameters");
  if (x <= 0.0) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) -
         (shape + 1.0) * std::log(x) - rate / x;
}

double inverse_gamma_sample(double shape, double rate, Rng& rng) {
  std::gamma_distribution<double> gamma(shape, 1.0);
  return rate / gamma(rng);
}

double inverse_gaussian_log_density(double x, double mu, double lam) {
  if (mu <= 0.0 || lam <= 0.0)
    throw ParameterRangeError("inverse_gaussian: invalid hyperparameters");
  if (x <= 0.0) return kNegInf;
  const double d = x - mu;
  return 0.5 * (std::log(lam) - kLog2Pi - 3.0 * std::log(x)) -
         lam * d * d / (2.0 * mu * mu * x);
}

double inverse_gaussian_sample(double mu, double lam, Rng& rng) {
  // Michael, Schucany & Haas
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double v = gauss(rng);
  const double y = v * v;
  const double x = mu + mu * mu * y / (2.0 * lam) -
                   mu / (2.0 * lam) *
                       std::sqrt(4.0 * mu * lam * y + mu * mu * y * y);
  if (unif(rng) <= mu / (mu + x)) return x;
  return mu * mu / x;
}

// ---------------------------------------------------------------------------
// Inverse Wishart
// ---------------------------------------------------------------------------

namespace {

double log_multigamma(double a, int q) {
  double out = 0.25 * q * (q - 1) * std::log(M_PI);
  for (int j = 0; j < q; ++j) out += std::lgamma(a - 0.5 * j);
  return out;
}

}  // namespace

double inverse_wishart_log_density(const Eigen::MatrixXd& x, double df,
                                   const Eigen::MatrixXd& scale) {
  const int q = static_cast<int>(scale.rows());
  if (df <= q - 1)
    throw ParameterRangeError("inverse_wishart: df must exceed q - 1");
  if (x.rows() != q) throw ShapeError("inverse_wishart: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) return kNegInf;
  const double log_det_x = spd_log_det(x, "inverse_wishart x");
  const double log_det_scale = spd_log_det(scale, "inverse_wishart scale");
  const double trace = llt.solve(scale).trace();
  return 0.5 * df * log_det_scale - 0.5 * df * q * std::log(2.0) -
         log_multigamma(0.5 * df, q) -
         0.5 * (df + q + 1.0) * log_det_x - 0.5 * trace;
}

Eigen::MatrixXd inverse_wishart_sample(double df, const Eigen::MatrixXd& scale,
                                       Rng& rng) {
  const int q = static_cast<int>(scale.rows());
  if (df <= q - 1)
    throw ParameterRangeError("inverse_wishart: df must exceed q - 1");
  // Bartlett draw of W ~ Wishart(df, scale^{-1}); return W^{-1}.
  const Eigen::MatrixXd inv_scale = spd_inverse(scale, "inverse_wishart scale");
  const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(inv_scale).matrixL();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(q, q);
  std::normal_distribution<double> gauss;
  for (int i = 0; i < q; ++i) {
    std::chi_squared_distribution<double> chi2(df - i);
    a(i, i) = std::sqrt(chi2(rng));
    for (int j = 0; j < i; ++j) a(i, j) = gauss(rng);
  }
  const Eigen::MatrixXd la = l * a;
  const Eigen::MatrixXd w = la * la.transpose();
  return spd_inverse(w, "inverse_wishart draw");
}

// ---------------------------------------------------------------------------
// Graphical prior
// ---------------------------------------------------------------------------

double graphical_log_prior(const Eigen::MatrixXd& omega,
                           const GraphicalPriorSpec& spec,
                           bool* out_of_support) {
  if (out_of_support) *out_of_support = false;
  const int m = static_cast<int>(omega.rows());
  const double L = spec.truncation;
  if (!is_symmetric(omega) || omega.cwiseAbs().maxCoeff() > L) {
    if (out_of_support) *out_of_support = true;
    return kNegInf;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(omega);
  if (es.eigenvalues().minCoeff() < 1.0 / L ||
      es.eigenvalues().maxCoeff() > L) {
    if (out_of_support) *out_of_support = true;
    return kNegInf;
  }
  const int max_edges = m * (m - 1) / 2;
  int r = 0;
  double log_dens = 0.0;
  for (int j = 0; j < m; ++j) {
    // f2: normal on the diagonal
    log_dens += -0.5 * (kLog2Pi + 2.0 * std::log(spec.diag_sd)) -
                0.5 * omega(j, j) * omega(j, j) / (spec.diag_sd * spec.diag_sd);
    for (int k = j + 1; k < m; ++k) {
      if (omega(j, k) != 0.0) {
        ++r;
        // f1: exponential on the magnitude
        log_dens += std::log(spec.offdiag_rate) -
                    spec.offdiag_rate * std::abs(omega(j, k));
      }
    }
  }
  // binomial edge pattern given |Upsilon| = r, and the size prior
  // Pi(|Upsilon| = r) proportional to exp(-r log max(r, 2)).
  log_dens += r * std::log(spec.varpi) +
              (max_edges - r) * std::log1p(-spec.varpi);
  double size_norm = 0.0;
  for (int t = 0; t <= max_edges; ++t)
    size_norm += std::exp(-t * std::log(std::max(t, 2) + 0.0));
  log_dens += -r * std::log(std::max(r, 2) + 0.0) - std::log(size_norm);
  return log_dens;
}

// ---------------------------------------------------------------------------
// Per-family dispatch
// ---------------------------------------------------------------------------

namespace {

double normal_log_density(double x, double sd) {
  return -0.5 * (kLog2Pi + 2.0 * std::log(sd)) - 0.5 * x * x / (sd * sd);
}

Eigen::MatrixXd iw_scale_or_identity(const NuisancePriorSpec& spec, int q) {
  if (spec.iw_scale.size() == 0) return Eigen::MatrixXd::Identity(q, q);
  if (spec.iw_scale.rows() != q)
    throw ShapeError("NuisancePriorSpec: iw_scale dimension mismatch");
  return spec.iw_scale;
}

}  // namespace

double nuisance_prior_log_density(const FamilyParams& params,
                                  const NuisancePriorSpec& spec,
                                  bool* out_of_support) {
  if (out_of_support) *out_of_support = false;
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MissingResponseParams>) {
          const int q = static_cast<int>(p.sigma.rows());
          return inverse_wishart_log_density(p.sigma, spec.iw_df,
                                             iw_scale_or_identity(spec, q));
        } else if constexpr (std::is_same_v<T, MeasurementErrorParams>) {
          if (p.sigma2 <= 0.0) {
            if (out_of_support) *out_of_support = true;
            return kNegInf;
          }
          const int q = static_cast<int>(p.beta.size());
          double out = normal_log_density(p.alpha, spec.normal_sd);
          for (int j = 0; j < q; ++j) {
            out += normal_log_density(p.beta(j), spec.normal_sd);
            out += normal_log_density(p.mu(j), spec.normal_sd);
          }
          out += inverse_gamma_log_density(p.sigma2, spec.ig_shape,
                                           spec.ig_rate);
          out += inverse_wishart_log_density(p.sigma, spec.iw_df,
                                             iw_scale_or_identity(spec, q));
          return out;
        } else if constexpr (std::is_same_v<T, ParamCorrelationParams>) {
          if (p.sigma2 <= 0.0) {
            if (out_of_support) *out_of_support = true;
            return kNegInf;
          }
          auto [b1, b2] = correlation_alpha_range(p.kind);
          AlphaPrior alpha_prior(b1, b2, spec.alpha_c1, spec.alpha_c2);
          bool oos = false;
          double out = alpha_prior.log_density(p.alpha, &oos);
          if (oos) {
            if (out_of_support) *out_of_support = true;
            return kNegInf;
          }
          return out + inverse_gamma_log_density(p.sigma2, spec.ig_shape,
                                                 spec.ig_rate);
        } else if constexpr (std::is_same_v<T, MixedEffectsParams>) {
          const int q = static_cast<int>(p.psi.rows());
          return inverse_wishart_log_density(p.psi, spec.iw_df,
                                             iw_scale_or_identity(spec, q));
        } else if constexpr (std::is_same_v<T, GraphicalParams>) {
          GraphicalPriorSpec gspec = spec.graphical;
          gspec.truncation = p.truncation;
          bool oos = false;
          const double out = graphical_log_prior(p.omega, gspec, &oos);
          if (oos && out_of_support) *out_of_support = true;
          return out;
        } else if constexpr (std::is_same_v<T, HeteroSplineParams>) {
          double out = 0.0;
          for (int j = 0; j < p.beta.size(); ++j) {
            if (p.beta(j) <= 0.0) {
              if (out_of_support) *out_of_support = true;
              return kNegInf;
            }
            out += inverse_gaussian_log_density(p.beta(j), spec.igauss_mean,
                                                spec.igauss_shape);
          }
          return out;
        } else if constexpr (std::is_same_v<T, PartialLinearParams>) {
          if (p.sigma2 <= 0.0) {
            if (out_of_support) *out_of_support = true;
            return kNegInf;
          }
          double out = 0.0;
          for (int j = 0; j < p.beta.size(); ++j)
            out += normal_log_density(p.beta(j), spec.normal_sd);
          return out + inverse_gamma_log_density(p.sigma2, spec.ig_shape,
                                                 spec.ig_rate);
        }
      },
      params);
}

FamilyParams nuisance_prior_sample(const FamilyParams& like,
                                   const NuisancePriorSpec& spec, Rng& rng) {
  std::normal_distribution<double> gauss;
  return std::visit(
      [&](const auto& p) -> FamilyParams {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MissingResponseParams>) {
          const int q = static_cast<int>(p.sigma.rows());
          return MissingResponseParams{inverse_wishart_sample(
              spec.iw_df, iw_scale_or_identity(spec, q), rng)};
        } else if constexpr (std::is_same_v<T, MeasurementErrorParams>) {
          const int q = static_cast<int>(p.beta.size());
          MeasurementErrorParams out = p;
          out.alpha = spec.normal_sd * gauss(rng);
          for (int j = 0; j < q; ++j) {
            out.beta(j) = spec.normal_sd * gauss(rng);
            out.mu(j) = spec.normal_sd * gauss(rng);
          }
          out.sigma2 = inverse_gamma_sample(spec.ig_shape, spec.ig_rate, rng);
          out.sigma = inverse_wishart_sample(spec.iw_df,
                                             iw_scale_or_identity(spec, q),
                                             rng);
          return out;  // psi stays fixed: it is known
        } else if constexpr (std::is_same_v<T, ParamCorrelationParams>) {
          auto [b1, b2] = correlation_alpha_range(p.kind);
          AlphaPrior alpha_prior(b1, b2, spec.alpha_c1, spec.alpha_c2);
          ParamCorrelationParams out = p;
          out.alpha = alpha_prior.sample(rng);
          out.sigma2 = inverse_gamma_sample(spec.ig_shape, spec.ig_rate, rng);
          return out;
        } else if constexpr (std::is_same_v<T, MixedEffectsParams>) {
          const int q = static_cast<int>(p.psi.rows());
          MixedEffectsParams out = p;
          out.psi = inverse_wishart_sample(spec.iw_df,
                                           iw_scale_or_identity(spec, q), rng);
          return out;  // sigma2 stays fixed: it is known
        } else if constexpr (std::is_same_v<T, GraphicalParams>) {
          // rejection sampling from the truncated prior, keeping the edge
          // pattern machinery simple: draw pattern size, pattern, entries
          const int m = static_cast<int>(p.omega.rows());
          const int max_edges = m * (m - 1) / 2;
          const GraphicalPriorSpec& g = spec.graphical;
          std::uniform_real_distribution<double> unif(0.0, 1.0);
          std::exponential_distribution<double> expo(g.offdiag_rate);
          for (int attempt = 0; attempt < 10000; ++attempt) {
            // size prior proportional to exp(-r log max(r,2))
            std::vector<double> wts(max_edges + 1);
            for (int t = 0; t <= max_edges; ++t)
              wts[t] = std::exp(-t * std::log(std::max(t, 2) + 0.0));
            std::discrete_distribution<int> size_dist(wts.begin(), wts.end());
            const int r = size_dist(rng);
            std::vector<int> edges(max_edges);
            std::iota(edges.begin(), edges.end(), 0);
            std::shuffle(edges.begin(), edges.end(), rng);
            Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(m, m);
            for (int j = 0; j < m; ++j)
              omega(j, j) = std::abs(g.diag_sd * gauss(rng));
            for (int e = 0; e < r; ++e) {
              int idx = edges[e], j = 0;
              while (idx >= m - 1 - j) idx -= m - 1 - j, ++j;
              const int k = j + 1 + idx;
              const double sign = unif(rng) < 0.5 ? -1.0 : 1.0;
              omega(j, k) = omega(k, j) = sign * expo(rng);
            }
            bool oos = false;
            GraphicalPriorSpec gs = g;
            gs.truncation = p.truncation;
            (void)graphical_log_prior(omega, gs, &oos);
            if (!oos) {
              GraphicalParams out = p;
              out.omega = omega;
              return out;
            }
          }
          throw std::runtime_error(
              "graphical prior sampler: rejection budget exhausted");
        } else if constexpr (std::is_same_v<T, HeteroSplineParams>) {
          HeteroSplineParams out = p;
          for (int j = 0; j < out.beta.size(); ++j)
            out.beta(j) = inverse_gaussian_sample(spec.igauss_mean,
                                                  spec.igauss_shape, rng);
          return out;
        } else if constexpr (std::is_same_v<T, PartialLinearParams>) {
          PartialLinearParams out = p;
          for (int j = 0; j < out.beta.size(); ++j)
            out.beta(j) = spec.normal_sd * gauss(rng);
          out.sigma2 = inverse_gamma_sample(spec.ig_shape, spec.ig_rate, rng);
          return out;
        }
      },
      like);
}

}  // namespace gsreg
