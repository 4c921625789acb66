#include "gsreg/families.hpp"

#include <cmath>

#include "gsreg/errors.hpp"
#include "gsreg/linalg.hpp"
#include "gsreg/rng.hpp"

namespace gsreg {

std::pair<double, double> correlation_alpha_range(CorrelationKind kind) {
  switch (kind) {
    case CorrelationKind::CS: return {0.0, 1.0};
    case CorrelationKind::AR: return {-1.0, 1.0};
    case CorrelationKind::MA: return {-0.5, 0.5};
  }
  throw ParameterRangeError("unknown correlation kind");
}

void validate_family(const FamilyParams& params) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MissingResponseParams>) {
          require_spd(p.sigma, "MissingResponse Sigma");
        } else if constexpr (std::is_same_v<T, MeasurementErrorParams>) {
          const auto q = p.beta.size();
          if (p.mu.size() != q || p.sigma.rows() != q || p.psi.rows() != q)
            throw ShapeError("MeasurementError: inconsistent q");
          if (p.sigma2 <= 0.0)
            throw ParameterRangeError("MeasurementError: sigma2 must be > 0");
          require_spd(p.sigma, "MeasurementError Sigma");
          require_spd(p.psi, "MeasurementError Psi");
        } else if constexpr (std::is_same_v<T, ParamCorrelationParams>) {
          auto [lo, hi] = correlation_alpha_range(p.kind);
          if (!(p.alpha > lo && p.alpha < hi))
            throw ParameterRangeError(
                "ParamCorrelation: alpha outside its open interval");
          if (p.sigma2 <= 0.0)
            throw ParameterRangeError("ParamCorrelation: sigma2 must be > 0");
        } else if constexpr (std::is_same_v<T, MixedEffectsParams>) {
          require_spd(p.psi, "MixedEffects Psi");
          if (p.sigma2 <= 0.0)
            throw ParameterRangeError("MixedEffects: sigma2 must be > 0");
        } else if constexpr (std::is_same_v<T, GraphicalParams>) {
          require_spd(p.omega, "Graphical Omega");
          const double L = p.truncation;
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.omega);
          if (es.eigenvalues().minCoeff() < 1.0 / L ||
              es.eigenvalues().maxCoeff() > L ||
              p.omega.cwiseAbs().maxCoeff() > L)
            throw ParameterRangeError("Graphical: Omega outside M0+(L)");
        } else if constexpr (std::is_same_v<T, HeteroSplineParams>) {
          if (p.beta.size() != p.basis.dimension())
            throw ShapeError("HeteroSpline: beta length != basis dimension");
          if ((p.beta.array() <= 0.0).any())
            throw ParameterRangeError("HeteroSpline: beta must be positive");
        } else if constexpr (std::is_same_v<T, PartialLinearParams>) {
          if (p.beta.size() != p.basis.dimension())
            throw ShapeError("PartialLinear: beta length != basis dimension");
          if (p.sigma2 <= 0.0)
            throw ParameterRangeError("PartialLinear: sigma2 must be > 0");
        }
      },
      params);
}

Eigen::MatrixXd missing_covariance(const Eigen::MatrixXd& sigma,
                                   const Eigen::VectorXi& pattern) {
  if (pattern.size() != sigma.rows())
    throw ShapeError("missing_covariance: pattern length != Sigma dimension");
  std::vector<int> obs;
  for (int j = 0; j < pattern.size(); ++j)
    if (pattern(j) != 0) obs.push_back(j);
  if (obs.empty())
    throw ShapeError("missing_covariance: all-zero observation pattern");
  const int m = static_cast<int>(obs.size());
  Eigen::MatrixXd out(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) out(a, b) = sigma(obs[a], obs[b]);
  return out;
}

MemGroup mem_assemble(const MeasurementErrorParams& spec,
                      const Eigen::VectorXd& x_star) {
  validate_family(FamilyParams{spec});
  const int q = static_cast<int>(spec.beta.size());
  const int p = static_cast<int>(x_star.size());
  MemGroup g;
  g.xi.resize(q + 1);
  g.xi(0) = spec.alpha + spec.mu.dot(spec.beta);
  g.xi.tail(q) = spec.mu;
  g.delta.resize(q + 1, q + 1);
  const Eigen::VectorXd sb = spec.sigma * spec.beta;
  g.delta(0, 0) = spec.beta.dot(sb) + spec.sigma2;
  g.delta.block(0, 1, 1, q) = sb.transpose();
  g.delta.block(1, 0, q, 1) = sb;
  g.delta.block(1, 1, q, q) = spec.sigma + spec.psi;
  g.x = Eigen::MatrixXd::Zero(q + 1, p);
  g.x.row(0) = x_star.transpose();
  return g;
}

Eigen::MatrixXd correlation_matrix(CorrelationKind kind, double alpha, int m) {
  auto [lo, hi] = correlation_alpha_range(kind);
  if (!(alpha > lo && alpha < hi))
    throw ParameterRangeError("correlation_matrix: alpha outside (" +
                              std::to_string(lo) + "," + std::to_string(hi) +
                              ")");
  if (m < 1) throw ShapeError("correlation_matrix: m must be >= 1");
  Eigen::MatrixXd g(m, m);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      const int d = std::abs(j - k);
      switch (kind) {
        case CorrelationKind::CS: g(j, k) = (d == 0) ? 1.0 : alpha; break;
        case CorrelationKind::AR: g(j, k) = std::pow(alpha, d); break;
        case CorrelationKind::MA:
          g(j, k) = (d == 0) ? 1.0 : (d == 1 ? alpha : 0.0);
          break;
      }
    }
  }
  return g;
}

std::pair<double, double> correlation_eigen_bounds(CorrelationKind kind,
                                                   double alpha, int m) {
  auto [lo, hi] = correlation_alpha_range(kind);
  if (!(alpha > lo && alpha < hi))
    throw ParameterRangeError("correlation_eigen_bounds: alpha out of range");
  const double a = std::abs(alpha);
  switch (kind) {
    case CorrelationKind::CS:
      return {1.0 - alpha, 1.0 + (m - 1) * alpha};
    case CorrelationKind::AR:
      return {(1.0 - alpha * alpha) / ((1.0 + a) * (1.0 + a)),
              (1.0 - alpha * alpha) / ((1.0 - a) * (1.0 - a))};
    case CorrelationKind::MA:
      return {1.0 - 2.0 * a, 1.0 + 2.0 * a};
  }
  throw ParameterRangeError("unknown correlation kind");
}

Eigen::MatrixXd mixed_effects_cov(double sigma2, const Eigen::MatrixXd& z,
                                  const Eigen::MatrixXd& psi) {
  if (sigma2 <= 0.0)
    throw ParameterRangeError("mixed_effects_cov: sigma2 must be > 0");
  if (z.cols() != psi.rows())
    throw ShapeError("mixed_effects_cov: Z/Psi dimension mismatch");
  require_spd(psi, "MixedEffects Psi");
  const int m = static_cast<int>(z.rows());
  return sigma2 * Eigen::MatrixXd::Identity(m, m) + z * psi * z.transpose();
}

Eigen::MatrixXd graphical_delta(const Eigen::MatrixXd& omega) {
  return spd_inverse(omega, "Graphical Omega");
}

double hetero_variance(const Eigen::VectorXd& beta, const SplineBasis& basis,
                       double z) {
  if (beta.size() != basis.dimension())
    throw ShapeError("hetero_variance: beta length != basis dimension");
  return beta.dot(basis.eval(z));
}

double partial_linear_mean(const Eigen::VectorXd& beta,
                           const SplineBasis& basis, double z) {
  if (beta.size() != basis.dimension())
    throw ShapeError("partial_linear_mean: beta length != basis dimension");
  return beta.dot(basis.eval(z));
}

namespace {

double require_meta_z(const Group& g, int i) {
  if (!g.meta.z)
    throw ShapeError("group " + std::to_string(i) + ": missing covariate z");
  if (*g.meta.z < 0.0 || *g.meta.z > 1.0)
    throw ParameterRangeError("group " + std::to_string(i) +
                              ": z outside [0,1]");
  return *g.meta.z;
}

}  // namespace

NuisanceState::NuisanceState(FamilyParams params, const GroupedDataset& data) {
  validate_family(params);
  const int n = data.n();
  xi_.reserve(n);
  delta_.reserve(n);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MissingResponseParams>) {
          for (int i = 0; i < n; ++i) {
            const auto& g = data.group(i);
            if (!g.meta.pattern)
              throw ShapeError("group " + std::to_string(i) +
                               ": missing observation pattern");
            Eigen::MatrixXd d = missing_covariance(p.sigma, *g.meta.pattern);
            if (d.rows() != g.y.size())
              throw ShapeError("group " + std::to_string(i) +
                               ": pattern count != response length");
            xi_.push_back(Eigen::VectorXd::Zero(d.rows()));
            delta_.push_back(std::move(d));
          }
        } else if constexpr (std::is_same_v<T, MeasurementErrorParams>) {
          const int q = static_cast<int>(p.beta.size());
          MemGroup proto = mem_assemble(p, Eigen::VectorXd::Zero(data.p()));
          for (int i = 0; i < n; ++i) {
            if (data.group(i).y.size() != q + 1)
              throw ShapeError("group " + std::to_string(i) +
                               ": measurement-error groups need q+1 rows");
            xi_.push_back(proto.xi);
            delta_.push_back(proto.delta);
          }
        } else if constexpr (std::is_same_v<T, ParamCorrelationParams>) {
          for (int i = 0; i < n; ++i) {
            const int m = static_cast<int>(data.group(i).y.size());
            xi_.push_back(Eigen::VectorXd::Zero(m));
            delta_.push_back(p.sigma2 *
                             correlation_matrix(p.kind, p.alpha, m));
          }
        } else if constexpr (std::is_same_v<T, MixedEffectsParams>) {
          for (int i = 0; i < n; ++i) {
            const auto& g = data.group(i);
            if (!g.meta.random_design)
              throw ShapeError("group " + std::to_string(i) +
                               ": missing random-effect design Z");
            if (g.meta.random_design->rows() != g.y.size())
              throw ShapeError("group " + std::to_string(i) +
                               ": Z row count != response length");
            xi_.push_back(Eigen::VectorXd::Zero(g.y.size()));
            delta_.push_back(
                mixed_effects_cov(p.sigma2, *g.meta.random_design, p.psi));
          }
        } else if constexpr (std::is_same_v<T, GraphicalParams>) {
          Eigen::MatrixXd d = graphical_delta(p.omega);
          for (int i = 0; i < n; ++i) {
            if (data.group(i).y.size() != d.rows())
              throw ShapeError("group " + std::to_string(i) +
                               ": response length != Omega dimension");
            xi_.push_back(Eigen::VectorXd::Zero(d.rows()));
            delta_.push_back(d);
          }
        } else if constexpr (std::is_same_v<T, HeteroSplineParams>) {
          for (int i = 0; i < n; ++i) {
            const auto& g = data.group(i);
            if (g.y.size() != 1)
              throw ShapeError("group " + std::to_string(i) +
                               ": heteroskedastic groups are scalar");
            const double z = require_meta_z(g, i);
            xi_.push_back(Eigen::VectorXd::Zero(1));
            Eigen::MatrixXd d(1, 1);
            d(0, 0) = hetero_variance(p.beta, p.basis, z);
            delta_.push_back(std::move(d));
          }
        } else if constexpr (std::is_same_v<T, PartialLinearParams>) {
          for (int i = 0; i < n; ++i) {
            const auto& g = data.group(i);
            if (g.y.size() != 1)
              throw ShapeError("group " + std::to_string(i) +
                               ": partial-linear groups are scalar");
            const double z = require_meta_z(g, i);
            Eigen::VectorXd xi(1);
            xi(0) = partial_linear_mean(p.beta, p.basis, z);
            xi_.push_back(std::move(xi));
            Eigen::MatrixXd d(1, 1);
            d(0, 0) = p.sigma2;
            delta_.push_back(std::move(d));
          }
        }
      },
      params);
  params_ = std::move(params);
}

NuisanceState NuisanceState::from_moments(std::vector<Eigen::VectorXd> xi,
                                          std::vector<Eigen::MatrixXd> delta) {
  if (xi.size() != delta.size())
    throw ShapeError("NuisanceState: xi/delta count mismatch");
  NuisanceState s;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (xi[i].size() != delta[i].rows())
      throw ShapeError("NuisanceState: xi/delta size mismatch at group " +
                       std::to_string(i));
    require_spd(delta[i], "NuisanceState Delta[" + std::to_string(i) + "]");
  }
  s.xi_ = std::move(xi);
  s.delta_ = std::move(delta);
  return s;
}

namespace {

Eigen::MatrixXd gaussian_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  return m;
}

void normalize_columns(Eigen::MatrixXd& x, double target) {
  for (int j = 0; j < x.cols(); ++j) {
    const double nrm = x.col(j).norm();
    if (nrm > 0.0) x.col(j) *= target / nrm;
  }
}

}  // namespace

GroupedDataset simulate(const FamilyParams& family, const SparseVector& theta0,
                        int n, int p, std::uint64_t seed,
                        const SimulateOptions& opts) {
  validate_family(family);
  if (theta0.ambient_dim() != p)
    throw ShapeError("simulate: theta0 ambient dimension != p");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss;

  // Group shapes and metadata per family.
  std::vector<Group> groups(n);
  std::visit(
      [&](const auto& fp) {
        using T = std::decay_t<decltype(fp)>;
        if constexpr (std::is_same_v<T, MissingResponseParams>) {
          const int m_bar = static_cast<int>(fp.sigma.rows());
          std::bernoulli_distribution obs(opts.obs_prob);
          for (int i = 0; i < n; ++i) {
            Eigen::VectorXi pat;
            if (opts.patterns) {
              pat = opts.patterns->at(i);
            } else {
              pat.resize(m_bar);
              do {
                for (int j = 0; j < m_bar; ++j) pat(j) = obs(rng) ? 1 : 0;
              } while (pat.sum() == 0);  // reject all-missing groups
            }
            groups[i].meta.pattern = pat;
            groups[i].y.resize(pat.sum());
          }
        } else if constexpr (std::is_same_v<T, MeasurementErrorParams>) {
          const int q = static_cast<int>(fp.beta.size());
          for (int i = 0; i < n; ++i) groups[i].y.resize(q + 1);
        } else if constexpr (std::is_same_v<T, MixedEffectsParams>) {
          const int q = static_cast<int>(fp.psi.rows());
          for (int i = 0; i < n; ++i) {
            groups[i].y.resize(opts.group_size);
            groups[i].meta.random_design =
                gaussian_matrix(opts.group_size, q, rng);
          }
        } else if constexpr (std::is_same_v<T, ParamCorrelationParams>) {
          for (int i = 0; i < n; ++i) groups[i].y.resize(opts.group_size);
        } else if constexpr (std::is_same_v<T, GraphicalParams>) {
          const int m_bar = static_cast<int>(fp.omega.rows());
          for (int i = 0; i < n; ++i) groups[i].y.resize(m_bar);
        } else {
          // scalar spline families with equispaced z_i = (i - 1/2)/n
          for (int i = 0; i < n; ++i) {
            groups[i].y.resize(1);
            groups[i].meta.z = (i + 0.5) / n;
          }
        }
      },
      family);

  int n_star = 0;
  for (const auto& g : groups) n_star += static_cast<int>(g.y.size());

  // Design: i.i.d. standard normal entries. For the measurement-error family
  // only the Y* row carries covariates.
  const bool is_mem = std::holds_alternative<MeasurementErrorParams>(family);
  if (is_mem) {
    Eigen::MatrixXd x_star = gaussian_matrix(n, p, rng);
    if (opts.normalize_design)
      normalize_columns(x_star, std::sqrt(static_cast<double>(n_star)));
    const auto& fp = std::get<MeasurementErrorParams>(family);
    const int q = static_cast<int>(fp.beta.size());
    for (int i = 0; i < n; ++i) {
      groups[i].x = Eigen::MatrixXd::Zero(q + 1, p);
      groups[i].x.row(0) = x_star.row(i);
    }
  } else {
    Eigen::MatrixXd x = gaussian_matrix(n_star, p, rng);
    if (opts.normalize_design)
      normalize_columns(x, std::sqrt(static_cast<double>(n_star)));
    int row = 0;
    for (auto& g : groups) {
      const int m = static_cast<int>(g.y.size());
      g.x = x.middleRows(row, m);
      row += m;
    }
  }

  GroupedDataset shell(groups, p);
  NuisanceState eta(family, shell);

  // Responses: Y_i = X_i theta0 + xi_i + chol(Delta_i) z.
  const Eigen::VectorXd theta_dense = theta0.to_dense();
  std::vector<Group> out = shell.groups();
  for (int i = 0; i < n; ++i) {
    const int m = static_cast<int>(out[i].y.size());
    Eigen::VectorXd z(m);
    for (int k = 0; k < m; ++k) z(k) = gauss(rng);
    Eigen::LLT<Eigen::MatrixXd> llt(eta.delta(i));
    out[i].y = out[i].x * theta_dense + eta.xi(i) +
               llt.matrixL().toDenseMatrix() * z;
  }
  return GroupedDataset(std::move(out), p);
}

}  // namespace gsreg
