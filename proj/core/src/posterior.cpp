#include "gsreg/posterior.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "gsreg/errors.hpp"
#include "gsreg/model.hpp"
#include "gsreg/rng.hpp"

namespace gsreg {

namespace {

double log_sum_exp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

void normalize_log_weights(std::vector<double>& lw) {
  const double z = log_sum_exp(lw);
  for (double& x : lw) x -= z;
}

Eigen::VectorXd inclusion_from(const std::vector<std::vector<int>>& supports,
                               const std::vector<double>& log_weights, int p) {
  Eigen::VectorXd incl = Eigen::VectorXd::Zero(p);
  for (std::size_t k = 0; k < supports.size(); ++k) {
    const double w = std::exp(log_weights[k]);
    for (int j : supports[k]) incl(j) += w;
  }
  return incl;
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

void check_budget(int p, int s_max, std::int64_t budget) {
  std::int64_t total = 0;
  for (int s = 0; s <= s_max; ++s) {
    total += n_choose_k(p, s);
    if (total > budget)
      throw BudgetError("support enumeration budget exceeded (p = " +
                        std::to_string(p) + ", s_max = " + std::to_string(s_max) +
                        ")");
  }
}

/// Visits all subsets of {0..p-1} of size 0..s_max in lexicographic order.
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

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x,
                               const std::vector<int>& support) {
  Eigen::MatrixXd out(x.rows(), support.size());
  for (std::size_t k = 0; k < support.size(); ++k)
    out.col(k) = x.col(support[k]);
  return out;
}

}  // namespace

int SupportPosterior::modal_support() const {
  int best = 0;
  for (std::size_t k = 1; k < log_weights.size(); ++k)
    if (log_weights[k] > log_weights[best]) best = static_cast<int>(k);
  return best;
}

double SupportPosterior::weight_of(const std::vector<int>& support) const {
  for (std::size_t k = 0; k < supports.size(); ++k)
    if (supports[k] == support) return std::exp(log_weights[k]);
  return 0.0;
}

SupportPosterior enumerate_posterior_normal_slab(const GroupedDataset& data,
                                                 const SpikeSlabSpec& spec,
                                                 const NuisanceState& eta_fixed,
                                                 int s_max,
                                                 const EnumerationOptions& opts) {
  const int p = data.p();
  if (s_max < 0 || s_max > p)
    throw ParameterRangeError("enumerate_posterior_normal_slab: bad s_max");
  check_budget(p, s_max, opts.budget);

  const WhitenedDesign wd = whiten(data, eta_fixed);
  const Eigen::MatrixXd& xt = wd.x_tilde;
  const Eigen::VectorXd& y = wd.u;  // whitened response, theta0 = 0
  const double kappa = opts.slab_precision;

  SupportPosterior post;
  for_each_support(p, s_max, [&](const std::vector<int>& supp) {
    const int s = static_cast<int>(supp.size());
    double log_ml;
    std::optional<Eigen::VectorXd> mean;
    std::optional<Eigen::MatrixXd> cov;
    if (s == 0) {
      log_ml = -0.5 * y.squaredNorm();
    } else {
      const Eigen::MatrixXd xs = select_columns(xt, supp);
      Eigen::MatrixXd a = xs.transpose() * xs;
      a.diagonal().array() += kappa;
      Eigen::LLT<Eigen::MatrixXd> llt(a);
      if (llt.info() != Eigen::Success) {
        a.diagonal().array() += opts.ridge * a.diagonal().maxCoeff();
        llt.compute(a);
        if (llt.info() != Eigen::Success)
          throw NotSpdError("normal-slab Gram not factorizable");
      }
      const Eigen::VectorXd b = xs.transpose() * y;
      const Eigen::VectorXd m = llt.solve(b);
      double logdet_a = 0.0;
      for (int i = 0; i < s; ++i)
        logdet_a += 2.0 * std::log(llt.matrixL()(i, i));
      log_ml = -0.5 * (logdet_a - s * std::log(kappa)) -
               0.5 * (y.squaredNorm() - b.dot(m));
      mean = m;
      cov = llt.solve(Eigen::MatrixXd::Identity(s, s));
    }
    post.supports.push_back(supp);
    post.log_weights.push_back(dimension_log_prior(s, spec) - log_binom(p, s) +
                               log_ml);
    post.means.push_back(std::move(mean));
    post.covs.push_back(std::move(cov));
  });
  normalize_log_weights(post.log_weights);
  post.inclusion_probs = inclusion_from(post.supports, post.log_weights, p);
  return post;
}

namespace {

struct GaussLegendre {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;
};

/// Newton iteration on Legendre polynomials; standard construction.
GaussLegendre gauss_legendre(int n) {
  GaussLegendre out;
  out.nodes.resize(n);
  out.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    out.nodes[i] = -x;
    out.nodes[n - 1 - i] = x;
    out.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    out.weights[n - 1 - i] = out.weights[i];
  }
  return out;
}

/// 1-d quadrature rule on [lo, hi], split at zero so the |theta| kink sits on
/// a panel boundary.
void panel_rule(double lo, double hi, int pts_per_panel,
                std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.clear();
  weights.clear();
  const GaussLegendre gl = gauss_legendre(pts_per_panel);
  std::vector<std::pair<double, double>> panels;
  if (lo < 0.0 && hi > 0.0) {
    panels.emplace_back(lo, 0.0);
    panels.emplace_back(0.0, hi);
  } else {
    panels.emplace_back(lo, hi);
  }
  for (auto [a, b] : panels) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < pts_per_panel; ++i) {
      nodes.push_back(mid + half * gl.nodes[i]);
      weights.push_back(half * gl.weights[i]);
    }
  }
}

struct QuadResult {
  double log_integral;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Tensor quadrature of exp(-1/2 (th - c)^T G (th - c) - lam ||th||_1 + shift)
/// over the box c_k +/- hw_k; moments accumulated alongside. The inner loop
/// stays on the stack (dimension <= 3 by contract).
QuadResult laplace_box_quadrature(const Eigen::MatrixXd& g,
                                  const Eigen::VectorXd& c,
                                  const Eigen::VectorXd& hw, double lambda,
                                  int pts_per_panel) {
  const int s = static_cast<int>(c.size());
  std::vector<std::vector<double>> nodes(s), weights(s);
  for (int k = 0; k < s; ++k)
    panel_rule(c(k) - hw(k), c(k) + hw(k), pts_per_panel, nodes[k], weights[k]);

  double gm[4][4], cc[4], th[4], d[4];
  for (int a = 0; a < s; ++a) {
    cc[a] = c(a);
    for (int b = 0; b < s; ++b) gm[a][b] = g(a, b);
  }
  const double shift = lambda * c.cwiseAbs().sum();
  double m0 = 0.0, m1[4] = {0, 0, 0, 0}, m2[4][4] = {};

  std::size_t idx[4] = {0, 0, 0, 0};
  while (true) {
    double w = 1.0, abs_sum = 0.0;
    for (int k = 0; k < s; ++k) {
      th[k] = nodes[k][idx[k]];
      d[k] = th[k] - cc[k];
      abs_sum += std::abs(th[k]);
      w *= weights[k][idx[k]];
    }
    double quad = 0.0;
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b) quad += gm[a][b] * d[a] * d[b];
    const double f = w * std::exp(-0.5 * quad - lambda * abs_sum + shift);
    m0 += f;
    for (int a = 0; a < s; ++a) {
      m1[a] += f * th[a];
      for (int b = 0; b < s; ++b) m2[a][b] += f * th[a] * th[b];
    }
    int k = 0;
    while (k < s && ++idx[k] == nodes[k].size()) idx[k++] = 0;
    if (k == s) break;
  }
  QuadResult out;
  out.log_integral = std::log(m0) - shift;
  out.mean.resize(s);
  out.cov.resize(s, s);
  for (int a = 0; a < s; ++a) out.mean(a) = m1[a] / m0;
  for (int a = 0; a < s; ++a)
    for (int b = 0; b < s; ++b)
      out.cov(a, b) = m2[a][b] / m0 - out.mean(a) * out.mean(b);
  return out;
}

}  // namespace

SupportPosterior enumerate_posterior_laplace_slab(
    const GroupedDataset& data, const SpikeSlabSpec& spec,
    const NuisanceState& eta_fixed, int s_max, const QuadratureOptions& opts) {
  const int p = data.p();
  if (s_max < 0 || s_max > p)
    throw ParameterRangeError("enumerate_posterior_laplace_slab: bad s_max");
  if (s_max > 3)
    throw ParameterRangeError(
        "enumerate_posterior_laplace_slab: quadrature supports s_max <= 3");
  check_budget(p, s_max, opts.budget);

  const WhitenedDesign wd = whiten(data, eta_fixed);
  const Eigen::MatrixXd& xt = wd.x_tilde;
  const Eigen::VectorXd& y = wd.u;
  const double lambda = spec.lambda;
  const double log_half_lambda = std::log(lambda / 2.0);

  SupportPosterior post;
  for_each_support(p, s_max, [&](const std::vector<int>& supp) {
    const int s = static_cast<int>(supp.size());
    double log_evid;
    std::optional<Eigen::VectorXd> mean;
    std::optional<Eigen::MatrixXd> cov;
    if (s == 0) {
      log_evid = -0.5 * y.squaredNorm();
    } else {
      const Eigen::MatrixXd xs = select_columns(xt, supp);
      Eigen::MatrixXd g = xs.transpose() * xs;
      Eigen::LLT<Eigen::MatrixXd> llt(g);
      if (llt.info() != Eigen::Success) {
        g.diagonal().array() += 1e-10 * std::max(g.diagonal().maxCoeff(), 1.0);
        llt.compute(g);
        if (llt.info() != Eigen::Success)
          throw NotSpdError("Laplace-slab Gram not factorizable");
      }
      const Eigen::VectorXd b = xs.transpose() * y;
      const Eigen::VectorXd center = llt.solve(b);
      const Eigen::MatrixXd ginv = llt.solve(Eigen::MatrixXd::Identity(s, s));
      const Eigen::VectorXd hw =
          opts.half_width_sds * ginv.diagonal().cwiseSqrt();
      const double log_resid = -0.5 * (y.squaredNorm() - b.dot(center));

      int pts = 16;
      QuadResult q = laplace_box_quadrature(g, center, hw, lambda, pts);
      while (pts < opts.max_points_per_dim) {
        const QuadResult q2 =
            laplace_box_quadrature(g, center, hw, lambda, pts * 2);
        const double change = std::abs(q2.log_integral - q.log_integral);
        q = q2;
        pts *= 2;
        if (change < opts.rel_tol) break;
      }
      log_evid = log_resid + q.log_integral + s * log_half_lambda;
      mean = q.mean;
      cov = q.cov;
    }
    post.supports.push_back(supp);
    post.log_weights.push_back(dimension_log_prior(s, spec) - log_binom(p, s) +
                               log_evid);
    post.means.push_back(std::move(mean));
    post.covs.push_back(std::move(cov));
  });
  normalize_log_weights(post.log_weights);
  post.inclusion_probs = inclusion_from(post.supports, post.log_weights, p);
  return post;
}

// ---------------------------------------------------------------------------
// Reversible-jump sampler
// ---------------------------------------------------------------------------

namespace {

struct GroupCache {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double logdet = 0.0;
  Eigen::VectorXd resid;
  double quad = 0.0;
};

constexpr double kLog2Pi = 1.8378770664093453;

double quad_form(const Eigen::LLT<Eigen::MatrixXd>& llt,
                 const Eigen::VectorXd& r) {
  return r.dot(llt.solve(r));
}

/// Cached likelihood state for the sampler. All-scalar groups (m_i = 1, the
/// common high-replication setting) use a vectorized path with no per-move
/// heap traffic; other datasets use per-group Cholesky caches.
struct LikCache {
  bool scalar = false;
  Eigen::VectorXd inv_delta;  // scalar mode, length n
  Eigen::VectorXd resid;      // scalar mode
  Eigen::VectorXd scratch;    // scalar mode, proposal residual
  Eigen::MatrixXd x;          // scalar mode, n x p stacked rows
  double const_term = 0.0;    // scalar mode, theta-independent part
  std::vector<GroupCache> groups;  // general mode
  double loglik = 0.0;
};

LikCache build_cache(const GroupedDataset& data, const Eigen::VectorXd& theta,
                     const NuisanceState& eta) {
  LikCache cache;
  cache.scalar = true;
  for (int i = 0; i < data.n(); ++i)
    if (data.group(i).y.size() != 1) {
      cache.scalar = false;
      break;
    }
  if (cache.scalar) {
    const int n = data.n();
    cache.inv_delta.resize(n);
    cache.resid.resize(n);
    cache.scratch.resize(n);
    cache.x.resize(n, data.p());
    cache.const_term = 0.0;
    for (int i = 0; i < n; ++i) {
      const double delta = eta.delta(i)(0, 0);
      if (delta <= 0.0)
        throw NotSpdError("group covariance not SPD in sampler");
      cache.inv_delta(i) = 1.0 / delta;
      cache.const_term -= 0.5 * (kLog2Pi + std::log(delta));
      cache.x.row(i) = data.group(i).x.row(0);
      cache.resid(i) = data.group(i).y(0) - eta.xi(i)(0);
    }
    cache.resid.noalias() -= cache.x * theta;
    cache.loglik =
        cache.const_term -
        0.5 * cache.resid.cwiseAbs2().dot(cache.inv_delta);
    return cache;
  }
  cache.groups.resize(data.n());
  double ll = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const Group& gr = data.group(i);
    GroupCache& gc = cache.groups[i];
    gc.llt.compute(eta.delta(i));
    if (gc.llt.info() != Eigen::Success)
      throw NotSpdError("group covariance not SPD in sampler");
    gc.logdet = 0.0;
    for (int k = 0; k < gr.y.size(); ++k)
      gc.logdet += 2.0 * std::log(gc.llt.matrixL()(k, k));
    gc.resid = gr.y - gr.x * theta - eta.xi(i);
    gc.quad = quad_form(gc.llt, gc.resid);
    ll += -0.5 * (gr.y.size() * kLog2Pi + gc.logdet + gc.quad);
  }
  cache.loglik = ll;
  return cache;
}

/// Log-likelihood after changing theta on at most two coordinates. Scalar
/// mode leaves the proposed residual in `scratch`; general mode fills
/// new_quads. Either way apply_shift commits the same proposal.
double loglik_after_shift(const GroupedDataset& data, LikCache& cache, int j1,
                          double d1, int j2, double d2,
                          std::vector<double>& new_quads) {
  if (cache.scalar) {
    cache.scratch = cache.resid;
    if (j1 >= 0 && d1 != 0.0) cache.scratch.noalias() -= cache.x.col(j1) * d1;
    if (j2 >= 0 && d2 != 0.0) cache.scratch.noalias() -= cache.x.col(j2) * d2;
    return cache.const_term -
           0.5 * cache.scratch.cwiseAbs2().dot(cache.inv_delta);
  }
  new_quads.resize(data.n());
  double ll = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const Group& gr = data.group(i);
    const GroupCache& gc = cache.groups[i];
    Eigen::VectorXd r = gc.resid;
    if (j1 >= 0 && d1 != 0.0) r.noalias() -= gr.x.col(j1) * d1;
    if (j2 >= 0 && d2 != 0.0) r.noalias() -= gr.x.col(j2) * d2;
    new_quads[i] = quad_form(gc.llt, r);
    ll += -0.5 * (gr.y.size() * kLog2Pi + gc.logdet + new_quads[i]);
  }
  return ll;
}

void apply_shift(const GroupedDataset& data, LikCache& cache, int j1, double d1,
                 int j2, double d2, const std::vector<double>& new_quads,
                 double new_loglik) {
  if (cache.scalar) {
    cache.resid.swap(cache.scratch);
    cache.loglik = new_loglik;
    return;
  }
  for (int i = 0; i < data.n(); ++i) {
    GroupCache& gc = cache.groups[i];
    if (j1 >= 0 && d1 != 0.0)
      gc.resid.noalias() -= data.group(i).x.col(j1) * d1;
    if (j2 >= 0 && d2 != 0.0)
      gc.resid.noalias() -= data.group(i).x.col(j2) * d2;
    gc.quad = new_quads[i];
  }
  cache.loglik = new_loglik;
}

// --- unconstrained reparameterization helpers ------------------------------

/// Random walk on the log-Cholesky parameterization of an SPD matrix.
/// Returns the proposal and the log Jacobian-ratio correction
/// sum_i (q - i + 2) (log L'_ii - log L_ii), i 1-based.
std::pair<Eigen::MatrixXd, double> chol_log_walk(const Eigen::MatrixXd& spd,
                                                 double step, Rng& rng) {
  const int q = static_cast<int>(spd.rows());
  Eigen::LLT<Eigen::MatrixXd> llt(spd);
  Eigen::MatrixXd l = llt.matrixL();
  std::normal_distribution<double> norm(0.0, step);
  double log_jac = 0.0;
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < i; ++j) l(i, j) += norm(rng);
    const double old_log = std::log(l(i, i));
    const double new_log = old_log + norm(rng);
    l(i, i) = std::exp(new_log);
    log_jac += (q - i + 1) * (new_log - old_log);  // exponent q - (i+1) + 2
  }
  return {l * l.transpose(), log_jac};
}

std::pair<double, double> log_scale_walk(double x, double step, Rng& rng) {
  std::normal_distribution<double> norm(0.0, step);
  const double lx = std::log(x) + norm(rng);
  return {std::exp(lx), lx - std::log(x)};
}

std::pair<double, double> logit_walk(double x, double lo, double hi,
                                     double step, Rng& rng) {
  std::normal_distribution<double> norm(0.0, step);
  const double t = std::log((x - lo) / (hi - x)) + norm(rng);
  const double y = lo + (hi - lo) / (1.0 + std::exp(-t));
  const double log_jac =
      std::log((y - lo) * (hi - y)) - std::log((x - lo) * (hi - x));
  return {y, log_jac};
}

struct EtaProposal {
  FamilyParams params;
  double log_hastings = 0.0;  ///< log q(back)/q(fwd) incl. Jacobians
};

EtaProposal propose_eta(const FamilyParams& cur, double step, Rng& rng) {
  std::normal_distribution<double> norm(0.0, step);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  EtaProposal out{cur, 0.0};

  if (const auto* mr = std::get_if<MissingResponseParams>(&cur)) {
    MissingResponseParams next = *mr;
    auto [sigma, lj] = chol_log_walk(mr->sigma, step, rng);
    next.sigma = sigma;
    out = {next, lj};
  } else if (const auto* mem = std::get_if<MeasurementErrorParams>(&cur)) {
    MeasurementErrorParams next = *mem;
    std::uniform_int_distribution<int> pick(0, 4);
    switch (pick(rng)) {
      case 0:
        next.alpha += norm(rng);
        out = {next, 0.0};
        break;
      case 1:
        for (int k = 0; k < next.beta.size(); ++k) next.beta(k) += norm(rng);
        out = {next, 0.0};
        break;
      case 2:
        for (int k = 0; k < next.mu.size(); ++k) next.mu(k) += norm(rng);
        out = {next, 0.0};
        break;
      case 3: {
        auto [s2, lj] = log_scale_walk(next.sigma2, step, rng);
        next.sigma2 = s2;
        out = {next, lj};
        break;
      }
      default: {
        auto [sigma, lj] = chol_log_walk(next.sigma, step, rng);
        next.sigma = sigma;
        out = {next, lj};
      }
    }
  } else if (const auto* pc = std::get_if<ParamCorrelationParams>(&cur)) {
    ParamCorrelationParams next = *pc;
    if (unif(rng) < 0.5) {
      const auto [lo, hi] = correlation_alpha_range(pc->kind);
      auto [a, lj] = logit_walk(next.alpha, lo, hi, step, rng);
      next.alpha = a;
      out = {next, lj};
    } else {
      auto [s2, lj] = log_scale_walk(next.sigma2, step, rng);
      next.sigma2 = s2;
      out = {next, lj};
    }
  } else if (const auto* me = std::get_if<MixedEffectsParams>(&cur)) {
    MixedEffectsParams next = *me;  // sigma2 known, held fixed
    auto [psi, lj] = chol_log_walk(me->psi, step, rng);
    next.psi = psi;
    out = {next, lj};
  } else if (const auto* gp = std::get_if<GraphicalParams>(&cur)) {
    GraphicalParams next = *gp;
    const int m = static_cast<int>(next.omega.rows());
    if (m == 1 || unif(rng) < 0.3) {
      std::uniform_int_distribution<int> pick(0, m - 1);
      const int j = pick(rng);
      auto [d, lj] = log_scale_walk(next.omega(j, j), step, rng);
      next.omega(j, j) = d;
      out = {next, lj};
    } else {
      // off-diagonal edge move: add when absent; delete or walk when present
      std::uniform_int_distribution<int> pick(0, m - 1);
      int j = pick(rng), k = pick(rng);
      while (k == j) k = pick(rng);
      const double cur_val = next.omega(j, k);
      if (cur_val == 0.0) {
        const double v = norm(rng);
        next.omega(j, k) = next.omega(k, j) = v;
        // forward: phi(v); backward: delete picked with prob 1/2
        const double log_phi = -0.5 * v * v / (step * step) -
                               std::log(step) - 0.5 * kLog2Pi;
        out = {next, std::log(0.5) - log_phi};
      } else if (unif(rng) < 0.5) {
        next.omega(j, k) = next.omega(k, j) = 0.0;
        const double log_phi = -0.5 * cur_val * cur_val / (step * step) -
                               std::log(step) - 0.5 * kLog2Pi;
        out = {next, log_phi - std::log(0.5)};
      } else {
        const double v = cur_val + norm(rng);
        next.omega(j, k) = next.omega(k, j) = v;
        out = {next, 0.0};  // symmetric walk on a present edge
      }
    }
  } else if (const auto* hs = std::get_if<HeteroSplineParams>(&cur)) {
    HeteroSplineParams next = *hs;
    std::uniform_int_distribution<int> pick(0,
                                            static_cast<int>(next.beta.size()) - 1);
    const int j = pick(rng);
    auto [b, lj] = log_scale_walk(next.beta(j), step, rng);
    next.beta(j) = b;
    out = {next, lj};
  } else if (const auto* pl = std::get_if<PartialLinearParams>(&cur)) {
    PartialLinearParams next = *pl;
    if (unif(rng) < 0.5) {
      std::uniform_int_distribution<int> pick(
          0, static_cast<int>(next.beta.size()) - 1);
      next.beta(pick(rng)) += norm(rng);
      out = {next, 0.0};
    } else {
      auto [s2, lj] = log_scale_walk(next.sigma2, step, rng);
      next.sigma2 = s2;
      out = {next, lj};
    }
  }
  return out;
}

}  // namespace

McmcChain rjmcmc_sample(const GroupedDataset& data, const SpikeSlabSpec& spec,
                        const NuisancePriorSpec& eta_prior,
                        const McmcState& init, std::uint64_t seed,
                        const McmcOptions& opts, bool fix_eta) {
  const int p = data.p();
  if (spec.p != p)
    throw ShapeError("rjmcmc_sample: prior dimension does not match data");
  Rng rng = make_rng(seed, 0x6d63);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> std_norm(0.0, 1.0);
  std::uniform_int_distribution<int> pick_coord(0, p - 1);

  // current state
  Eigen::VectorXd theta = init.theta.to_dense();
  if (theta.size() != p) throw ShapeError("rjmcmc_sample: init dimension");
  std::vector<int> active = init.theta.support();
  std::vector<char> is_active(p, 0);
  for (int j : active) is_active[j] = 1;

  FamilyParams eta = init.eta;
  NuisanceState eta_state(eta, data);
  LikCache cache = build_cache(data, theta, eta_state);
  double lp_theta = joint_log_prior(SparseVector::from_dense(theta), spec);
  double lp_eta = fix_eta ? 0.0 : nuisance_prior_log_density(eta, eta_prior);
  if (!std::isfinite(lp_eta))
    throw ParameterRangeError("rjmcmc_sample: init eta outside prior support");
  auto loglik = [&]() { return opts.likelihood_off ? 0.0 : cache.loglik; };

  const double lambda = spec.lambda;
  auto theta_prior_delta_add = [&](int s_old, double v) {
    return dimension_log_prior(s_old + 1, spec) -
           dimension_log_prior(s_old, spec) - log_binom(p, s_old + 1) +
           log_binom(p, s_old) + std::log(lambda / 2.0) - lambda * std::abs(v);
  };

  const MoveMix& mix = opts.moves;
  double w_add = mix.add, w_rem = mix.remove, w_swap = mix.swap,
         w_theta = mix.theta_walk, w_eta = fix_eta ? 0.0 : mix.eta_walk;
  const double w_total = w_add + w_rem + w_swap + w_theta + w_eta;
  if (w_total <= 0.0)
    throw ParameterRangeError("rjmcmc_sample: empty move mix");
  const double p_add = w_add / w_total, p_rem = w_rem / w_total,
               p_swap = w_swap / w_total, p_theta = w_theta / w_total;

  McmcChain chain;
  chain.seed = seed;
  std::vector<double> new_quads;

  auto record = [&]() {
    McmcState st;
    st.theta = SparseVector::from_dense(theta);
    st.eta = eta;
    st.log_posterior = loglik() + lp_theta + lp_eta;
    chain.states.push_back(st);
    chain.log_posterior.push_back(st.log_posterior);
  };

  for (int it = 0; it < opts.n_iter; ++it) {
    const double u_move = unif(rng);
    const int s = static_cast<int>(active.size());

    if (u_move < p_add) {  // ---- add
      chain.attempts[0]++;
      if (s < p && (opts.s_max < 0 || s < opts.s_max)) {
        int j = pick_coord(rng);
        while (is_active[j]) j = pick_coord(rng);
        const double v = opts.birth_sd * std_norm(rng);
        const double ll_new =
            opts.likelihood_off
                ? 0.0
                : loglik_after_shift(data, cache, j, v, -1, 0.0, new_quads);
        const double log_phi = -0.5 * v * v / (opts.birth_sd * opts.birth_sd) -
                               std::log(opts.birth_sd) - 0.5 * kLog2Pi;
        const double log_r = (ll_new - loglik()) + theta_prior_delta_add(s, v) +
                             std::log(p_rem) - std::log(p_add) +
                             std::log(double(p - s)) - std::log(double(s + 1)) -
                             log_phi;
        if (std::log(unif(rng)) < log_r) {
          chain.accepts[0]++;
          if (!opts.likelihood_off)
            apply_shift(data, cache, j, v, -1, 0.0, new_quads, ll_new);
          theta(j) = v;
          is_active[j] = 1;
          active.insert(std::lower_bound(active.begin(), active.end(), j), j);
          lp_theta += theta_prior_delta_add(s, v);
        }
      }
    } else if (u_move < p_add + p_rem) {  // ---- remove
      chain.attempts[1]++;
      if (s > 0) {
        std::uniform_int_distribution<int> pick(0, s - 1);
        const int pos = pick(rng);
        const int j = active[pos];
        const double v = theta(j);
        const double ll_new =
            opts.likelihood_off
                ? 0.0
                : loglik_after_shift(data, cache, j, -v, -1, 0.0, new_quads);
        const double log_phi = -0.5 * v * v / (opts.birth_sd * opts.birth_sd) -
                               std::log(opts.birth_sd) - 0.5 * kLog2Pi;
        const double log_r = (ll_new - loglik()) -
                             theta_prior_delta_add(s - 1, v) +
                             std::log(p_add) - std::log(p_rem) +
                             std::log(double(s)) - std::log(double(p - s + 1)) +
                             log_phi;
        if (std::log(unif(rng)) < log_r) {
          chain.accepts[1]++;
          if (!opts.likelihood_off)
            apply_shift(data, cache, j, -v, -1, 0.0, new_quads, ll_new);
          theta(j) = 0.0;
          is_active[j] = 0;
          active.erase(active.begin() + pos);
          lp_theta -= theta_prior_delta_add(s - 1, v);
        }
      }
    } else if (u_move < p_add + p_rem + p_swap) {  // ---- swap
      chain.attempts[2]++;
      if (s > 0 && s < p) {
        std::uniform_int_distribution<int> pick(0, s - 1);
        const int pos = pick(rng);
        const int j = active[pos];
        int k = pick_coord(rng);
        while (is_active[k]) k = pick_coord(rng);
        const double v = theta(j);
        const double ll_new =
            opts.likelihood_off
                ? 0.0
                : loglik_after_shift(data, cache, j, -v, k, v, new_quads);
        // value moves unchanged: prior and proposal are symmetric
        const double log_r = ll_new - loglik();
        if (std::log(unif(rng)) < log_r) {
          chain.accepts[2]++;
          if (!opts.likelihood_off)
            apply_shift(data, cache, j, -v, k, v, new_quads, ll_new);
          theta(j) = 0.0;
          theta(k) = v;
          is_active[j] = 0;
          is_active[k] = 1;
          active.erase(active.begin() + pos);
          active.insert(std::lower_bound(active.begin(), active.end(), k), k);
        }
      }
    } else if (u_move < p_add + p_rem + p_swap + p_theta) {  // ---- theta walk
      chain.attempts[3]++;
      if (s > 0) {
        std::uniform_int_distribution<int> pick(0, s - 1);
        const int j = active[pick(rng)];
        const double delta = opts.theta_step * std_norm(rng);
        const double v_new = theta(j) + delta;
        const double ll_new =
            opts.likelihood_off
                ? 0.0
                : loglik_after_shift(data, cache, j, delta, -1, 0.0, new_quads);
        const double dprior = -lambda * (std::abs(v_new) - std::abs(theta(j)));
        if (std::log(unif(rng)) < (ll_new - loglik()) + dprior) {
          chain.accepts[3]++;
          if (!opts.likelihood_off)
            apply_shift(data, cache, j, delta, -1, 0.0, new_quads, ll_new);
          theta(j) = v_new;
          lp_theta += dprior;
        }
      }
    } else {  // ---- eta walk
      chain.attempts[4]++;
      EtaProposal prop = propose_eta(eta, opts.eta_step, rng);
      bool out_of_support = false;
      const double lp_eta_new =
          nuisance_prior_log_density(prop.params, eta_prior, &out_of_support);
      if (!out_of_support && std::isfinite(lp_eta_new)) {
        bool ok = true;
        std::optional<NuisanceState> eta_state_new;
        std::optional<LikCache> cache_new;
        try {
          eta_state_new.emplace(prop.params, data);
          if (!opts.likelihood_off)
            cache_new = build_cache(data, theta, *eta_state_new);
        } catch (const std::exception&) {
          ok = false;
        }
        if (ok) {
          const double ll_new =
              opts.likelihood_off ? 0.0 : cache_new->loglik;
          const double log_r =
              (ll_new - loglik()) + (lp_eta_new - lp_eta) + prop.log_hastings;
          if (std::log(unif(rng)) < log_r) {
            chain.accepts[4]++;
            eta = prop.params;
            eta_state = std::move(*eta_state_new);
            if (!opts.likelihood_off) cache = std::move(*cache_new);
            lp_eta = lp_eta_new;
          }
        }
      }
    }

    if ((it + 1) % opts.thin == 0) record();
  }
  return chain;
}

SupportPosterior support_marginals(const McmcChain& chain, int burn_in, int p) {
  if (burn_in < 0 || burn_in >= static_cast<int>(chain.states.size()))
    throw ParameterRangeError("support_marginals: bad burn-in");
  std::map<std::vector<int>, std::vector<int>> by_support;  // -> state indices
  const int n_states = static_cast<int>(chain.states.size());
  for (int i = burn_in; i < n_states; ++i)
    by_support[chain.states[i].theta.support()].push_back(i);
  const double total = n_states - burn_in;

  SupportPosterior post;
  for (const auto& [supp, idx] : by_support) {
    post.supports.push_back(supp);
    post.log_weights.push_back(std::log(idx.size() / total));
    const int s = static_cast<int>(supp.size());
    if (s == 0) {
      post.means.emplace_back();
      post.covs.emplace_back();
      continue;
    }
    Eigen::MatrixXd vals(static_cast<int>(idx.size()), s);
    for (std::size_t r = 0; r < idx.size(); ++r)
      vals.row(static_cast<int>(r)) =
          chain.states[idx[r]].theta.values().transpose();
    const Eigen::VectorXd mean = vals.colwise().mean();
    post.means.emplace_back(mean);
    if (idx.size() >= 2) {
      const Eigen::MatrixXd centered = vals.rowwise() - mean.transpose();
      post.covs.emplace_back((centered.transpose() * centered) /
                             double(idx.size() - 1));
    } else {
      post.covs.emplace_back();
    }
  }
  post.inclusion_probs = inclusion_from(post.supports, post.log_weights, p);
  return post;
}

double support_tv(const SupportPosterior& a, const SupportPosterior& b) {
  std::map<std::vector<int>, double> diff;
  for (std::size_t k = 0; k < a.supports.size(); ++k)
    diff[a.supports[k]] += std::exp(a.log_weights[k]);
  for (std::size_t k = 0; k < b.supports.size(); ++k)
    diff[b.supports[k]] -= std::exp(b.log_weights[k]);
  double tv = 0.0;
  for (const auto& [supp, d] : diff) tv += std::abs(d);
  return 0.5 * tv;
}

}  // namespace gsreg
