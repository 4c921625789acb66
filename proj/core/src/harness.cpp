#include "gsreg/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include "gsreg/bvm.hpp"
#include "gsreg/design.hpp"
#include "gsreg/divergences.hpp"
#include "gsreg/errors.hpp"
#include "gsreg/model.hpp"
#include "gsreg/rng.hpp"

namespace gsreg {

namespace {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t grid,
                          std::uint64_t rep) {
  Rng rng = make_rng(base, grid, rep);
  return rng();
}

NuisancePriorSpec eta_prior_from_json(const Json& j) {
  require_keys(j,
               {"iw_df", "ig_shape", "ig_rate", "normal_sd", "alpha_c1",
                "alpha_c2", "igauss_mean", "igauss_shape", "graphical"},
               "eta_prior");
  NuisancePriorSpec spec;
  if (j.contains("iw_df")) spec.iw_df = j.at("iw_df");
  if (j.contains("ig_shape")) spec.ig_shape = j.at("ig_shape");
  if (j.contains("ig_rate")) spec.ig_rate = j.at("ig_rate");
  if (j.contains("normal_sd")) spec.normal_sd = j.at("normal_sd");
  if (j.contains("alpha_c1")) spec.alpha_c1 = j.at("alpha_c1");
  if (j.contains("alpha_c2")) spec.alpha_c2 = j.at("alpha_c2");
  if (j.contains("igauss_mean")) spec.igauss_mean = j.at("igauss_mean");
  if (j.contains("igauss_shape")) spec.igauss_shape = j.at("igauss_shape");
  if (j.contains("graphical")) {
    const Json& g = j.at("graphical");
    require_keys(g, {"truncation", "varpi", "offdiag_rate", "diag_sd"},
                 "eta_prior.graphical");
    if (g.contains("truncation")) spec.graphical.truncation = g.at("truncation");
    if (g.contains("varpi")) spec.graphical.varpi = g.at("varpi");
    if (g.contains("offdiag_rate"))
      spec.graphical.offdiag_rate = g.at("offdiag_rate");
    if (g.contains("diag_sd")) spec.graphical.diag_sd = g.at("diag_sd");
  }
  return spec;
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  require_keys(
      j, {"family",        "theta0",       "n_grid",       "p_grid",
          "group_size",    "engine",       "s_max",        "budget",
          "mcmc_iters",    "mcmc_thin",    "burn_fraction", "fix_eta",
          "dim_decay",     "lambda_policy", "lambda_value", "lambda_scale",
          "eta_prior",     "compute_tv",   "compute_coverage", "ci_level",
          "replicates",    "base_seed",    "workers",      "output_path"},
      "experiment config");
  ExperimentConfig c;
  c.family = family_from_json(j.at("family"));
  c.theta0 = sparse_vector_from_json(j.at("theta0"));
  if (j.contains("n_grid")) c.n_grid = j.at("n_grid").get<std::vector<int>>();
  if (j.contains("p_grid")) c.p_grid = j.at("p_grid").get<std::vector<int>>();
  if (j.contains("group_size")) c.group_size = j.at("group_size");
  if (j.contains("engine")) c.engine = j.at("engine");
  if (j.contains("s_max")) c.s_max = j.at("s_max");
  if (j.contains("budget")) c.budget = j.at("budget");
  if (j.contains("mcmc_iters")) c.mcmc_iters = j.at("mcmc_iters");
  if (j.contains("mcmc_thin")) c.mcmc_thin = j.at("mcmc_thin");
  if (j.contains("burn_fraction")) c.burn_fraction = j.at("burn_fraction");
  if (j.contains("fix_eta")) c.fix_eta = j.at("fix_eta");
  if (j.contains("dim_decay")) c.dim_decay = j.at("dim_decay");
  if (j.contains("lambda_policy")) c.lambda_policy = j.at("lambda_policy");
  if (j.contains("lambda_value")) c.lambda_value = j.at("lambda_value");
  if (j.contains("lambda_scale")) c.lambda_scale = j.at("lambda_scale");
  if (j.contains("eta_prior")) c.eta_prior = eta_prior_from_json(j.at("eta_prior"));
  if (j.contains("compute_tv")) c.compute_tv = j.at("compute_tv");
  if (j.contains("compute_coverage"))
    c.compute_coverage = j.at("compute_coverage");
  if (j.contains("ci_level")) c.ci_level = j.at("ci_level");
  if (j.contains("replicates")) c.replicates = j.at("replicates");
  if (j.contains("base_seed")) c.base_seed = j.at("base_seed");
  if (j.contains("workers")) c.workers = j.at("workers");
  if (j.contains("output_path")) c.output_path = j.at("output_path");

  if (c.n_grid.empty()) throw ParameterRangeError("config: empty n grid");
  if (c.p_grid.empty()) c.p_grid = {c.theta0.ambient_dim()};
  for (int p : c.p_grid)
    if (c.theta0.size() > p ||
        (!c.theta0.support().empty() && c.theta0.support().back() >= p))
      throw ParameterRangeError("config: theta0 support exceeds p");
  if (c.engine != "enumeration" && c.engine != "rjmcmc")
    throw ParameterRangeError("config: unknown engine " + c.engine);
  if (c.lambda_policy != "fixed" && c.lambda_policy != "sqrt_n")
    throw ParameterRangeError("config: unknown lambda policy");
  if (c.replicates < 1) throw ParameterRangeError("config: replicates < 1");
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  return Json{{"family", family_to_json(c.family)},
              {"theta0", sparse_vector_to_json(c.theta0)},
              {"n_grid", c.n_grid},
              {"p_grid", c.p_grid},
              {"group_size", c.group_size},
              {"engine", c.engine},
              {"s_max", c.s_max},
              {"budget", c.budget},
              {"mcmc_iters", c.mcmc_iters},
              {"mcmc_thin", c.mcmc_thin},
              {"burn_fraction", c.burn_fraction},
              {"fix_eta", c.fix_eta},
              {"dim_decay", c.dim_decay},
              {"lambda_policy", c.lambda_policy},
              {"lambda_value", c.lambda_value},
              {"lambda_scale", c.lambda_scale},
              {"compute_tv", c.compute_tv},
              {"compute_coverage", c.compute_coverage},
              {"ci_level", c.ci_level},
              {"replicates", c.replicates},
              {"base_seed", c.base_seed},
              {"workers", c.workers},
              {"output_path", c.output_path}};
}

Json record_to_json(const ReplicateRecord& r) {
  return Json{{"grid_index", r.grid_index},
              {"replicate", r.replicate},
              {"n", r.n},
              {"p", r.p},
              {"ok", r.ok},
              {"error", r.error},
              {"selected", r.selected},
              {"modal_support", r.modal_support},
              {"true_support", r.true_support},
              {"mass_s0", r.mass_s0},
              {"err_l1", r.err_l1},
              {"err_l2", r.err_l2},
              {"err_pred", r.err_pred},
              {"d_n", r.d_n},
              {"tv", r.tv},
              {"coverage", r.coverage}};
  // wall_seconds stays in memory only: persisted files must be byte-identical
  // across reruns of the same (config, seed)
}

ReplicateRecord record_from_json(const Json& j) {
  ReplicateRecord r;
  r.grid_index = j.at("grid_index");
  r.replicate = j.at("replicate");
  r.n = j.at("n");
  r.p = j.at("p");
  r.ok = j.at("ok");
  r.error = j.at("error");
  r.selected = j.at("selected");
  r.modal_support = j.at("modal_support").get<std::vector<int>>();
  r.true_support = j.at("true_support").get<std::vector<int>>();
  r.mass_s0 = j.at("mass_s0");
  r.err_l1 = j.at("err_l1");
  r.err_l2 = j.at("err_l2");
  r.err_pred = j.at("err_pred");
  r.d_n = j.at("d_n");
  r.tv = j.at("tv");
  r.coverage = j.at("coverage").get<std::vector<int>>();
  return r;
}

namespace {

struct GridPoint {
  int index;
  int n;
  int p;
};

ReplicateRecord run_replicate(const ExperimentConfig& config,
                              const GridPoint& gp, int rep) {
  ReplicateRecord rec;
  rec.grid_index = gp.index;
  rec.replicate = rep;
  rec.n = gp.n;
  rec.p = gp.p;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const std::uint64_t seed = derive_seed(config.base_seed, gp.index, rep);
    const SparseVector theta0(config.theta0.support(), config.theta0.values(),
                              gp.p);
    rec.true_support = theta0.support();

    SimulateOptions sim_opts;
    sim_opts.group_size = config.group_size;
    const GroupedDataset data =
        simulate(config.family, theta0, gp.n, gp.p, seed, sim_opts);
    const NuisanceState eta_truth(config.family, data);

    SpikeSlabSpec prior;
    prior.p = gp.p;
    prior.dim_decay = config.dim_decay;
    prior.lambda =
        config.lambda_policy == "fixed"
            ? config.lambda_value
            : config.lambda_scale * x_norm_star(data.stacked_design()) /
                  std::sqrt(static_cast<double>(gp.n));

    SupportPosterior post;
    NuisanceState eta_hat = eta_truth;
    if (config.engine == "enumeration") {
      QuadratureOptions qopts;
      qopts.budget = config.budget;
      post = enumerate_posterior_laplace_slab(data, prior, eta_truth,
                                              config.s_max, qopts);
    } else {
      McmcState init;
      init.theta = SparseVector({}, Eigen::VectorXd(0), gp.p);
      init.eta = config.family;
      McmcOptions mopts;
      mopts.n_iter = config.mcmc_iters;
      mopts.thin = config.mcmc_thin;
      const McmcChain chain =
          rjmcmc_sample(data, prior, config.eta_prior, init, seed, mopts,
                        config.fix_eta);
      const int burn = static_cast<int>(config.burn_fraction *
                                        static_cast<double>(chain.states.size()));
      post = support_marginals(chain, burn, gp.p);
      if (!config.fix_eta && !chain.states.empty())
        eta_hat = NuisanceState(chain.states.back().eta, data);
    }

    // posterior mean in the ambient space
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(gp.p);
    for (std::size_t k = 0; k < post.supports.size(); ++k) {
      if (!post.means[k]) continue;
      const double w = std::exp(post.log_weights[k]);
      for (std::size_t jj = 0; jj < post.supports[k].size(); ++jj)
        mean(post.supports[k][jj]) += w * (*post.means[k])(static_cast<int>(jj));
    }
    const Eigen::VectorXd diff = mean - theta0.to_dense();
    rec.err_l1 = diff.lpNorm<1>();
    rec.err_l2 = diff.norm();
    rec.err_pred = (data.stacked_design() * diff).norm();
    rec.modal_support = post.supports[post.modal_support()];
    rec.selected = rec.modal_support == rec.true_support;
    rec.mass_s0 = post.weight_of(rec.true_support);
    rec.d_n = pseudo_metrics(eta_hat, eta_truth).d_n;

    if (config.compute_tv || config.compute_coverage) {
      ProjectionChoice proj;
      proj.kind = ProjectionChoice::Kind::Whitened;
      const SupportMixture mixture =
          build_bvm(data, theta0, eta_truth, prior, proj, config.s_max,
                    "oracle", config.budget);
      if (config.compute_tv) rec.tv = tv_support_mixture(post, mixture);
      if (config.compute_coverage) {
        const auto intervals = credible_intervals(mixture, config.ci_level);
        const Eigen::VectorXd truth = theta0.to_dense();
        for (int j : rec.true_support) {
          int covered = 0;
          for (const CredibleInterval& ci : intervals)
            if (ci.coordinate == j && ci.lower <= truth(j) &&
                truth(j) <= ci.upper)
              covered = 1;
          rec.coverage.push_back(covered);
        }
      }
    }
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

std::string csv_join_support(const std::vector<int>& s) {
  std::ostringstream out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out << ';';
    out << s[i];
  }
  return out.str();
}

}  // namespace

ResultsTable load_results(const std::string& path) {
  ResultsTable table;
  for (const Json& j : read_records(path))
    table.records.push_back(record_from_json(j));
  return table;
}

std::string results_csv(const ResultsTable& table) {
  std::ostringstream out;
  out << "grid_index,replicate,n,p,ok,selected,modal_support,true_support,"
         "mass_s0,err_l1,err_l2,err_pred,d_n,tv,coverage_mean\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const ReplicateRecord& r : table.records) {
    double cov_mean = -1.0;
    if (!r.coverage.empty()) {
      cov_mean = 0.0;
      for (int c : r.coverage) cov_mean += c;
      cov_mean /= static_cast<double>(r.coverage.size());
    }
    out << r.grid_index << ',' << r.replicate << ',' << r.n << ',' << r.p << ','
        << (r.ok ? 1 : 0) << ',' << (r.selected ? 1 : 0) << ','
        << csv_join_support(r.modal_support) << ','
        << csv_join_support(r.true_support) << ',' << num(r.mass_s0) << ','
        << num(r.err_l1) << ',' << num(r.err_l2) << ',' << num(r.err_pred)
        << ',' << num(r.d_n) << ',' << num(r.tv) << ',' << num(cov_mean)
        << '\n';
  }
  return out.str();
}

ResultsTable run_experiment(const ExperimentConfig& config) {
  std::vector<int> p_grid = config.p_grid;
  if (p_grid.empty()) p_grid.push_back(config.theta0.ambient_dim());
  std::vector<GridPoint> grid;
  int gi = 0;
  for (int p : p_grid)
    for (int n : config.n_grid) grid.push_back({gi++, n, p});

  // resume: keep records already on disk
  std::map<std::pair<int, int>, ReplicateRecord> done;
  if (!config.output_path.empty()) {
    std::ifstream probe(config.output_path);
    if (probe.good()) {
      for (ReplicateRecord& r : load_results(config.output_path).records)
        done.emplace(std::make_pair(r.grid_index, r.replicate), std::move(r));
    }
  }

  std::vector<std::pair<GridPoint, int>> tasks;
  for (const GridPoint& gp : grid)
    for (int rep = 0; rep < config.replicates; ++rep)
      if (!done.count({gp.index, rep})) tasks.emplace_back(gp, rep);

  std::map<std::pair<int, int>, ReplicateRecord> fresh;
  const int workers = std::max(1, config.workers);
  if (workers == 1) {
    // serial path flushes each record as soon as it completes
    std::ofstream append;
    if (!config.output_path.empty())
      append.open(config.output_path, std::ios::app);
    for (const auto& [gp, rep] : tasks) {
      ReplicateRecord rec = run_replicate(config, gp, rep);
      if (append.is_open()) {
        append << record_to_json(rec).dump() << "\n";
        append.flush();
      }
      fresh.emplace(std::make_pair(gp.index, rep), std::move(rec));
    }
  } else {
    std::vector<std::future<ReplicateRecord>> futures;
    std::size_t next = 0;
    while (next < tasks.size() || !futures.empty()) {
      while (next < tasks.size() &&
             static_cast<int>(futures.size()) < workers) {
        const auto& [gp, rep] = tasks[next++];
        futures.push_back(std::async(std::launch::async, run_replicate,
                                     std::cref(config), gp, rep));
      }
      ReplicateRecord rec = futures.front().get();
      futures.erase(futures.begin());
      fresh.emplace(std::make_pair(rec.grid_index, rec.replicate),
                    std::move(rec));
    }
    if (!config.output_path.empty()) {
      // single appender, (grid, replicate) order
      std::ofstream append(config.output_path, std::ios::app);
      for (const auto& [key, rec] : fresh)
        append << record_to_json(rec).dump() << "\n";
    }
  }

  ResultsTable table;
  for (const GridPoint& gp : grid) {
    for (int rep = 0; rep < config.replicates; ++rep) {
      const auto key = std::make_pair(gp.index, rep);
      auto it = done.find(key);
      if (it == done.end()) it = fresh.find(key);
      table.records.push_back(it->second);
    }
  }
  if (!config.output_path.empty())
    write_text(config.output_path + ".csv", results_csv(table));
  return table;
}

namespace {

double record_column(const ReplicateRecord& r, const std::string& column) {
  if (column == "err_l1") return r.err_l1;
  if (column == "err_l2") return r.err_l2;
  if (column == "err_pred") return r.err_pred;
  if (column == "tv") return r.tv;
  if (column == "d_n") return r.d_n;
  throw ParameterRangeError("unknown error column: " + column);
}

double median(std::vector<double> v) {
  if (v.empty()) throw ParameterRangeError("median of empty set");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

double contraction_slope(const ResultsTable& table,
                         const std::string& error_column) {
  std::map<int, std::vector<double>> by_n;
  for (const ReplicateRecord& r : table.records)
    if (r.ok) by_n[r.n].push_back(record_column(r, error_column));
  if (by_n.size() < 2)
    throw ParameterRangeError("contraction_slope: need at least two n values");
  std::vector<double> xs, ys;
  for (const auto& [n, errs] : by_n) {
    const double med = median(errs);
    if (med <= 0.0)
      throw ParameterRangeError("contraction_slope: nonpositive median error");
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(med));
  }
  const double k = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

SelectionMetrics selection_metrics(const ResultsTable& table) {
  SelectionMetrics m;
  int count = 0;
  for (const ReplicateRecord& r : table.records) {
    if (!r.ok) continue;
    ++count;
    if (r.modal_support == r.true_support) {
      m.exact_recovery += 1.0;
    } else if (std::includes(r.modal_support.begin(), r.modal_support.end(),
                             r.true_support.begin(), r.true_support.end())) {
      m.superset += 1.0;
    } else if (std::includes(r.true_support.begin(), r.true_support.end(),
                             r.modal_support.begin(), r.modal_support.end())) {
      m.subset += 1.0;
    }
  }
  if (count > 0) {
    m.exact_recovery /= count;
    m.superset /= count;
    m.subset /= count;
  }
  return m;
}

std::vector<double> coverage_metrics(const ResultsTable& table) {
  std::vector<double> sums;
  int count = 0;
  for (const ReplicateRecord& r : table.records) {
    if (!r.ok || r.coverage.empty()) continue;
    if (sums.empty()) sums.assign(r.coverage.size(), 0.0);
    if (sums.size() != r.coverage.size())
      throw ShapeError("coverage_metrics: inconsistent coordinate counts");
    for (std::size_t j = 0; j < sums.size(); ++j) sums[j] += r.coverage[j];
    ++count;
  }
  for (double& s : sums) s /= std::max(count, 1);
  return sums;
}

std::vector<NpCurvePoint> np_error_curve(const NpCurveConfig& config) {
  std::vector<NpCurvePoint> curve;
  for (std::size_t ni = 0; ni < config.n_grid.size(); ++ni) {
    const int n = config.n_grid[ni];
    int rejections = 0;
    double bound_sum = 0.0;
    for (int rep = 0; rep < config.replicates; ++rep) {
      const std::uint64_t seed = derive_seed(config.seed, ni, rep);
      SimulateOptions opts;
      opts.group_size = config.group_size;
      const GroupedDataset data =
          simulate(config.family0, config.theta0, n,
                   config.theta0.ambient_dim(), seed, opts);
      const NuisanceState eta0(config.family0, data);
      const NuisanceState eta1(config.family1, data);
      if (np_test(data, config.theta1, eta1, config.theta0, eta0)) ++rejections;
      bound_sum += std::exp(
          -n * avg_renyi(data, config.theta1, eta1, config.theta0, eta0));
    }
    NpCurvePoint point;
    point.n = n;
    point.empirical_error =
        static_cast<double>(rejections) / config.replicates;
    point.bound = bound_sum / config.replicates;
    point.mc_se = std::sqrt(point.empirical_error *
                            (1.0 - point.empirical_error) /
                            config.replicates);
    curve.push_back(point);
  }
  return curve;
}

}  // namespace gsreg
