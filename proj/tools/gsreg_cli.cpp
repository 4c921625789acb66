// Command line front end: simulate datasets, run experiment grids, build the
// limit mixture, report design diagnostics, and run the acceptance checks.
//
// Exit codes: 0 success, 1 usage or config error, 2 numerical failure.

#include <CLI11.hpp>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "gsreg/acceptance.hpp"
#include "gsreg/bvm.hpp"
#include "gsreg/design.hpp"
#include "gsreg/divergences.hpp"
#include "gsreg/errors.hpp"
#include "gsreg/families.hpp"
#include "gsreg/harness.hpp"
#include "gsreg/io.hpp"
#include "gsreg/posterior.hpp"
#include "gsreg/priors.hpp"

namespace {

using gsreg::Json;

struct CommonOpts {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
  auto* c = cmd->add_option("--config", opts.config, "configuration file");
  if (config_required) c->required();
  cmd->add_option("--out", opts.out, "output path");
  cmd->add_option("--seed", opts.seed, "seed override");
  cmd->add_option("--workers", opts.workers, "worker count override");
}

int cmd_simulate(const CommonOpts& opts) {
  const Json j = gsreg::load_config(opts.config);
  gsreg::require_keys(j,
                      {"family", "theta0", "n", "p", "seed", "group_size",
                       "obs_prob", "normalize_design"},
                      "simulate config");
  const gsreg::FamilyParams family = gsreg::family_from_json(j.at("family"));
  const gsreg::SparseVector theta0 =
      gsreg::sparse_vector_from_json(j.at("theta0"));
  const int n = j.at("n").get<int>();
  const int p = j.at("p").get<int>();
  std::uint64_t seed = j.value("seed", std::uint64_t{0});
  if (opts.seed) seed = *opts.seed;
  gsreg::SimulateOptions sopts;
  sopts.group_size = j.value("group_size", 1);
  sopts.obs_prob = j.value("obs_prob", 0.8);
  sopts.normalize_design = j.value("normalize_design", true);
  const gsreg::GroupedDataset data =
      gsreg::simulate(family, theta0, n, p, seed, sopts);
  if (opts.out.empty()) throw CLI::ValidationError("--out is required");
  gsreg::save_dataset(opts.out, data);
  std::printf("wrote %d groups (n*=%d, p=%d) to %s\n", data.n(), data.n_star(),
              data.p(), opts.out.c_str());
  return 0;
}

int cmd_fit(const CommonOpts& opts) {
  gsreg::ExperimentConfig config =
      gsreg::config_from_json(gsreg::load_config(opts.config));
  if (opts.seed) config.base_seed = *opts.seed;
  if (opts.workers) config.workers = *opts.workers;
  if (!opts.out.empty()) config.output_path = opts.out;
  const gsreg::ResultsTable table = gsreg::run_experiment(config);
  int failed = 0;
  for (const auto& rec : table.records)
    if (!rec.ok) ++failed;
  const gsreg::SelectionMetrics sel = gsreg::selection_metrics(table);
  std::printf("records %zu (failed %d), exact recovery %.3f, superset %.3f\n",
              table.records.size(), failed, sel.exact_recovery, sel.superset);
  if (config.output_path.empty())
    std::fputs(gsreg::results_csv(table).c_str(), stdout);
  return failed == static_cast<int>(table.records.size()) && failed > 0 ? 2 : 0;
}

int cmd_bvm(const CommonOpts& opts) {
  const Json j = gsreg::load_config(opts.config);
  gsreg::require_keys(
      j, {"dataset", "family", "theta0", "s_max", "lambda", "dim_decay", "mode"},
      "bvm config");
  const gsreg::GroupedDataset data =
      gsreg::load_dataset(j.at("dataset").get<std::string>());
  const gsreg::FamilyParams family = gsreg::family_from_json(j.at("family"));
  const gsreg::SparseVector theta0 =
      gsreg::sparse_vector_from_json(j.at("theta0"));
  const gsreg::NuisanceState eta(family, data);
  gsreg::SpikeSlabSpec spec{data.p(), j.value("dim_decay", 2.0),
                            j.at("lambda").get<double>()};
  gsreg::ProjectionChoice proj;
  proj.kind = gsreg::ProjectionChoice::Kind::Whitened;
  const gsreg::SupportMixture mixture =
      gsreg::build_bvm(data, theta0, eta, spec, proj, j.value("s_max", 2),
                       j.value("mode", std::string("oracle")));
  if (opts.out.empty()) throw CLI::ValidationError("--out is required");
  gsreg::save_mixture(opts.out, mixture);
  std::printf("wrote %zu mixture components to %s\n", mixture.supports.size(),
              opts.out.c_str());
  return 0;
}

int cmd_diagnose(const CommonOpts& opts) {
  if (opts.config.empty()) {
    // default hyperparameters, for reference
    gsreg::SpikeSlabSpec spec;
    gsreg::NuisancePriorSpec eta_prior;
    std::printf("dimension prior decay a: %.1f\n", spec.dim_decay);
    std::printf("slab rate lambda: %.3f (policy sqrt_n scales ||X||_*/sqrt(n))\n",
                spec.lambda);
    std::printf("graphical truncation: %.1f, edge inclusion varpi: %.2f\n",
                gsreg::GraphicalPriorSpec{}.truncation,
                gsreg::GraphicalPriorSpec{}.varpi);
    return 0;
  }
  const Json j = gsreg::load_config(opts.config);
  gsreg::require_keys(j, {"dataset", "s_max", "k4", "k5"}, "diagnose config");
  const gsreg::GroupedDataset data =
      gsreg::load_dataset(j.at("dataset").get<std::string>());
  const gsreg::DiagnosticsReport report = gsreg::diagnostics(
      data.stacked_design(), j.value("s_max", 2), j.value("k4", 1.0),
      j.value("k5", 1.0));
  std::printf("||X||_* = %.6g (method %s)\n", report.x_norm_star,
              report.method.c_str());
  for (const auto& [s, v] : report.phi1) std::printf("phi1(%d) = %.6g\n", s, v);
  for (const auto& [s, v] : report.phi2) std::printf("phi2(%d) = %.6g\n", s, v);
  for (const auto& [s, v] : report.joint_sv)
    std::printf("joint_sv(%d) = %.6g\n", s, v);
  if (report.beta_min)
    std::printf("beta-min threshold = %.6g\n", *report.beta_min);
  return 0;
}

int cmd_verify(const std::vector<std::string>& suites) {
  const auto results = gsreg::run_acceptance(suites);
  return gsreg::report_acceptance(results) > 0 ? 2 : 0;
}

int cmd_report(const CommonOpts& opts) {
  const Json j = gsreg::load_config(opts.config);
  gsreg::require_keys(j, {"results", "error_column"}, "report config");
  const gsreg::ResultsTable table =
      gsreg::load_results(j.at("results").get<std::string>());
  const gsreg::SelectionMetrics sel = gsreg::selection_metrics(table);
  std::printf("records %zu\n", table.records.size());
  std::printf("exact recovery %.4f, superset %.4f, subset %.4f\n",
              sel.exact_recovery, sel.superset, sel.subset);
  const std::vector<double> cov = gsreg::coverage_metrics(table);
  for (std::size_t k = 0; k < cov.size(); ++k)
    std::printf("coverage[%zu] = %.4f\n", k, cov[k]);
  try {
    const std::string col = j.value("error_column", std::string("err_l2"));
    std::printf("contraction slope (%s) = %.4f\n", col.c_str(),
                gsreg::contraction_slope(table, col));
  } catch (const std::exception&) {
    // slope needs at least two sample sizes; skip silently otherwise
  }
  if (!opts.out.empty()) gsreg::write_text(opts.out, gsreg::results_csv(table));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse grouped-Gaussian regression toolkit"};
  app.require_subcommand(1);

  CommonOpts sim_opts, fit_opts, bvm_opts, diag_opts, rep_opts;
  std::vector<std::string> suites;

  auto* sim = app.add_subcommand("simulate", "draw a dataset from a model");
  add_common(sim, sim_opts, true);
  auto* fit = app.add_subcommand("fit", "run an experiment grid");
  add_common(fit, fit_opts, true);
  auto* bvm = app.add_subcommand("bvm", "build the limit mixture for a dataset");
  add_common(bvm, bvm_opts, true);
  auto* diag =
      app.add_subcommand("diagnose", "design diagnostics or default settings");
  add_common(diag, diag_opts, false);
  auto* verify = app.add_subcommand("verify", "run acceptance checks");
  verify->add_option("--suite", suites, "suite name (repeatable; empty = all)");
  auto* report = app.add_subcommand("report", "summarize a results file");
  add_common(report, rep_opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    // collapse CLI11's exit-code zoo: anything but help is a usage error
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_opts);
    if (fit->parsed()) return cmd_fit(fit_opts);
    if (bvm->parsed()) return cmd_bvm(bvm_opts);
    if (diag->parsed()) return cmd_diagnose(diag_opts);
    if (verify->parsed()) return cmd_verify(suites);
    if (report->parsed()) return cmd_report(rep_opts);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    // config and parameter errors are usage errors
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  }
  return 1;
}
