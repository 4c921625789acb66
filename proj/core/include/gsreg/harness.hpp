#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsreg/families.hpp"
#include "gsreg/io.hpp"
#include "gsreg/posterior.hpp"
#include "gsreg/priors.hpp"
#include "gsreg/types.hpp"

namespace gsreg {

/// One experiment: a family template, a truth, grids, an engine, and a seed.
/// Per-replicate seeds are derived from (base_seed, grid index, replicate).
struct ExperimentConfig {
  FamilyParams family;   ///< nuisance truth, reused across replicates
  SparseVector theta0;   ///< truth; re-embedded for each p in the grid
  std::vector<int> n_grid{100};
  std::vector<int> p_grid;  ///< empty = theta0's ambient dimension
  int group_size = 1;
  std::string engine = "enumeration";  ///< "enumeration" or "rjmcmc"
  int s_max = 3;
  std::int64_t budget = 1000000;
  int mcmc_iters = 20000;
  int mcmc_thin = 1;
  double burn_fraction = 0.2;
  bool fix_eta = true;  ///< rjmcmc: hold the nuisance at the truth
  double dim_decay = 2.0;
  std::string lambda_policy = "sqrt_n";  ///< or "fixed"
  double lambda_value = 1.0;             ///< fixed policy
  double lambda_scale = 1.0;             ///< sqrt_n: scale * ||X||_* / sqrt(n)
  NuisancePriorSpec eta_prior;
  bool compute_tv = false;        ///< TV surrogate against the limit mixture
  bool compute_coverage = false;  ///< oracle-mode credible intervals
  double ci_level = 0.95;
  int replicates = 1;
  std::uint64_t base_seed = 0;
  int workers = 1;
  std::string output_path;  ///< empty = in-memory only
};

ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& config);

struct ReplicateRecord {
  int grid_index = 0;
  int replicate = 0;
  int n = 0;
  int p = 0;
  bool ok = true;
  std::string error;
  bool selected = false;  ///< modal support equals the true support
  std::vector<int> modal_support;
  std::vector<int> true_support;
  double mass_s0 = 0.0;
  double err_l1 = 0.0;    ///< || posterior mean - theta0 ||_1
  double err_l2 = 0.0;
  double err_pred = 0.0;  ///< || X (posterior mean - theta0) ||_2
  double d_n = 0.0;       ///< nuisance pseudo-metric at the fitted eta
  double tv = -1.0;       ///< -1 when not computed
  std::vector<int> coverage;  ///< per true-support coordinate, 0/1
  double wall_seconds = 0.0;
};

struct ResultsTable {
  std::vector<ReplicateRecord> records;
};

Json record_to_json(const ReplicateRecord& r);
ReplicateRecord record_from_json(const Json& j);

/// Executes the grid x replicate plan. Records append to output_path as
/// line-delimited text in (grid, replicate) order regardless of completion
/// order; a pre-existing file's records are kept and their (grid, replicate)
/// cells skipped, so interrupted runs resume. A comma-separated summary is
/// written next to the record file. Per-replicate engine failures are
/// recorded in the table, not thrown.
ResultsTable run_experiment(const ExperimentConfig& config);

/// Reads a previously written record file back into a table.
ResultsTable load_results(const std::string& path);

/// Comma-separated rendering of the table (header + one row per record).
std::string results_csv(const ResultsTable& table);

/// Least-squares slope of log median(error) against log n, at fixed (p, s0).
/// error_column is one of "err_l1", "err_l2", "err_pred", "tv".
double contraction_slope(const ResultsTable& table,
                         const std::string& error_column);

struct SelectionMetrics {
  double exact_recovery = 0.0;
  double superset = 0.0;
  double subset = 0.0;
};

/// Rates over successful records, classified from the stored modal and true
/// supports; superset and subset are strict.
SelectionMetrics selection_metrics(const ResultsTable& table);

/// Fraction of successful replicates whose interval covered theta0 at each
/// true-support coordinate.
std::vector<double> coverage_metrics(const ResultsTable& table);

struct NpCurveConfig {
  FamilyParams family0;
  FamilyParams family1;
  SparseVector theta0;
  SparseVector theta1;
  std::vector<int> n_grid{50, 100, 200};
  int group_size = 1;
  int replicates = 10000;
  std::uint64_t seed = 0;
};

struct NpCurvePoint {
  int n = 0;
  double empirical_error = 0.0;  ///< type-I error of the likelihood-ratio test
  double bound = 0.0;            ///< exp(-n * average Renyi-1/2 divergence)
  double mc_se = 0.0;
};

/// Simulates under the null at each n and compares the rejection frequency of
/// the most powerful test against the divergence bound.
std::vector<NpCurvePoint> np_error_curve(const NpCurveConfig& config);

}  // namespace gsreg
