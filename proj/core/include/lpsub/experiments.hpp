#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lpsub/optimize.hpp"
#include "lpsub/sampling.hpp"

namespace lpsub {

/// kBest: one subspace fitted, distance to L1.
/// kAll: K subspaces fitted, permutation distance to the truth.
/// kNoisy: one subspace from a noisy mixture, distance against the bound f.
/// kNoisyAll: K subspaces from a noisy mixture, permutation distance against f.
enum class ExperimentMode { kBest, kAll, kNoisy, kNoisyAll };

const char* to_string(ExperimentMode mode);
ExperimentMode parse_mode(const std::string& name);

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::kBest;
  Index D = 3;
  Index d = 1;
  Index K = 2;
  std::vector<double> alpha = {0.2, 0.5, 0.3};  // alpha_0 .. alpha_K
  std::vector<double> eps_grid = {0.0};
  std::vector<double> p_grid = {1.0};
  Index N = 2000;
  int n_trials = 50;
  double recovery_tol = 0.05;
  FitOptions fit;
  std::optional<std::uint64_t> seed;  // mandatory before running

  /// Truth subspaces are redrawn until every pair is further apart than this.
  double min_separation = 0.0;
  /// Optional cap on alpha_0 for the K-subspace modes.
  std::optional<double> nu0;

  /// Throws kConfigRejected naming the violated condition.
  void validate() const;
};

/// Reads "key = value" lines; '#' starts a comment. Keys mirror the CLI
/// flags: mode, D, d, k, alpha, eps, n, p, trials, tol, restarts,
/// max-iters, seed, min-sep, nu0. Lists are comma separated.
ExperimentConfig parse_config(std::istream& in);
/// Applies one key = value pair; throws kConfigRejected on unknown keys.
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);

struct TrialRow {
  double p = 0.0;
  Index K = 0;
  double eps = 0.0;
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  int trial = 0;
  double distance = 0.0;
  double energy = 0.0;
  double bound_f = 0.0;  // NaN when no bound applies
  bool recovered = false;
  double runtime_ms = 0.0;
  bool converged = true;
};

struct GroupSummary {
  double p = 0.0;
  double eps = 0.0;
  int n_trials = 0;
  int n_recovered = 0;
  double recovery_rate = 0.0;
  double median_distance = 0.0;
  double bound_f = 0.0;
};

struct SweepReport {
  std::vector<TrialRow> rows;         // grouped by (p, eps), trial order within a group
  std::vector<GroupSummary> summary;  // one per (p, eps), grid order

  /// First group with the given p and eps; throws kInvalidArgument if absent.
  const GroupSummary& group(double p, double eps) const;
};

/// Recomputes `summary` from `rows`.
void summarize(SweepReport& report);

/// Re-evaluates `recovered` as distance < tol without refitting.
SweepReport recount(const SweepReport& report, double tol);

/// Truth subspaces for one trial; depends only on (seed, trial).
std::vector<Subspace> trial_truth(const ExperimentConfig& cfg, int trial);

/// Data for one trial at noise level eps; the underlying draws depend only
/// on (seed, trial), so changing eps rescales the same noise.
PointCloud trial_data(const ExperimentConfig& cfg, int trial, double eps);

/// Near-recovery radius for one subspace, or NaN outside its regime.
double noisy_bound_single(double eps, Index K, Index d, double p, const std::vector<double>& alpha);
/// Near-recovery radius for K subspaces, or NaN when the weight condition fails.
double noisy_bound_all(double eps, Index K, Index d, double p, const std::vector<double>& alpha);
/// Largest noise for which the K-subspace bound holds, given a lower bound
/// on the pairwise distance of the truth; NaN when no noise is admissible.
double noisy_eps_limit(Index K, Index d, double p, const std::vector<double>& alpha, double min_dist);

TrialRow trial_recover_best_l0(const ExperimentConfig& cfg, double p, int trial);
TrialRow trial_recover_all_k(const ExperimentConfig& cfg, double p, int trial);
TrialRow noisy_trial(const ExperimentConfig& cfg, double p, double eps, int trial);

/// Runs every (p, eps, trial) on `jobs` worker threads. Rows are ordered
/// independently of completion order.
SweepReport run_sweep(const ExperimentConfig& cfg, int jobs = 1);

/// CSV with a fixed header; runtime_ms is written as 0 when !with_timing.
void write_csv(std::ostream& out, const SweepReport& report, bool with_timing = true);
void write_summary(std::ostream& out, const SweepReport& report);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// The three single-outlier scenarios, each with its expected outcome.
std::vector<CheckResult> counterexample_suite(std::uint64_t seed);

/// Monte Carlo checks of the moment identity and the distance lemmas.
std::vector<CheckResult> lemma_property_suite(std::uint64_t seed);

/// Geometry of the counterexamples, exposed for tests.
struct Scenario {
  Matrix points;
  Subspace inlier_subspace;
  Subspace alternative;  // the subspace the outlier pulls towards
};
Scenario scenario_orthogonal_outlier(Index n_inliers, double p, Rng& rng);
Scenario scenario_elevated_outlier(Index n_inliers, double eps, double elevation, Rng& rng);
Scenario scenario_great_circle_arc(Index n_inliers, double arc_length, double elevation);

}  // namespace lpsub
