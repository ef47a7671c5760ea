#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lpsub/energy.hpp"

namespace lpsub {

/// Smoothing continuation used when none is given: decades from 1e-1 down
/// to 1e-8 for p < 2, exact (a single stage at 0) otherwise.
std::vector<double> default_mu_schedule(double p);

struct FitOptions {
  double p = 1.0;
  int max_iters = 500;         // per smoothing stage
  double step_init = 0.1;      // first trial step, as a rotation angle in radians
  double armijo_c = 1e-4;
  double tol_grad = 1e-10;     // on ||grad||_F / N
  int n_restarts = 8;
  std::vector<double> mu_schedule;  // empty: default_mu_schedule(p)
  std::uint64_t seed = 0;

  int ransac_iters = 200;
  double ransac_strip = 0.02;
  int max_alternations = 50;   // K-subspace outer loop

  /// Record the smoothed energy after every accepted step.
  bool record_trace = false;

  void validate() const;
  std::vector<double> schedule() const;
};

struct TraceEntry {
  int stage = 0;
  double mu = 0.0;
  double energy = 0.0;
};

struct FitResult {
  std::vector<Subspace> subspaces;
  double final_energy = 0.0;  // exact (mu = 0) energy of `subspaces`
  int iterations = 0;
  int restarts_used = 0;
  bool converged = false;
  int reseeds = 0;            // empty clusters re-drawn in the K-subspace loop
  std::vector<TraceEntry> trace;

  const Subspace& subspace() const { return subspaces.front(); }
};

/// Riemannian steepest descent along exact geodesics with Armijo
/// backtracking, run once per smoothing stage.
FitResult geodesic_descent(PointsRef X, const Subspace& init, const FitOptions& opts);

/// Multi-start geodesic descent. Starts are the top-d right singular
/// subspace of X, RANSAC candidates and random draws, n_restarts in total;
/// the lowest exact energy among starts and results wins (lowest index on
/// ties).
FitResult best_single_subspace(PointsRef X, Index d, const FitOptions& opts);

/// Alternates Voronoi assignment with per-cluster geodesic descent from a
/// given K-tuple until the assignment stops changing.
FitResult refine_k_subspaces(PointsRef X, std::vector<Subspace> init, const FitOptions& opts,
                             Rng& rng);

/// Multi-start K-subspace fit: sequential RANSAC tuples, then random tuples.
FitResult best_k_subspaces(PointsRef X, Index d, Index K, const FitOptions& opts);

struct RansacResult {
  Subspace subspace;
  Index inliers = 0;
  int skipped_rounds = 0;  // rounds whose sample did not span d dimensions
};

/// Best span of d sampled points by count within the strip; the first of
/// equal counts wins. Throws kInvalidArgument with fewer than d points.
RansacResult ransac_subspace(PointsRef X, Index d, double strip_eps, int iters, Rng& rng);

/// Product-metric distance: min over permutations of the max pairwise
/// Grassmann distance. Exhaustive for K <= 8; above that a bottleneck
/// matching is used and `exhaustive` is false.
struct PermutationDistance {
  double value = 0.0;
  bool exhaustive = true;
};
PermutationDistance permutation_distance(std::span<const Subspace> fit, std::span<const Subspace> truth);

/// Top-d right singular subspace of X (the exact p = 2 minimizer).
Subspace principal_subspace(PointsRef X, Index d);

}  // namespace lpsub
