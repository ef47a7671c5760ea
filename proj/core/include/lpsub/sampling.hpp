#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lpsub/grassmann.hpp"

namespace lpsub {

/// Mixture of a uniform outlier ball (weight alpha_0) and K uniform
/// distributions on subspaces restricted to the unit ball, optionally
/// thickened into cylinders of radius `noise`.
struct MixtureModel {
  std::vector<double> weights;  // alpha_0 .. alpha_K
  std::vector<Subspace> subspaces;
  double noise = 0.0;

  Index num_subspaces() const { return static_cast<Index>(subspaces.size()); }

  /// Throws kInvalidArgument on bad weights, shapes or repeated spans, and
  /// kInvalidNoise on negative noise.
  void validate() const;
};

/// N points in R^D, one per row. Labels, when present, give the mixture
/// component of each point (0 = outlier).
struct PointCloud {
  Matrix points;
  std::optional<std::vector<int>> labels;
  int num_components = 0;  // K
  double noise = 0.0;      // epsilon

  Index size() const { return points.rows(); }
  Index ambient_dim() const { return points.cols(); }
};

Vector sample_unit_ball(Index D, Rng& rng);

/// Uniform on L intersected with the unit ball.
Vector sample_on_subspace(const Subspace& L, Rng& rng);

/// Uniform on (L cap B(0,1)) x (L^perp cap B(0,eps)). Throws kInvalidNoise
/// unless eps > 0.
Vector sample_noisy_cylinder(const Subspace& L, double eps, Rng& rng);

/// i.i.d. draws from the mixture; component chosen by inverse CDF on one
/// uniform per point. Zero noise uses the clean subspace sampler.
PointCloud sample_mixture(const MixtureModel& model, Index N, Rng& rng);

/// Sum of alpha_2 .. alpha_K.
double secondary_weight(const MixtureModel& model);

/// Noise level beyond which the near-recovery radius covers the whole
/// Grassmannian: the p <= 1 floor, or the K = 1, p > 1 floor. Empty when
/// no floor is defined for (K, p).
std::optional<double> noise_floor(const std::vector<double>& weights, Index d, double p);

/// Problems found by validate_experiment_model(); empty when the model is
/// admissible for the recovery experiments.
struct ConditionReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Flags alpha_1 <= sum_{i>=2} alpha_i and noise at or above the floor.
ConditionReport validate_experiment_model(const MixtureModel& model, double p);

/// File format: header "N D K epsilon", then N lines of D values and an
/// optional integer label.
void write_point_cloud(std::ostream& out, const PointCloud& cloud);
PointCloud read_point_cloud(std::istream& in);

}  // namespace lpsub
