#include "lpsub/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

namespace lpsub {

namespace {

Vector sample_ball_coords(Index n, double radius, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector dir(n);
  double norm = 0.0;
  do {
    for (Index i = 0; i < n; ++i) dir(i) = normal(rng);
    norm = dir.norm();
  } while (norm == 0.0);
  const double r = radius * std::pow(uniform(rng), 1.0 / static_cast<double>(n));
  return dir * (r / norm);
}

Vector sample_cylinder(const Subspace& L, const Matrix& complement, double eps, Rng& rng) {
  Vector x = L.basis() * sample_ball_coords(L.dim(), 1.0, rng);
  x += complement * sample_ball_coords(complement.cols(), eps, rng);
  return x;
}

}  // namespace

void MixtureModel::validate() const {
  if (weights.size() != subspaces.size() + 1) {
    throw Error(ErrorCode::kInvalidArgument, "need K+1 weights for K subspaces");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "mixture weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "mixture weights sum to " << std::setprecision(17) << total << ", not 1";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  if (!(noise >= 0.0)) throw Error(ErrorCode::kInvalidNoise, "noise level must be >= 0");
  for (std::size_t i = 0; i < subspaces.size(); ++i) {
    if (subspaces[i].ambient_dim() != subspaces[0].ambient_dim() ||
        subspaces[i].dim() != subspaces[0].dim()) {
      throw Error(ErrorCode::kInvalidArgument, "all subspaces must share D and d");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (subspaces[i].same_span(subspaces[j])) {
        throw Error(ErrorCode::kInvalidArgument, "mixture subspaces must be distinct");
      }
    }
  }
}

Vector sample_unit_ball(Index D, Rng& rng) {
  if (D < 1) throw Error(ErrorCode::kDimensionMismatch, "ball dimension must be >= 1");
  return sample_ball_coords(D, 1.0, rng);
}

Vector sample_on_subspace(const Subspace& L, Rng& rng) {
  return L.basis() * sample_ball_coords(L.dim(), 1.0, rng);
}

Vector sample_noisy_cylinder(const Subspace& L, double eps, Rng& rng) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidNoise, "cylinder radius must be > 0");
  return sample_cylinder(L, orthonormal_complement(L), eps, rng);
}

PointCloud sample_mixture(const MixtureModel& model, Index N, Rng& rng) {
  model.validate();
  if (N < 1) throw Error(ErrorCode::kInvalidArgument, "sample size must be >= 1");
  if (model.subspaces.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "mixture needs at least one subspace to fix D");
  }
  const Index D = model.subspaces.front().ambient_dim();
  const bool noisy = model.noise > 0.0;

  std::vector<Matrix> complements;
  if (noisy) {
    for (const Subspace& L : model.subspaces) complements.push_back(orthonormal_complement(L));
  }

  std::vector<double> cdf(model.weights.size());
  std::partial_sum(model.weights.begin(), model.weights.end(), cdf.begin());
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < model.weights.size(); ++i)
    if (model.weights[i] > 0.0) last_positive = i;

  PointCloud cloud;
  cloud.points.resize(N, D);
  cloud.labels.emplace(N);
  cloud.num_components = static_cast<int>(model.subspaces.size());
  cloud.noise = model.noise;

  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (Index n = 0; n < N; ++n) {
    const double u = uniform(rng);
    // upper_bound never lands on a zero-weight component; the fallback
    // covers u beyond a cumulative total that rounded below 1.
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t comp = it == cdf.end() ? last_positive : static_cast<std::size_t>(it - cdf.begin());

    Vector x;
    if (comp == 0) {
      x = sample_unit_ball(D, rng);
    } else if (noisy) {
      x = sample_cylinder(model.subspaces[comp - 1], complements[comp - 1], model.noise, rng);
    } else {
      x = sample_on_subspace(model.subspaces[comp - 1], rng);
    }
    cloud.points.row(n) = x.transpose();
    (*cloud.labels)[n] = static_cast<int>(comp);
  }
  return cloud;
}

double secondary_weight(const MixtureModel& model) {
  double s = 0.0;
  for (std::size_t i = 2; i < model.weights.size(); ++i) s += model.weights[i];
  return s;
}

std::optional<double> noise_floor(const std::vector<double>& weights, Index d, double p) {
  if (weights.size() < 2) return std::nullopt;
  const std::size_t K = weights.size() - 1;
  const double dd = static_cast<double>(d);
  if (p <= 1.0) {
    double margin = weights[1];
    for (std::size_t i = 2; i < weights.size(); ++i) margin -= weights[i];
    if (margin <= 0.0) return std::nullopt;
    return std::numbers::pi * std::pow(margin, 1.0 / p) / (std::pow(2.0, (3.0 + 2.0 * p) / p) * dd);
  }
  if (K == 1) {
    return std::pow(std::numbers::pi, p) * weights[1] /
           (std::pow(2.0, 3.0 + 2.0 * p) * std::pow(dd, p) * p);
  }
  return std::nullopt;
}

ConditionReport validate_experiment_model(const MixtureModel& model, double p) {
  ConditionReport report;
  if (model.weights.size() < 2) {
    report.violations.push_back("model has no subspace component");
    return report;
  }
  const double a1 = model.weights[1];
  const double rest = secondary_weight(model);
  if (!(a1 > rest)) {
    std::ostringstream msg;
    msg << "alpha1 <= sum(alpha_i, i>=2): " << a1 << " <= " << rest
        << " (dominant-subspace condition violated)";
    report.violations.push_back(msg.str());
  }
  if (model.noise > 0.0 && !model.subspaces.empty()) {
    const auto floor = noise_floor(model.weights, model.subspaces.front().dim(), p);
    if (!floor) {
      report.violations.push_back("no near-recovery bound exists for this (K, p); noise not admissible");
    } else if (model.noise >= *floor) {
      std::ostringstream msg;
      msg << "noise " << model.noise << " >= floor " << *floor
          << " (near-recovery radius would cover the whole Grassmannian)";
      report.violations.push_back(msg.str());
    }
  }
  return report;
}

void write_point_cloud(std::ostream& out, const PointCloud& cloud) {
  out << std::setprecision(17);
  out << cloud.size() << ' ' << cloud.ambient_dim() << ' ' << cloud.num_components << ' '
      << cloud.noise << '\n';
  for (Index n = 0; n < cloud.size(); ++n) {
    for (Index j = 0; j < cloud.ambient_dim(); ++j) {
      if (j) out << ' ';
      out << cloud.points(n, j);
    }
    if (cloud.labels) out << ' ' << (*cloud.labels)[n];
    out << '\n';
  }
}

PointCloud read_point_cloud(std::istream& in) {
  PointCloud cloud;
  Index N = 0, D = 0;
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorCode::kIoError, "empty point cloud file");
  std::istringstream hs(header);
  if (!(hs >> N >> D >> cloud.num_components >> cloud.noise) || N < 1 || D < 1) {
    throw Error(ErrorCode::kIoError, "bad point cloud header, expected 'N D K epsilon'");
  }
  cloud.points.resize(N, D);
  std::vector<int> labels;
  std::string line;
  for (Index n = 0; n < N; ++n) {
    if (!std::getline(in, line)) throw Error(ErrorCode::kIoError, "point cloud truncated");
    std::istringstream ls(line);
    for (Index j = 0; j < D; ++j) {
      if (!(ls >> cloud.points(n, j))) {
        std::ostringstream msg;
        msg << "line " << (n + 2) << ": expected " << D << " coordinates";
        throw Error(ErrorCode::kIoError, msg.str());
      }
    }
    int label = 0;
    if (ls >> label) {
      if (n != 0 && labels.size() != static_cast<std::size_t>(n)) {
        throw Error(ErrorCode::kIoError, "labels must be present on every line or none");
      }
      labels.push_back(label);
    } else if (!labels.empty()) {
      throw Error(ErrorCode::kIoError, "labels must be present on every line or none");
    }
  }
  if (!labels.empty()) cloud.labels = std::move(labels);
  return cloud;
}

}  // namespace lpsub
