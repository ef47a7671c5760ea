#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpsub/grassmann.hpp"

namespace lpsub {

/// Exponent p > 0 and smoothing mu >= 0. With mu > 0 each term
/// dist^p is replaced by (dist^2 + mu^2)^(p/2) - mu^p, which is smooth,
/// monotone in dist and exact at mu = 0.
struct EnergyParams {
  double p = 1.0;
  double smoothing_mu = 0.0;

  void validate() const;
};

/// Points within this distance of a subspace count as lying on it.
inline constexpr double kOnSubspaceTol = 1e-9;

/// A subspace together with a fixed orthonormal basis of its complement.
/// Every matrix that mixes L and L^perp coordinates within one evaluation
/// is expressed in this frame.
struct SubspaceFrame {
  explicit SubspaceFrame(Subspace L);

  Subspace subspace;
  Matrix complement;  // D x (D - d)

  Index ambient_dim() const { return subspace.ambient_dim(); }
  Index dim() const { return subspace.dim(); }
};

/// dist(x_i, L) for every row of X.
Vector point_distances(PointsRef X, const Subspace& L);

double energy_single(PointsRef X, const Subspace& L, const EnergyParams& params);

/// sum_x min_j dist(x, L_j)^p. Throws kInvalidArgument on an empty list.
double energy_multi(PointsRef X, std::span<const Subspace> Ls, const EnergyParams& params);

/// 1-based index of the nearest subspace for each point; ties go to the
/// lowest index.
std::vector<int> voronoi_assign(PointsRef X, std::span<const Subspace> Ls);

/// Number of points with dist(x, L) <= tol.
Index ell0_count(PointsRef X, const Subspace& L, double tol);

/// Smoothed energy and its Riemannian gradient (D x d, orthogonal to L).
/// At mu = 0 and p < 2 points exactly on L contribute a zero subgradient.
struct EnergyGradient {
  double energy = 0.0;
  Matrix gradient;
};
EnergyGradient energy_gradient(PointsRef X, const Subspace& L, const EnergyParams& params);

/// sum over x not on L of P_L(x) P_L^perp(x)^T / dist(x, L), as a
/// d x (D - d) matrix in frame coordinates.
Matrix outlying_correlation(const SubspaceFrame& frame, PointsRef X);

/// P_L(x) P_L^perp(x)^T dist(x, L)^(p - 2) in frame coordinates. Throws
/// kSingularPoint for x on L when p < 2.
Matrix d_operator(const SubspaceFrame& frame, const VectorRef& x, double p);

/// A direction of motion away from a subspace L along a geodesic.
///
/// The j-th moving direction of L has frame coordinates rotation.row(j); it
/// turns towards the L^perp direction normal_dirs.row(j) at angular rate
/// rates(j). Only the first k = normal_dirs.rows() rates may be non-zero.
struct DirectionSpec {
  Vector rates;        // d, >= 0
  Matrix rotation;     // d x d, orthogonal
  Matrix normal_dirs;  // k x (D - d), orthonormal rows

  Index interaction_dim() const { return normal_dirs.rows(); }

  /// Throws kInvalidArgument when the spec is malformed for G(D, d).
  void validate(Index D, Index d) const;
};

/// Point L(t) on the geodesic leaving frame.subspace along `dir`.
Subspace along_direction(const SubspaceFrame& frame, const DirectionSpec& dir, double t);

/// Trace of the first k rows of m.
double trace_k(const Eigen::Ref<const Matrix>& m, Index k);

/// Right derivative at t = 0 of e_l1(X, L(t)) along `dir`. Points on L
/// contribute ||C V x||, the rest enter through the outlying correlation.
double directional_derivative_l1(const SubspaceFrame& frame, PointsRef X, const DirectionSpec& dir);

/// kTime: d/dt of e_lp(X, L(t)) at t = 0. Points on L contribute 0 for
/// p > 1, ||C V x|| for p = 1, and make the derivative infinite for p < 1
/// (kNonsmoothPoint).
///
/// kTimePower: derivative with respect to t^p for p <= 1, i.e. the limit of
/// (e(t) - e(0)) / t^p, which only sees the points on L.
enum class Parametrization { kTime, kTimePower };

double directional_derivative_lp(const SubspaceFrame& frame, PointsRef X, const DirectionSpec& dir,
                                 double p, Parametrization param = Parametrization::kTime);

/// ||C V B||_* together with the normal_dirs that attain
/// max tr_k(C V B U^T) = ||C V B||_* when only the first k rates are non-zero.
struct NuclearBound {
  double value = 0.0;
  Matrix maximizer;  // k x (D - d)
};
NuclearBound nuclear_bound(const VectorRef& rates, const Eigen::Ref<const Matrix>& rotation,
                           const Eigen::Ref<const Matrix>& B, Index k);

enum class CertificateStatus { kHoldsSampled, kViolated };

/// Outcome of a sampled local-minimality check. "holds_sampled" means no
/// sampled direction violated the inequality; it is not a proof.
struct Certificate {
  std::string condition;
  int n_samples = 0;  // directions evaluated, including canonical ones
  CertificateStatus status = CertificateStatus::kHoldsSampled;
  double lhs = 0.0;   // at the witness, or at the tightest sampled direction
  double rhs = 0.0;
  std::optional<DirectionSpec> witness;
};

/// Samples (C, V) pairs and tests sum_i ||C V x_i|| > ||C V B||_* over the
/// points on L. Inliers are the points within kOnSubspaceTol of L.
Certificate check_sufficient_l1(const SubspaceFrame& frame, PointsRef X, int n_samples, Rng& rng);

struct NecessaryCheck {
  double norm = 0.0;
  bool satisfied = false;
};

/// ||sum_i d_operator(L, y_i, p)||_F over the outliers; satisfied iff
/// below tol. Requires p > 1.
NecessaryCheck check_necessary_p_gt1(const SubspaceFrame& frame, PointsRef outliers, double p,
                                     double tol = 1e-9);

const char* to_string(CertificateStatus status);
void write_certificate(std::ostream& out, const Certificate& cert);

}  // namespace lpsub
