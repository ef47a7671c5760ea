#pragma once

#include <iosfwd>
#include <vector>

#include "lpsub/common.hpp"

namespace lpsub {

/// A d-dimensional linear subspace of R^D, held as a D x d matrix with
/// orthonormal columns. Two Subspace values describe the same point of
/// the Grassmannian iff their projectors agree; compare with same_span(),
/// never by basis.
class Subspace {
 public:
  /// Tolerance on ||B^T B - I||_F accepted by from_orthonormal().
  static constexpr double kOrthonormalTol = 1e-12;

  /// Wraps an already orthonormal basis. Throws kInvalidArgument when the
  /// columns are not orthonormal and kDimensionMismatch unless 1 <= d < D.
  static Subspace from_orthonormal(Matrix basis);

  const Matrix& basis() const noexcept { return basis_; }
  Index ambient_dim() const noexcept { return basis_.rows(); }
  Index dim() const noexcept { return basis_.cols(); }

  Matrix projector() const { return basis_ * basis_.transpose(); }

  /// Frobenius distance between projectors below tol.
  bool same_span(const Subspace& other, double tol = 1e-9) const;

 private:
  explicit Subspace(Matrix basis) : basis_(std::move(basis)) {}
  Matrix basis_;
};

/// Orthonormal basis for the column span of raw (D x d). Throws
/// kRankDeficient (naming the numerical rank) when rank < d.
Subspace orthonormalize(const Eigen::Ref<const Matrix>& raw);

/// Deterministic orthonormal basis of L^perp, D x (D - d).
Matrix orthonormal_complement(const Subspace& L);

Vector project(const VectorRef& x, const Subspace& L);
Vector project_perp(const VectorRef& x, const Subspace& L);
double dist_point_subspace(const VectorRef& x, const Subspace& L);

/// Principal angles and vectors between two subspaces of equal shape.
///
/// Angles are sorted non-increasing. For i < interaction_dim the
/// complementary vector satisfies g_i = cos(theta_i) f_i + sin(theta_i) u_i
/// with u_i orthogonal to F; for the remaining (zero) angles u_i = f_i.
struct PrincipalDecomposition {
  Vector angles;           // d, decreasing, in [0, pi/2]
  Matrix vectors_f;        // D x d, principal vectors of F
  Matrix vectors_g;        // D x d, principal vectors of G
  Matrix complementary;    // D x d, complementary system of G w.r.t. F
  Index interaction_dim = 0;
};

/// Angles below this are treated as exact zeros when counting the
/// interaction dimension.
inline constexpr double kZeroAngle = 1e-9;

PrincipalDecomposition principal_decomposition(const Subspace& F, const Subspace& G);

/// Geodesic distance sqrt(sum theta_i^2).
double grassmann_distance(const Subspace& F, const Subspace& G);

/// Point at parameter t on the geodesic from F (t = 0) to G (t = 1).
/// Throws kGeodesicNotUnique when the largest angle is within 1e-9 of pi/2.
Subspace geodesic(const Subspace& F, const Subspace& G, double t);

/// Follows the geodesic leaving L with initial velocity `tangent`
/// (D x d with L^T tangent = 0) for time t.
Subspace exp_map(const Subspace& L, const Eigen::Ref<const Matrix>& tangent, double t);

/// Draw from the rotation-invariant measure on G(D, d).
Subspace random_subspace(Index D, Index d, Rng& rng);

/// Haar-distributed n x n orthogonal matrix.
Matrix random_orthogonal(Index n, Rng& rng);

/// Standard normal D x d matrix.
Matrix gaussian_matrix(Index rows, Index cols, Rng& rng);

/// Text form: header line "D d", then D rows of d values written with 17
/// significant digits. Several subspaces may follow each other in one stream.
void write_subspace(std::ostream& out, const Subspace& L);
std::vector<Subspace> read_subspaces(std::istream& in);

}  // namespace lpsub
