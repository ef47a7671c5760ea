#pragma once

#include <random>

#include "lpsub/energy.hpp"
#include "lpsub/sampling.hpp"

namespace fixtures {

using namespace lpsub;

// Random direction with k in [1, min(d, D - d)] moving axes.
inline DirectionSpec random_direction(Index D, Index d, Rng& rng) {
  const Index kmax = std::min(d, D - d);
  const Index k = std::uniform_int_distribution<Index>(1, kmax)(rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  DirectionSpec dir;
  dir.rates = Vector::Zero(d);
  for (Index j = 0; j < k; ++j) dir.rates(j) = 0.2 + std::abs(normal(rng));
  dir.rotation = random_orthogonal(d, rng);
  dir.normal_dirs = random_orthogonal(D - d, rng).topRows(k);
  return dir;
}

// n points of the unit ball at distance >= gap from L.
inline Matrix points_off_subspace(const Subspace& L, Index n, double gap, Rng& rng) {
  Matrix X(n, L.ambient_dim());
  for (Index i = 0; i < n;) {
    const Vector x = sample_unit_ball(L.ambient_dim(), rng);
    if (dist_point_subspace(x, L) < gap) continue;
    X.row(i++) = x.transpose();
  }
  return X;
}

inline Matrix points_on_subspace(const Subspace& L, Index n, Rng& rng) {
  Matrix X(n, L.ambient_dim());
  for (Index i = 0; i < n; ++i) X.row(i) = sample_on_subspace(L, rng).transpose();
  return X;
}

inline Matrix stack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

inline Subspace axis_span(Index D, std::initializer_list<Index> axes) {
  Matrix basis = Matrix::Zero(D, static_cast<Index>(axes.size()));
  Index j = 0;
  for (Index a : axes) basis(a, j++) = 1.0;
  return Subspace::from_orthonormal(basis);
}

// Basis of the curve leaving L along dir, written out from its definition.
inline Matrix curve_basis(const SubspaceFrame& frame, const DirectionSpec& dir, double t) {
  Matrix basis = frame.subspace.basis() * dir.rotation.transpose();
  const Matrix partners = frame.complement * dir.normal_dirs.transpose();
  for (Index j = 0; j < dir.interaction_dim(); ++j) {
    basis.col(j) = std::cos(t * dir.rates(j)) * basis.col(j) + std::sin(t * dir.rates(j)) * partners.col(j);
  }
  return basis;
}

}  // namespace fixtures
