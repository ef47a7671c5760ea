#include "lpsub/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace lpsub {

namespace {

void require_shape(Index D, Index d) {
  if (d < 1 || d >= D) {
    std::ostringstream msg;
    msg << "subspace dimension must satisfy 1 <= d < D, got D=" << D << " d=" << d;
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
}

void require_same_shape(const Subspace& F, const Subspace& G) {
  if (F.ambient_dim() != G.ambient_dim() || F.dim() != G.dim()) {
    std::ostringstream msg;
    msg << "subspaces differ in shape: (" << F.ambient_dim() << "," << F.dim() << ") vs ("
        << G.ambient_dim() << "," << G.dim() << ")";
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
}

void require_point(const VectorRef& x, const Subspace& L) {
  if (x.size() != L.ambient_dim()) {
    std::ostringstream msg;
    msg << "point has " << x.size() << " coordinates, subspace lives in R^" << L.ambient_dim();
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
}

double orthonormality_error(const Matrix& basis) {
  const Index d = basis.cols();
  return (basis.transpose() * basis - Matrix::Identity(d, d)).norm();
}

// Columns are orthonormal up to rounding; clean them up when they drifted.
Subspace renormalized(Matrix basis) {
  if (orthonormality_error(basis) <= Subspace::kOrthonormalTol) {
    return Subspace::from_orthonormal(std::move(basis));
  }
  return orthonormalize(basis);
}

}  // namespace

Subspace Subspace::from_orthonormal(Matrix basis) {
  require_shape(basis.rows(), basis.cols());
  const double err = orthonormality_error(basis);
  if (!(err <= kOrthonormalTol)) {
    std::ostringstream msg;
    msg << "basis columns are not orthonormal (||B^T B - I||_F = " << err << ")";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  return Subspace(std::move(basis));
}

bool Subspace::same_span(const Subspace& other, double tol) const {
  if (ambient_dim() != other.ambient_dim() || dim() != other.dim()) return false;
  return (projector() - other.projector()).norm() < tol;
}

Subspace orthonormalize(const Eigen::Ref<const Matrix>& raw) {
  const Index D = raw.rows();
  const Index d = raw.cols();
  require_shape(D, d);
  Eigen::ColPivHouseholderQR<Matrix> qr(raw);
  qr.setThreshold(1e-10);
  if (qr.rank() < d) {
    std::ostringstream msg;
    msg << "input has numerical rank " << qr.rank() << " but " << d << " columns";
    throw Error(ErrorCode::kRankDeficient, msg.str());
  }
  Matrix q = qr.householderQ() * Matrix::Identity(D, d);
  return Subspace::from_orthonormal(std::move(q));
}

Matrix orthonormal_complement(const Subspace& L) {
  const Index D = L.ambient_dim();
  const Index d = L.dim();
  Eigen::HouseholderQR<Matrix> qr(L.basis());
  Matrix full = qr.householderQ() * Matrix::Identity(D, D);
  return full.rightCols(D - d);
}

Vector project(const VectorRef& x, const Subspace& L) {
  require_point(x, L);
  return L.basis() * (L.basis().transpose() * x);
}

Vector project_perp(const VectorRef& x, const Subspace& L) {
  require_point(x, L);
  return x - L.basis() * (L.basis().transpose() * x);
}

double dist_point_subspace(const VectorRef& x, const Subspace& L) {
  return project_perp(x, L).norm();
}

PrincipalDecomposition principal_decomposition(const Subspace& F, const Subspace& G) {
  require_same_shape(F, G);
  const Index d = F.dim();
  const Matrix& bf = F.basis();
  const Matrix& bg = G.basis();

  Eigen::JacobiSVD<Matrix> svd(bf.transpose() * bg, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix vf = bf * svd.matrixU();
  const Matrix vg = bg * svd.matrixV();
  // Part of each g-vector orthogonal to F; its norm is sin(theta).
  const Matrix resid = vg - bf * (bf.transpose() * vg);

  // SVD orders cosines decreasingly; reverse so angles decrease.
  PrincipalDecomposition pd;
  pd.angles.resize(d);
  pd.vectors_f.resize(bf.rows(), d);
  pd.vectors_g.resize(bf.rows(), d);
  pd.complementary.resize(bf.rows(), d);
  for (Index i = 0; i < d; ++i) {
    const Index src = d - 1 - i;
    const double cosine = std::clamp(svd.singularValues()(src), 0.0, 1.0);
    const double sine = resid.col(src).norm();
    const double theta = std::atan2(sine, cosine);
    pd.angles(i) = theta;
    pd.vectors_f.col(i) = vf.col(src);
    pd.vectors_g.col(i) = vg.col(src);
    if (theta > kZeroAngle) {
      pd.complementary.col(i) = resid.col(src) / sine;
      ++pd.interaction_dim;
    } else {
      pd.complementary.col(i) = vf.col(src);
    }
  }
  return pd;
}

double grassmann_distance(const Subspace& F, const Subspace& G) {
  return principal_decomposition(F, G).angles.norm();
}

Subspace geodesic(const Subspace& F, const Subspace& G, double t) {
  const PrincipalDecomposition pd = principal_decomposition(F, G);
  if (pd.angles(0) >= std::numbers::pi / 2 - 1e-9) {
    std::ostringstream msg;
    msg << "largest principal angle " << pd.angles(0) << " is pi/2; the geodesic is not unique";
    throw Error(ErrorCode::kGeodesicNotUnique, msg.str());
  }
  Matrix basis(F.ambient_dim(), F.dim());
  for (Index i = 0; i < F.dim(); ++i) {
    const double a = t * pd.angles(i);
    basis.col(i) = std::cos(a) * pd.vectors_f.col(i) + std::sin(a) * pd.complementary.col(i);
  }
  return renormalized(std::move(basis));
}

Subspace exp_map(const Subspace& L, const Eigen::Ref<const Matrix>& tangent, double t) {
  if (tangent.rows() != L.ambient_dim() || tangent.cols() != L.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "tangent shape does not match subspace");
  }
  Eigen::JacobiSVD<Matrix> svd(tangent, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector angles = t * svd.singularValues();
  Matrix basis = L.basis() * svd.matrixV() * angles.array().cos().matrix().asDiagonal();
  basis += svd.matrixU() * angles.array().sin().matrix().asDiagonal();
  return renormalized(std::move(basis));
}

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

Subspace random_subspace(Index D, Index d, Rng& rng) {
  require_shape(D, d);
  // A Gaussian D x d matrix has full rank with probability one; retry anyway.
  for (;;) {
    Matrix g = gaussian_matrix(D, d, rng);
    try {
      return orthonormalize(g);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kRankDeficient) throw;
    }
  }
}

Matrix random_orthogonal(Index n, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(n, n, rng));
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  return q;
}

void write_subspace(std::ostream& out, const Subspace& L) {
  out << L.ambient_dim() << ' ' << L.dim() << '\n';
  out << std::setprecision(17);
  for (Index i = 0; i < L.ambient_dim(); ++i) {
    for (Index j = 0; j < L.dim(); ++j) {
      if (j) out << ' ';
      out << L.basis()(i, j);
    }
    out << '\n';
  }
}

std::vector<Subspace> read_subspaces(std::istream& in) {
  std::vector<Subspace> out;
  Index D = 0, d = 0;
  while (in >> D >> d) {
    require_shape(D, d);
    Matrix basis(D, d);
    for (Index i = 0; i < D; ++i)
      for (Index j = 0; j < d; ++j)
        if (!(in >> basis(i, j))) throw Error(ErrorCode::kIoError, "truncated subspace block");
    out.push_back(renormalized(std::move(basis)));
  }
  if (!in.eof()) throw Error(ErrorCode::kIoError, "malformed subspace header");
  return out;
}

}  // namespace lpsub
