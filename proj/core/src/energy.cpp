#include "lpsub/energy.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace lpsub {

namespace {

void require_points(PointsRef X, Index D) {
  if (X.cols() != D) {
    std::ostringstream msg;
    msg << "points have " << X.cols() << " coordinates, subspace lives in R^" << D;
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
}

// (r^2 + mu^2)^(p/2) - mu^p without cancellation for r << mu.
double smoothed_power(double r, double p, double mu) {
  if (mu == 0.0) return std::pow(r, p);
  const double q = r / mu;
  return std::pow(mu, p) * std::expm1(0.5 * p * std::log1p(q * q));
}

// d/d(r^2) of the smoothed term, times 2/p: (r^2 + mu^2)^(p/2 - 1).
double smoothed_weight(double r, double p, double mu) {
  if (mu > 0.0) return std::pow(r * r + mu * mu, 0.5 * p - 1.0);
  if (r > 0.0) return std::pow(r, p - 2.0);
  return p == 2.0 ? 1.0 : 0.0;
}

double sum_terms(const Vector& dist, const EnergyParams& params) {
  std::vector<double> terms(static_cast<std::size_t>(dist.size()));
  for (Index i = 0; i < dist.size(); ++i) terms[i] = smoothed_power(dist(i), params.p, params.smoothing_mu);
  return pairwise_sum(terms);
}

Matrix frame_rotation_scaled(const DirectionSpec& dir) {
  return dir.rates.asDiagonal() * dir.rotation;
}

}  // namespace

void EnergyParams::validate() const {
  if (!(p > 0.0)) throw Error(ErrorCode::kInvalidArgument, "exponent p must be > 0");
  if (!(smoothing_mu >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "smoothing must be >= 0");
}

SubspaceFrame::SubspaceFrame(Subspace L)
    : subspace(std::move(L)), complement(orthonormal_complement(subspace)) {}

Vector point_distances(PointsRef X, const Subspace& L) {
  require_points(X, L.ambient_dim());
  const Matrix& Q = L.basis();
  return (X - (X * Q) * Q.transpose()).rowwise().norm();
}

double energy_single(PointsRef X, const Subspace& L, const EnergyParams& params) {
  params.validate();
  return sum_terms(point_distances(X, L), params);
}

double energy_multi(PointsRef X, std::span<const Subspace> Ls, const EnergyParams& params) {
  params.validate();
  if (Ls.empty()) throw Error(ErrorCode::kInvalidArgument, "need at least one subspace");
  Vector best = point_distances(X, Ls[0]);
  for (std::size_t j = 1; j < Ls.size(); ++j) best = best.cwiseMin(point_distances(X, Ls[j]));
  return sum_terms(best, params);
}

std::vector<int> voronoi_assign(PointsRef X, std::span<const Subspace> Ls) {
  if (Ls.empty()) throw Error(ErrorCode::kInvalidArgument, "need at least one subspace");
  Vector best = point_distances(X, Ls[0]);
  std::vector<int> label(static_cast<std::size_t>(X.rows()), 1);
  for (std::size_t j = 1; j < Ls.size(); ++j) {
    const Vector dj = point_distances(X, Ls[j]);
    for (Index i = 0; i < X.rows(); ++i) {
      if (dj(i) < best(i)) {
        best(i) = dj(i);
        label[i] = static_cast<int>(j) + 1;
      }
    }
  }
  return label;
}

Index ell0_count(PointsRef X, const Subspace& L, double tol) {
  if (!(tol >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be >= 0");
  return (point_distances(X, L).array() <= tol).count();
}

EnergyGradient energy_gradient(PointsRef X, const Subspace& L, const EnergyParams& params) {
  require_points(X, L.ambient_dim());
  const Matrix& Q = L.basis();
  const Matrix coords = X * Q;
  const Matrix resid = X - coords * Q.transpose();
  const Vector dist = resid.rowwise().norm();

  Vector weight(dist.size());
  for (Index i = 0; i < dist.size(); ++i) weight(i) = smoothed_weight(dist(i), params.p, params.smoothing_mu);

  EnergyGradient out;
  out.energy = sum_terms(dist, params);
  out.gradient = -params.p * (resid.transpose() * weight.asDiagonal() * coords);
  return out;
}

Matrix outlying_correlation(const SubspaceFrame& frame, PointsRef X) {
  require_points(X, frame.ambient_dim());
  const Matrix inner = X * frame.subspace.basis();
  const Matrix outer = X * frame.complement;
  Matrix B = Matrix::Zero(frame.dim(), frame.complement.cols());
  for (Index i = 0; i < X.rows(); ++i) {
    const double dist = outer.row(i).norm();
    if (dist <= kOnSubspaceTol) continue;
    B.noalias() += inner.row(i).transpose() * outer.row(i) / dist;
  }
  return B;
}

Matrix d_operator(const SubspaceFrame& frame, const VectorRef& x, double p) {
  if (x.size() != frame.ambient_dim()) throw Error(ErrorCode::kDimensionMismatch, "point dimension");
  const Vector inner = frame.subspace.basis().transpose() * x;
  const Vector outer = frame.complement.transpose() * x;
  const double dist = outer.norm();
  if (dist <= kOnSubspaceTol && p < 2.0) {
    throw Error(ErrorCode::kSingularPoint, "point lies on the subspace and p < 2");
  }
  const double scale = p == 2.0 ? 1.0 : std::pow(dist, p - 2.0);
  return inner * outer.transpose() * scale;
}

void DirectionSpec::validate(Index D, Index d) const {
  const Index k = interaction_dim();
  if (rates.size() != d || rotation.rows() != d || rotation.cols() != d ||
      normal_dirs.cols() != D - d || k > d || k > D - d) {
    throw Error(ErrorCode::kInvalidArgument, "direction spec has inconsistent shapes");
  }
  if ((rates.array() < 0.0).any()) throw Error(ErrorCode::kInvalidArgument, "rates must be >= 0");
  if (d > k && (rates.tail(d - k).array() != 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "rates beyond the interaction dimension must be 0");
  }
  if ((rotation.transpose() * rotation - Matrix::Identity(d, d)).norm() > 1e-10) {
    throw Error(ErrorCode::kInvalidArgument, "rotation is not orthogonal");
  }
  if ((normal_dirs * normal_dirs.transpose() - Matrix::Identity(k, k)).norm() > 1e-10) {
    throw Error(ErrorCode::kInvalidArgument, "normal directions are not orthonormal");
  }
}

Subspace along_direction(const SubspaceFrame& frame, const DirectionSpec& dir, double t) {
  dir.validate(frame.ambient_dim(), frame.dim());
  const Matrix moving = frame.subspace.basis() * dir.rotation.transpose();
  const Matrix partners = frame.complement * dir.normal_dirs.transpose();
  Matrix basis = moving;
  for (Index j = 0; j < dir.interaction_dim(); ++j) {
    const double a = t * dir.rates(j);
    basis.col(j) = std::cos(a) * moving.col(j) + std::sin(a) * partners.col(j);
  }
  return orthonormalize(basis);
}

double trace_k(const Eigen::Ref<const Matrix>& m, Index k) {
  double s = 0.0;
  for (Index j = 0; j < k; ++j) s += m(j, j);
  return s;
}

double directional_derivative_l1(const SubspaceFrame& frame, PointsRef X, const DirectionSpec& dir) {
  return directional_derivative_lp(frame, X, dir, 1.0, Parametrization::kTime);
}

double directional_derivative_lp(const SubspaceFrame& frame, PointsRef X, const DirectionSpec& dir,
                                 double p, Parametrization param) {
  require_points(X, frame.ambient_dim());
  dir.validate(frame.ambient_dim(), frame.dim());
  if (!(p > 0.0)) throw Error(ErrorCode::kInvalidArgument, "exponent p must be > 0");
  if (param == Parametrization::kTimePower && p > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "the t^p parametrization applies to p <= 1");
  }
  if (p == 1.0) param = Parametrization::kTime;

  const Index k = dir.interaction_dim();
  const Matrix cv = frame_rotation_scaled(dir);
  const Matrix inner = X * frame.subspace.basis();
  const Matrix outer = X * frame.complement;

  std::vector<double> inlier_terms;
  Matrix D_sum = Matrix::Zero(frame.dim(), frame.complement.cols());
  for (Index i = 0; i < X.rows(); ++i) {
    const double dist = outer.row(i).norm();
    if (dist <= kOnSubspaceTol) {
      const double speed = (cv * inner.row(i).transpose()).norm();
      if (param == Parametrization::kTimePower) {
        inlier_terms.push_back(std::pow(speed, p));
      } else if (p == 1.0) {
        inlier_terms.push_back(speed);
      } else if (p < 1.0) {
        throw Error(ErrorCode::kNonsmoothPoint,
                    "a point lies on the subspace; use the t^p parametrization for p < 1");
      }
      continue;
    }
    if (param == Parametrization::kTimePower) continue;
    const double scale = p == 2.0 ? 1.0 : std::pow(dist, p - 2.0);
    D_sum.noalias() += inner.row(i).transpose() * outer.row(i) * scale;
  }
  const double inlier_part = pairwise_sum(inlier_terms);
  if (param == Parametrization::kTimePower) return inlier_part;
  const Matrix moved = cv * D_sum * dir.normal_dirs.transpose();
  return inlier_part - p * trace_k(moved, k);
}

NuclearBound nuclear_bound(const VectorRef& rates, const Eigen::Ref<const Matrix>& rotation,
                           const Eigen::Ref<const Matrix>& B, Index k) {
  const Index d = rotation.rows();
  if (rates.size() != d || rotation.cols() != d || B.rows() != d || k < 0 || k > d || k > B.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "nuclear bound operands have inconsistent shapes");
  }
  const Matrix M = rates.asDiagonal() * rotation * B;
  NuclearBound out;
  out.value = Eigen::JacobiSVD<Matrix>(M).singularValues().sum();
  if (k == 0) {
    out.maximizer.resize(0, B.cols());
    return out;
  }
  // With M_k = U0 S V0^T (first k rows), U = U0 V0_k^T gives tr(M_k U^T) = tr S.
  Eigen::JacobiSVD<Matrix> svd(M.topRows(k), Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.maximizer = svd.matrixU() * svd.matrixV().leftCols(k).transpose();
  return out;
}

Certificate check_sufficient_l1(const SubspaceFrame& frame, PointsRef X, int n_samples, Rng& rng) {
  require_points(X, frame.ambient_dim());
  if (n_samples < 0) throw Error(ErrorCode::kInvalidArgument, "n_samples must be >= 0");
  const Index d = frame.dim();
  const Index codim = frame.complement.cols();
  const Index k = std::min(d, codim);

  const Matrix B = outlying_correlation(frame, X);
  const Matrix outer = X * frame.complement;
  std::vector<Index> on_subspace;
  for (Index i = 0; i < X.rows(); ++i)
    if (outer.row(i).norm() <= kOnSubspaceTol) on_subspace.push_back(i);
  Matrix inliers(static_cast<Index>(on_subspace.size()), d);
  const Matrix inner = X * frame.subspace.basis();
  for (std::size_t r = 0; r < on_subspace.size(); ++r) inliers.row(r) = inner.row(on_subspace[r]);

  Certificate cert;
  cert.condition = "sufficient_l1";
  double best_margin = std::numeric_limits<double>::infinity();

  auto evaluate = [&](const Vector& rates, const Matrix& rotation) {
    ++cert.n_samples;
    const Vector speeds = (inliers * rotation.transpose() * rates.asDiagonal()).rowwise().norm();
    const std::vector<double> terms(speeds.data(), speeds.data() + speeds.size());
    const double lhs = pairwise_sum(terms);
    NuclearBound nb = nuclear_bound(rates, rotation, B, k);
    const double margin = lhs - nb.value;
    if (cert.status == CertificateStatus::kViolated) return;
    if (margin <= 0.0) {
      cert.status = CertificateStatus::kViolated;
      cert.lhs = lhs;
      cert.rhs = nb.value;
      cert.witness = DirectionSpec{rates, rotation, std::move(nb.maximizer)};
    } else if (margin < best_margin) {
      best_margin = margin;
      cert.lhs = lhs;
      cert.rhs = nb.value;
    }
  };

  // Canonical candidates: each coordinate axis of L moving alone, then all
  // admissible axes moving together.
  for (Index j = 0; j < d; ++j) {
    Matrix rotation = Matrix::Identity(d, d);
    rotation.row(0).swap(rotation.row(j));
    Vector rates = Vector::Zero(d);
    rates(0) = 1.0;
    evaluate(rates, rotation);
  }
  {
    Vector rates = Vector::Zero(d);
    rates.head(k).setConstant(1.0 / std::sqrt(static_cast<double>(k)));
    evaluate(rates, Matrix::Identity(d, d));
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < n_samples; ++s) {
    Matrix rotation = random_orthogonal(d, rng);
    Vector rates = Vector::Zero(d);
    for (Index j = 0; j < k; ++j) rates(j) = std::abs(normal(rng));
    if (rates.norm() == 0.0) rates(0) = 1.0;
    rates /= rates.norm();
    evaluate(rates, rotation);
  }
  return cert;
}

NecessaryCheck check_necessary_p_gt1(const SubspaceFrame& frame, PointsRef outliers, double p,
                                     double tol) {
  require_points(outliers, frame.ambient_dim());
  if (!(p > 1.0)) throw Error(ErrorCode::kInvalidArgument, "the necessary condition needs p > 1");
  Matrix total = Matrix::Zero(frame.dim(), frame.complement.cols());
  for (Index i = 0; i < outliers.rows(); ++i) total += d_operator(frame, outliers.row(i).transpose(), p);
  NecessaryCheck out;
  out.norm = total.norm();
  out.satisfied = out.norm < tol;
  return out;
}

const char* to_string(CertificateStatus status) {
  return status == CertificateStatus::kViolated ? "violated" : "holds_sampled";
}

namespace {
void write_row_major(std::ostream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    if (i) out << " ;";
    for (Index j = 0; j < m.cols(); ++j) out << ' ' << m(i, j);
  }
}
}  // namespace

void write_certificate(std::ostream& out, const Certificate& cert) {
  out << std::setprecision(17);
  out << "condition: " << cert.condition << '\n';
  out << "n_samples: " << cert.n_samples << '\n';
  out << "status: " << to_string(cert.status) << '\n';
  out << "lhs: " << cert.lhs << '\n';
  out << "rhs: " << cert.rhs << '\n';
  if (cert.witness) {
    out << "witness.rates:";
    write_row_major(out, cert.witness->rates.transpose());
    out << "\nwitness.rotation:";
    write_row_major(out, cert.witness->rotation);
    out << "\nwitness.normal_dirs:";
    write_row_major(out, cert.witness->normal_dirs);
    out << '\n';
  }
}

}  // namespace lpsub
