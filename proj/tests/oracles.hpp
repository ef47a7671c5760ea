#pragma once

// Reference computations that share no code path with the library: they
// work from raw bases, projectors and brute force.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "lpsub/common.hpp"

namespace oracle {

using lpsub::Index;
using lpsub::Matrix;
using lpsub::Vector;

// Modified Gram-Schmidt on the columns of a.
inline Matrix gram_schmidt(const Matrix& a) {
  Matrix q = a;
  for (Index j = 0; j < q.cols(); ++j) {
    for (Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    q.col(j) /= q.col(j).norm();
  }
  return q;
}

inline Matrix projector(const Matrix& raw) {
  const Matrix q = gram_schmidt(raw);
  return q * q.transpose();
}

// Principal angles, decreasing, from the spectrum of P_F P_G P_F: its top d
// eigenvalues are the squared cosines.
inline Vector angles_from_projectors(const Matrix& raw_f, const Matrix& raw_g) {
  const Matrix pf = projector(raw_f);
  const Matrix pg = projector(raw_g);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(pf * pg * pf);
  const Index d = raw_f.cols();
  Vector cos2 = eig.eigenvalues().tail(d);  // ascending
  Vector out(d);
  for (Index i = 0; i < d; ++i) out(i) = std::acos(std::sqrt(std::clamp(cos2(i), 0.0, 1.0)));
  return out;
}

inline double grassmann_distance(const Matrix& raw_f, const Matrix& raw_g) {
  return angles_from_projectors(raw_f, raw_g).norm();
}

// min_c ||x - A c|| through the normal equations; A need not be orthonormal.
inline double distance_ls(const Vector& x, const Matrix& a) {
  const Vector c = (a.transpose() * a).ldlt().solve(a.transpose() * x);
  return (x - a * c).norm();
}

inline double energy(const Matrix& points, const std::vector<Matrix>& raw_bases, double p) {
  double total = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    double best = INFINITY;
    for (const Matrix& a : raw_bases) best = std::min(best, distance_ls(points.row(i).transpose(), a));
    total += std::pow(best, p);
  }
  return total;
}

// Minimum over all permutations of the maximum pairwise cost.
inline double bottleneck_bruteforce(const Matrix& cost) {
  std::vector<Index> perm(static_cast<std::size_t>(cost.rows()));
  std::iota(perm.begin(), perm.end(), Index{0});
  double best = INFINITY;
  do {
    double worst = 0.0;
    for (Index i = 0; i < cost.rows(); ++i) worst = std::max(worst, cost(i, perm[i]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Sum of singular values via the eigenvalues of M M^T.
inline double nuclear_norm(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m * m.transpose());
  double s = 0.0;
  for (Index i = 0; i < eig.eigenvalues().size(); ++i) s += std::sqrt(std::max(0.0, eig.eigenvalues()(i)));
  return s;
}

inline double central_difference(const std::function<double(double)>& f, double h) {
  return (f(h) - f(-h)) / (2.0 * h);
}

// Kolmogorov-Smirnov statistic sqrt(n) * sup |F_n - F| against a CDF.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    sup = std::max({sup, std::abs(static_cast<double>(i + 1) / n - f), std::abs(f - static_cast<double>(i) / n)});
  }
  return std::sqrt(n) * sup;
}

// sqrt(n) * D_n critical value at significance 0.001 (asymptotic).
inline constexpr double kKsCritical001 = 1.9495;
// Chi-square critical value, 19 degrees of freedom, significance 0.001.
inline constexpr double kChiSquare19Critical001 = 43.82;

}  // namespace oracle
