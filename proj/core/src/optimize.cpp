#include "lpsub/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace lpsub {

namespace {

// Largest rotation taken in one step; keeps every step inside the region
// where the geodesic is unique.
constexpr double kMaxStepAngle = 0.5;
// Backtracking gives up below this angle: the energy cannot resolve it.
constexpr double kMinStepAngle = 1e-15;

Matrix gather_rows(PointsRef X, const std::vector<int>& labels, int label) {
  const auto n = std::count(labels.begin(), labels.end(), label);
  Matrix out(n, X.cols());
  Index r = 0;
  for (Index i = 0; i < X.rows(); ++i)
    if (labels[i] == label) out.row(r++) = X.row(i);
  return out;
}

struct RansacCandidate {
  Index count;
  Subspace subspace;
};

// All non-degenerate rounds, best count first, earlier rounds first on ties.
std::vector<RansacCandidate> ransac_rounds(PointsRef X, Index d, double strip_eps, int iters, Rng& rng,
                                           int* skipped) {
  if (X.rows() < d) {
    std::ostringstream msg;
    msg << "RANSAC needs at least d=" << d << " points, got " << X.rows();
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  if (iters < 1) throw Error(ErrorCode::kInvalidArgument, "RANSAC needs iters >= 1");
  if (!(strip_eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "RANSAC strip width must be > 0");

  std::vector<Index> pool(static_cast<std::size_t>(X.rows()));
  std::iota(pool.begin(), pool.end(), Index{0});
  std::vector<RansacCandidate> rounds;
  *skipped = 0;
  Matrix sample(X.cols(), d);
  for (int it = 0; it < iters; ++it) {
    // Partial Fisher-Yates: the first d entries of pool become the sample.
    for (Index j = 0; j < d; ++j) {
      std::uniform_int_distribution<Index> pick(j, X.rows() - 1);
      std::swap(pool[j], pool[pick(rng)]);
      sample.col(j) = X.row(pool[j]).transpose();
    }
    try {
      Subspace L = orthonormalize(sample);
      rounds.push_back({ell0_count(X, L, strip_eps), std::move(L)});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kRankDeficient && e.code() != ErrorCode::kDimensionMismatch) throw;
      ++*skipped;
    }
  }
  std::stable_sort(rounds.begin(), rounds.end(),
                   [](const RansacCandidate& a, const RansacCandidate& b) { return a.count > b.count; });
  return rounds;
}

// Up to `count` candidates pairwise further apart than min_sep.
std::vector<Subspace> distinct_candidates(const std::vector<RansacCandidate>& rounds, std::size_t count,
                                          double min_sep) {
  std::vector<Subspace> out;
  for (const RansacCandidate& c : rounds) {
    if (out.size() >= count) break;
    bool fresh = std::all_of(out.begin(), out.end(), [&](const Subspace& s) {
      return grassmann_distance(s, c.subspace) > min_sep;
    });
    if (fresh) out.push_back(c.subspace);
  }
  return out;
}

std::vector<Subspace> sequential_ransac(PointsRef X, Index d, Index K, const FitOptions& opts, Rng& rng) {
  std::vector<Subspace> tuple;
  Matrix remaining = X;
  for (Index j = 0; j < K; ++j) {
    if (remaining.rows() < std::max<Index>(d, 2)) {
      tuple.push_back(random_subspace(X.cols(), d, rng));
      continue;
    }
    int skipped = 0;
    auto rounds = ransac_rounds(remaining, d, opts.ransac_strip, opts.ransac_iters, rng, &skipped);
    if (rounds.empty()) {
      tuple.push_back(random_subspace(X.cols(), d, rng));
      continue;
    }
    const Subspace& L = rounds.front().subspace;
    const Vector dist = point_distances(remaining, L);
    std::vector<int> keep(static_cast<std::size_t>(remaining.rows()));
    for (Index i = 0; i < remaining.rows(); ++i) keep[i] = dist(i) > opts.ransac_strip ? 1 : 0;
    remaining = gather_rows(remaining, keep, 1);
    tuple.push_back(L);
  }
  return tuple;
}

}  // namespace

std::vector<double> default_mu_schedule(double p) {
  if (p >= 2.0) return {0.0};
  return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
}

void FitOptions::validate() const {
  if (!(p > 0.0)) throw Error(ErrorCode::kInvalidArgument, "p must be > 0");
  if (max_iters < 1) throw Error(ErrorCode::kInvalidArgument, "max_iters must be >= 1");
  if (!(tol_grad > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tol_grad must be > 0");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw Error(ErrorCode::kInvalidArgument, "armijo_c must be in (0,1)");
  if (!(step_init > 0.0)) throw Error(ErrorCode::kInvalidArgument, "step_init must be > 0");
  if (n_restarts < 1) throw Error(ErrorCode::kInvalidArgument, "n_restarts must be >= 1");
  for (std::size_t i = 0; i < mu_schedule.size(); ++i) {
    if (!(mu_schedule[i] >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "smoothing values must be >= 0");
    if (i > 0 && !(mu_schedule[i] < mu_schedule[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "mu_schedule must be strictly decreasing");
    }
  }
}

std::vector<double> FitOptions::schedule() const {
  return mu_schedule.empty() ? default_mu_schedule(p) : mu_schedule;
}

FitResult geodesic_descent(PointsRef X, const Subspace& init, const FitOptions& opts) {
  opts.validate();
  if (X.cols() != init.ambient_dim()) throw Error(ErrorCode::kDimensionMismatch, "points vs subspace");
  const double n = std::max<double>(1.0, static_cast<double>(X.rows()));
  const std::vector<double> schedule = opts.schedule();

  FitResult result;
  Subspace L = init;
  bool last_converged = false;
  for (std::size_t stage = 0; stage < schedule.size(); ++stage) {
    const EnergyParams params{opts.p, schedule[stage]};
    const bool final_stage = stage + 1 == schedule.size();
    // Intermediate stages only need to land near their smoothed minimizer.
    const double tol = final_stage ? opts.tol_grad : std::max(opts.tol_grad, 1e-2 * schedule[stage]);

    EnergyGradient eg = energy_gradient(X, L, params);
    double step = std::min(opts.step_init, kMaxStepAngle);
    bool converged = false;
    for (int it = 0; it < opts.max_iters; ++it) {
      const double gnorm = eg.gradient.norm();
      if (gnorm / n < tol) {
        converged = true;
        break;
      }
      const Matrix direction = -eg.gradient;
      double angle = step;
      bool accepted = false;
      Subspace candidate = L;
      double candidate_energy = 0.0;
      while (angle >= kMinStepAngle) {
        const double t = angle / gnorm;
        candidate = exp_map(L, direction, t);
        candidate_energy = energy_single(X, candidate, params);
        if (candidate_energy < eg.energy &&
            candidate_energy <= eg.energy - opts.armijo_c * t * gnorm * gnorm) {
          accepted = true;
          break;
        }
        angle *= 0.5;
      }
      if (!accepted) {
        // No decrease is resolvable in floating point: stationary.
        converged = true;
        break;
      }
      L = std::move(candidate);
      eg = energy_gradient(X, L, params);
      ++result.iterations;
      step = std::min(2.0 * angle, kMaxStepAngle);
      if (opts.record_trace) result.trace.push_back({static_cast<int>(stage), params.smoothing_mu, eg.energy});
    }
    last_converged = converged;
  }
  result.final_energy = energy_single(X, L, EnergyParams{opts.p, 0.0});
  result.subspaces.push_back(std::move(L));
  result.converged = last_converged;
  result.restarts_used = 1;
  return result;
}

Subspace principal_subspace(PointsRef X, Index d) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(X.transpose() * X);
  // Eigenvalues ascend; the last d eigenvectors span the principal subspace.
  return orthonormalize(eig.eigenvectors().rightCols(d).rowwise().reverse());
}

FitResult best_single_subspace(PointsRef X, Index d, const FitOptions& opts) {
  opts.validate();
  const Index D = X.cols();
  if (d < 1 || d >= D) throw Error(ErrorCode::kDimensionMismatch, "need 1 <= d < D");
  Rng rng = make_stream(opts.seed, 0, 0x51);

  std::vector<Subspace> starts;
  starts.push_back(principal_subspace(X, d));
  if (X.rows() >= d && opts.n_restarts > 1) {
    int skipped = 0;
    const auto rounds = ransac_rounds(X, d, opts.ransac_strip, opts.ransac_iters, rng, &skipped);
    const std::size_t room = static_cast<std::size_t>(std::min(2, opts.n_restarts - 1));
    for (Subspace& s : distinct_candidates(rounds, room, 0.1)) starts.push_back(std::move(s));
  }
  while (static_cast<int>(starts.size()) < opts.n_restarts) starts.push_back(random_subspace(D, d, rng));

  FitResult best;
  double best_energy = std::numeric_limits<double>::infinity();
  int iterations = 0;
  const EnergyParams exact{opts.p, 0.0};
  for (const Subspace& start : starts) {
    FitResult run = geodesic_descent(X, start, opts);
    iterations += run.iterations;
    const double start_energy = energy_single(X, start, exact);
    if (start_energy < best_energy) {
      best_energy = start_energy;
      best = run;
      best.subspaces = {start};
      best.final_energy = start_energy;
    }
    if (run.final_energy < best_energy) {
      best_energy = run.final_energy;
      best = std::move(run);
    }
  }
  best.iterations = iterations;
  best.restarts_used = static_cast<int>(starts.size());
  return best;
}

FitResult refine_k_subspaces(PointsRef X, std::vector<Subspace> init, const FitOptions& opts, Rng& rng) {
  opts.validate();
  if (init.empty()) throw Error(ErrorCode::kInvalidArgument, "need at least one subspace");
  const Index D = X.cols();
  const Index d = init.front().dim();
  const EnergyParams exact{opts.p, 0.0};

  FitResult result;
  std::vector<Subspace> current = std::move(init);
  std::vector<int> labels = voronoi_assign(X, current);
  std::vector<Subspace> best = current;
  double best_energy = energy_multi(X, current, exact);
  bool fits_converged = true;

  for (int alt = 0; alt < opts.max_alternations; ++alt) {
    fits_converged = true;
    for (std::size_t j = 0; j < current.size(); ++j) {
      const Matrix cluster = gather_rows(X, labels, static_cast<int>(j) + 1);
      if (cluster.rows() == 0) {
        current[j] = random_subspace(D, d, rng);
        ++result.reseeds;
        continue;
      }
      FitResult fit = geodesic_descent(cluster, current[j], opts);
      result.iterations += fit.iterations;
      fits_converged = fits_converged && fit.converged;
      current[j] = fit.subspace();
    }
    const double energy = energy_multi(X, current, exact);
    if (energy < best_energy) {
      best_energy = energy;
      best = current;
    }
    std::vector<int> next = voronoi_assign(X, current);
    if (next == labels) {
      result.converged = fits_converged;
      break;
    }
    labels = std::move(next);
  }
  result.subspaces = std::move(best);
  result.final_energy = best_energy;
  result.restarts_used = 1;
  return result;
}

FitResult best_k_subspaces(PointsRef X, Index d, Index K, const FitOptions& opts) {
  opts.validate();
  const Index D = X.cols();
  if (K < 1) throw Error(ErrorCode::kInvalidArgument, "K must be >= 1");
  if (d < 1 || d >= D) throw Error(ErrorCode::kDimensionMismatch, "need 1 <= d < D");

  FitResult best;
  double best_energy = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int reseeds = 0;
  for (int s = 0; s < opts.n_restarts; ++s) {
    Rng rng = make_stream(opts.seed, static_cast<std::uint64_t>(s), 0x4b);
    std::vector<Subspace> start;
    if (s == 0 && X.rows() >= d) {
      start = sequential_ransac(X, d, K, opts, rng);
    } else if (s == 1 && X.rows() >= d) {
      int skipped = 0;
      const auto rounds = ransac_rounds(X, d, opts.ransac_strip, opts.ransac_iters, rng, &skipped);
      start = distinct_candidates(rounds, static_cast<std::size_t>(K), 0.1);
    }
    while (static_cast<Index>(start.size()) < K) start.push_back(random_subspace(D, d, rng));

    FitResult run = refine_k_subspaces(X, std::move(start), opts, rng);
    iterations += run.iterations;
    reseeds += run.reseeds;
    if (run.final_energy < best_energy) {
      best_energy = run.final_energy;
      best = std::move(run);
    }
  }
  best.iterations = iterations;
  best.reseeds = reseeds;
  best.restarts_used = opts.n_restarts;
  return best;
}

RansacResult ransac_subspace(PointsRef X, Index d, double strip_eps, int iters, Rng& rng) {
  int skipped = 0;
  auto rounds = ransac_rounds(X, d, strip_eps, iters, rng, &skipped);
  if (rounds.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "every RANSAC sample was degenerate");
  }
  return RansacResult{std::move(rounds.front().subspace), rounds.front().count, skipped};
}

namespace {

// Kuhn's augmenting-path matching restricted to edges with cost <= limit.
bool perfect_matching(const Matrix& cost, double limit) {
  const Index K = cost.rows();
  std::vector<Index> match(static_cast<std::size_t>(K), -1);
  std::vector<char> seen;
  std::function<bool(Index)> augment = [&](Index i) {
    for (Index j = 0; j < K; ++j) {
      if (cost(i, j) > limit || seen[j]) continue;
      seen[j] = 1;
      if (match[j] < 0 || augment(match[j])) {
        match[j] = i;
        return true;
      }
    }
    return false;
  };
  for (Index i = 0; i < K; ++i) {
    seen.assign(static_cast<std::size_t>(K), 0);
    if (!augment(i)) return false;
  }
  return true;
}

}  // namespace

PermutationDistance permutation_distance(std::span<const Subspace> fit, std::span<const Subspace> truth) {
  if (fit.size() != truth.size() || fit.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "permutation distance needs two lists of equal, non-zero length");
  }
  const Index K = static_cast<Index>(fit.size());
  Matrix cost(K, K);
  for (Index i = 0; i < K; ++i)
    for (Index j = 0; j < K; ++j) cost(i, j) = grassmann_distance(fit[i], truth[j]);

  PermutationDistance out;
  if (K <= 8) {
    std::vector<Index> perm(static_cast<std::size_t>(K));
    std::iota(perm.begin(), perm.end(), Index{0});
    out.value = std::numeric_limits<double>::infinity();
    do {
      double worst = 0.0;
      for (Index i = 0; i < K; ++i) worst = std::max(worst, cost(i, perm[i]));
      out.value = std::min(out.value, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
  }

  std::vector<double> levels(cost.data(), cost.data() + cost.size());
  std::sort(levels.begin(), levels.end());
  std::size_t lo = 0, hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (perfect_matching(cost, levels[mid])) hi = mid;
    else lo = mid + 1;
  }
  out.value = levels[lo];
  out.exhaustive = false;
  return out;
}

}  // namespace lpsub
