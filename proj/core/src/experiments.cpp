#include "lpsub/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

namespace lpsub {

namespace {

constexpr std::uint64_t kTruthSalt = 0x7472;
constexpr std::uint64_t kDataSalt = 0x6461;
constexpr std::uint64_t kFitSalt = 0x6669;
constexpr int kMaxTruthDraws = 10000;

const double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void reject(const std::string& what) { throw Error(ErrorCode::kConfigRejected, what); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) reject("bad number for '" + key + "': " + text);
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) reject("bad integer for '" + key + "': " + text);
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) reject("empty list for '" + key + "'");
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

double secondary(const std::vector<double>& alpha) {
  double s = 0.0;
  for (std::size_t i = 2; i < alpha.size(); ++i) s += alpha[i];
  return s;
}

double min_weight(const std::vector<double>& alpha) {
  return *std::min_element(alpha.begin() + 1, alpha.end());
}

double tau0(Index K, Index d, double p) {
  return 1.0 / (std::pow(2.0, 1.0 + p) * std::pow(static_cast<double>(K), p) *
                std::pow(static_cast<double>(d), 1.5 * p));
}

FitOptions trial_fit_options(const ExperimentConfig& cfg, double p, int trial) {
  FitOptions opts = cfg.fit;
  opts.p = p;
  Rng rng = make_stream(*cfg.seed, static_cast<std::uint64_t>(trial), kFitSalt);
  opts.seed = rng();
  return opts;
}

TrialRow base_row(const ExperimentConfig& cfg, double p, double eps, int trial) {
  TrialRow row;
  row.p = p;
  row.K = cfg.K;
  row.eps = eps;
  row.alpha0 = cfg.alpha[0];
  row.alpha1 = cfg.alpha.size() > 1 ? cfg.alpha[1] : 0.0;
  row.trial = trial;
  row.bound_f = kNaN;
  return row;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

TrialRow single_trial(const ExperimentConfig& cfg, double p, double eps, int trial) {
  TrialRow row = base_row(cfg, p, eps, trial);
  const auto truth = trial_truth(cfg, trial);
  const PointCloud cloud = trial_data(cfg, trial, eps);
  const auto start = std::chrono::steady_clock::now();
  const FitResult fit = best_single_subspace(cloud.points, cfg.d, trial_fit_options(cfg, p, trial));
  row.runtime_ms = elapsed_ms(start);
  row.distance = grassmann_distance(fit.subspace(), truth.front());
  row.energy = fit.final_energy;
  row.converged = fit.converged;
  return row;
}

TrialRow multi_trial(const ExperimentConfig& cfg, double p, double eps, int trial) {
  TrialRow row = base_row(cfg, p, eps, trial);
  const auto truth = trial_truth(cfg, trial);
  const PointCloud cloud = trial_data(cfg, trial, eps);
  const auto start = std::chrono::steady_clock::now();
  const FitResult fit = best_k_subspaces(cloud.points, cfg.d, cfg.K, trial_fit_options(cfg, p, trial));
  row.runtime_ms = elapsed_ms(start);
  row.distance = permutation_distance(fit.subspaces, truth).value;
  row.energy = fit.final_energy;
  row.converged = fit.converged;
  return row;
}

}  // namespace

const char* to_string(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::kBest: return "best";
    case ExperimentMode::kAll: return "all";
    case ExperimentMode::kNoisy: return "noisy";
    case ExperimentMode::kNoisyAll: return "noisy-all";
  }
  return "?";
}

ExperimentMode parse_mode(const std::string& name) {
  if (name == "best") return ExperimentMode::kBest;
  if (name == "all") return ExperimentMode::kAll;
  if (name == "noisy") return ExperimentMode::kNoisy;
  if (name == "noisy-all") return ExperimentMode::kNoisyAll;
  reject("unknown mode '" + name + "' (expected best, all, noisy or noisy-all)");
}

void ExperimentConfig::validate() const {
  if (!seed) reject("a seed is required");
  if (n_trials < 1) reject("trials must be >= 1");
  if (!(recovery_tol > 0.0)) reject("tol must be > 0");
  if (N < 1) reject("n must be >= 1");
  if (d < 1 || d >= D) reject("need 1 <= d < D");
  if (K < 1) reject("k must be >= 1");
  if (static_cast<Index>(alpha.size()) != K + 1) {
    std::ostringstream msg;
    msg << "alpha needs k+1 = " << (K + 1) << " weights, got " << alpha.size();
    reject(msg.str());
  }
  double total = 0.0;
  for (double a : alpha) {
    if (!(a >= 0.0)) reject("alpha weights must be non-negative");
    total += a;
  }
  if (std::abs(total - 1.0) > 1e-12) reject("alpha weights must sum to 1");
  if (p_grid.empty() || eps_grid.empty()) reject("p and eps grids must be non-empty");
  for (double p : p_grid)
    if (!(p > 0.0)) reject("p must be > 0");
  for (double e : eps_grid)
    if (!(e >= 0.0)) reject("eps must be >= 0");
  if (!(min_separation >= 0.0)) reject("min-sep must be >= 0");
  try {
    FitOptions probe = fit;
    probe.validate();
  } catch (const Error& e) {
    reject(e.what());
  }

  const double a1 = alpha[1];
  const double rest = secondary(alpha);
  std::ostringstream dominant;
  dominant << "alpha1 <= sum(alpha_i, i>=2): " << a1 << " <= " << rest
           << " (dominant-subspace condition violated)";

  const bool multi = mode == ExperimentMode::kAll || mode == ExperimentMode::kNoisyAll;
  if (multi && nu0 && !(alpha[0] < *nu0)) {
    std::ostringstream msg;
    msg << "alpha0 = " << alpha[0] << " is not below nu0 = " << *nu0;
    reject(msg.str());
  }

  switch (mode) {
    case ExperimentMode::kBest:
      if (!(a1 > rest)) reject(dominant.str());
      break;
    case ExperimentMode::kAll:
      break;
    case ExperimentMode::kNoisy:
      for (double p : p_grid) {
        if (p <= 1.0 && !(a1 > rest)) reject(dominant.str());
        if (p > 1.0 && K != 1) reject("noisy single-subspace bound for p > 1 needs k = 1");
        for (double e : eps_grid) {
          if (!(e > 0.0)) throw Error(ErrorCode::kInvalidNoise, "noisy mode needs eps > 0");
          const auto floor = noise_floor(alpha, d, p);
          if (floor && !(e < *floor)) {
            std::ostringstream msg;
            msg << "eps = " << e << " is not below the noise floor " << *floor << " for p = " << p
                << " (the bound would cover the whole Grassmannian)";
            reject(msg.str());
          }
        }
      }
      break;
    case ExperimentMode::kNoisyAll:
      if (!(min_separation > 0.0)) reject("noisy-all mode needs min-sep > 0 to bound the noise");
      for (double p : p_grid) {
        if (p > 1.0) reject("noisy K-subspace bound needs p <= 1");
        const double limit = noisy_eps_limit(K, d, p, alpha, min_separation);
        for (double e : eps_grid) {
          if (!(e > 0.0)) throw Error(ErrorCode::kInvalidNoise, "noisy mode needs eps > 0");
          if (!(e < limit)) {
            std::ostringstream msg;
            msg << "eps = " << e << " violates the K-subspace noise limit " << limit << " for p = " << p
                << " (tau0 * min alpha * min-sep^p / 2^p - alpha0 too small)";
            reject(msg.str());
          }
        }
      }
      break;
  }
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "mode") cfg.mode = parse_mode(value);
  else if (key == "D") cfg.D = parse_int(key, value);
  else if (key == "d") cfg.d = parse_int(key, value);
  else if (key == "k") cfg.K = parse_int(key, value);
  else if (key == "alpha") cfg.alpha = parse_list(key, value);
  else if (key == "eps") cfg.eps_grid = parse_list(key, value);
  else if (key == "p") cfg.p_grid = parse_list(key, value);
  else if (key == "n") cfg.N = parse_int(key, value);
  else if (key == "trials") cfg.n_trials = static_cast<int>(parse_int(key, value));
  else if (key == "tol") cfg.recovery_tol = parse_double(key, value);
  else if (key == "restarts") cfg.fit.n_restarts = static_cast<int>(parse_int(key, value));
  else if (key == "max-iters") cfg.fit.max_iters = static_cast<int>(parse_int(key, value));
  else if (key == "seed") {
    const long long s = parse_int(key, value);
    if (s < 0) reject("seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (key == "min-sep") cfg.min_separation = parse_double(key, value);
  else if (key == "nu0") cfg.nu0 = parse_double(key, value);
  else reject("unknown config key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      reject("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

const GroupSummary& SweepReport::group(double p, double eps) const {
  for (const GroupSummary& g : summary)
    if (g.p == p && g.eps == eps) return g;
  throw Error(ErrorCode::kInvalidArgument, "no such (p, eps) group in report");
}

void summarize(SweepReport& report) {
  report.summary.clear();
  std::size_t i = 0;
  while (i < report.rows.size()) {
    const double p = report.rows[i].p;
    const double eps = report.rows[i].eps;
    GroupSummary g;
    g.p = p;
    g.eps = eps;
    g.bound_f = report.rows[i].bound_f;
    std::vector<double> dists;
    for (; i < report.rows.size() && report.rows[i].p == p && report.rows[i].eps == eps; ++i) {
      dists.push_back(report.rows[i].distance);
      g.n_recovered += report.rows[i].recovered ? 1 : 0;
    }
    g.n_trials = static_cast<int>(dists.size());
    g.recovery_rate = static_cast<double>(g.n_recovered) / static_cast<double>(g.n_trials);
    g.median_distance = median(std::move(dists));
    report.summary.push_back(g);
  }
}

SweepReport recount(const SweepReport& report, double tol) {
  SweepReport out = report;
  for (TrialRow& row : out.rows) row.recovered = row.distance < tol;
  summarize(out);
  return out;
}

std::vector<Subspace> trial_truth(const ExperimentConfig& cfg, int trial) {
  if (!cfg.seed) reject("a seed is required");
  Rng rng = make_stream(*cfg.seed, static_cast<std::uint64_t>(trial), kTruthSalt);
  for (int attempt = 0; attempt < kMaxTruthDraws; ++attempt) {
    std::vector<Subspace> truth;
    for (Index j = 0; j < cfg.K; ++j) truth.push_back(random_subspace(cfg.D, cfg.d, rng));
    bool ok = true;
    for (Index i = 0; i < cfg.K && ok; ++i)
      for (Index j = 0; j < i && ok; ++j)
        ok = grassmann_distance(truth[i], truth[j]) > std::max(cfg.min_separation, 1e-9);
    if (ok) return truth;
  }
  std::ostringstream msg;
  msg << "no subspaces with pairwise distance > " << cfg.min_separation << " after " << kMaxTruthDraws
      << " draws";
  reject(msg.str());
}

PointCloud trial_data(const ExperimentConfig& cfg, int trial, double eps) {
  MixtureModel model{cfg.alpha, trial_truth(cfg, trial), eps};
  Rng rng = make_stream(*cfg.seed, static_cast<std::uint64_t>(trial), kDataSalt);
  return sample_mixture(model, cfg.N, rng);
}

double noisy_bound_single(double eps, Index K, Index d, double p, const std::vector<double>& alpha) {
  const double dd = static_cast<double>(d);
  const double lead = std::pow(2.0, (3.0 + p) / p) * std::pow(dd, 1.5);
  if (p <= 1.0) {
    const double margin = alpha[1] - secondary(alpha);
    if (!(margin > 0.0)) return kNaN;
    return lead * eps / std::pow(margin, 1.0 / p);
  }
  if (K == 1) return lead * std::pow(p / alpha[1], 1.0 / p) * std::pow(eps, 1.0 / p);
  return kNaN;
}

double noisy_bound_all(double eps, Index K, Index d, double p, const std::vector<double>& alpha) {
  const double gap = tau0(K, d, p) * min_weight(alpha) - alpha[0];
  if (!(gap > 0.0) || p > 1.0) return kNaN;
  return std::pow(3.0, 1.0 / p) * std::pow(gap, -1.0 / p) * eps;
}

double noisy_eps_limit(Index K, Index d, double p, const std::vector<double>& alpha, double min_dist) {
  const double inner = tau0(K, d, p) * min_weight(alpha) * std::pow(min_dist, p) / std::pow(2.0, p) - alpha[0];
  if (!(inner > 0.0)) return kNaN;
  return std::pow(3.0, -1.0 / p) * std::pow(inner, 1.0 / p);
}

TrialRow trial_recover_best_l0(const ExperimentConfig& cfg, double p, int trial) {
  TrialRow row = single_trial(cfg, p, 0.0, trial);
  row.recovered = row.distance < cfg.recovery_tol;
  return row;
}

TrialRow trial_recover_all_k(const ExperimentConfig& cfg, double p, int trial) {
  TrialRow row = multi_trial(cfg, p, 0.0, trial);
  row.recovered = row.distance < cfg.recovery_tol;
  return row;
}

TrialRow noisy_trial(const ExperimentConfig& cfg, double p, double eps, int trial) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidNoise, "noisy trial needs eps > 0");
  if (cfg.mode == ExperimentMode::kNoisyAll) {
    TrialRow row = multi_trial(cfg, p, eps, trial);
    row.bound_f = noisy_bound_all(eps, cfg.K, cfg.d, p, cfg.alpha);
    row.recovered = row.distance <= row.bound_f;
    return row;
  }
  TrialRow row = single_trial(cfg, p, eps, trial);
  row.bound_f = noisy_bound_single(eps, cfg.K, cfg.d, p, cfg.alpha);
  row.recovered = row.distance <= row.bound_f;
  return row;
}

SweepReport run_sweep(const ExperimentConfig& cfg, int jobs) {
  cfg.validate();
  struct Task {
    double p;
    double eps;
    int trial;
  };
  std::vector<Task> tasks;
  for (double p : cfg.p_grid)
    for (double eps : cfg.eps_grid)
      for (int t = 0; t < cfg.n_trials; ++t) tasks.push_back({p, eps, t});

  auto run_one = [&cfg](const Task& task) {
    switch (cfg.mode) {
      case ExperimentMode::kBest: {
        TrialRow row = single_trial(cfg, task.p, task.eps, task.trial);
        row.recovered = row.distance < cfg.recovery_tol;
        return row;
      }
      case ExperimentMode::kAll: {
        TrialRow row = multi_trial(cfg, task.p, task.eps, task.trial);
        row.recovered = row.distance < cfg.recovery_tol;
        return row;
      }
      case ExperimentMode::kNoisy:
      case ExperimentMode::kNoisyAll:
        return noisy_trial(cfg, task.p, task.eps, task.trial);
    }
    return TrialRow{};
  };

  SweepReport report;
  report.rows.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        report.rows[i] = run_one(tasks[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks.size();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  summarize(report);
  return report;
}

void write_csv(std::ostream& out, const SweepReport& report, bool with_timing) {
  out << "p,K,eps,alpha0,alpha1,trial,distance,energy,bound_f,recovered,runtime_ms\n";
  char buf[512];
  for (const TrialRow& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%lld,%.17g,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%d,%.17g\n", r.p,
                  static_cast<long long>(r.K), r.eps, r.alpha0, r.alpha1, r.trial, r.distance, r.energy,
                  r.bound_f, r.recovered ? 1 : 0, with_timing ? r.runtime_ms : 0.0);
    out << buf;
  }
}

void write_summary(std::ostream& out, const SweepReport& report) {
  out << "p,eps,n_trials,n_recovered,recovery_rate,median_distance,bound_f\n";
  char buf[256];
  for (const GroupSummary& g : report.summary) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%d,%.17g,%.17g,%.17g\n", g.p, g.eps, g.n_trials,
                  g.n_recovered, g.recovery_rate, g.median_distance, g.bound_f);
    out << buf;
  }
}

Scenario scenario_orthogonal_outlier(Index n_inliers, double p, Rng& rng) {
  // d = 1 in R^3: inliers on the e1 axis in a ball of radius eps, outlier e3.
  const double eps = 0.5 * std::pow(1.0 / static_cast<double>(n_inliers), 1.0 / p);
  std::uniform_real_distribution<double> u(-eps, eps);
  Matrix X = Matrix::Zero(n_inliers + 1, 3);
  for (Index i = 0; i < n_inliers; ++i) X(i, 0) = u(rng);
  X(n_inliers, 2) = 1.0;
  return Scenario{X, Subspace::from_orthonormal(Matrix::Identity(3, 3).leftCols(1)),
                  Subspace::from_orthonormal(Matrix::Identity(3, 3).rightCols(1))};
}

Scenario scenario_elevated_outlier(Index n_inliers, double eps, double elevation, Rng& rng) {
  // d = 2 in R^3: inliers in the eps-disk of the e1-e2 plane, outlier at the
  // given elevation above e1.
  const Subspace plane = Subspace::from_orthonormal(Matrix::Identity(3, 3).leftCols(2));
  Matrix X(n_inliers + 1, 3);
  for (Index i = 0; i < n_inliers; ++i) {
    Vector a = eps * sample_unit_ball(2, rng);
    X.row(i) << a(0), a(1), 0.0;
  }
  X.row(n_inliers) << std::cos(elevation), 0.0, std::sin(elevation);
  Matrix tilted(3, 2);
  tilted << std::cos(elevation), 0.0, 0.0, 1.0, std::sin(elevation), 0.0;
  return Scenario{X, plane, Subspace::from_orthonormal(tilted)};
}

Scenario scenario_great_circle_arc(Index n_inliers, double arc_length, double elevation) {
  // Evenly spaced points on an arc of the great circle in the e1-e2 plane,
  // centred at e1; the outlier sits on a second great circle through e1,
  // tilted by `elevation`, at the point furthest from e1.
  Matrix X(n_inliers + 1, 3);
  for (Index i = 0; i < n_inliers; ++i) {
    const double s = arc_length * ((static_cast<double>(i) + 0.5) / static_cast<double>(n_inliers) - 0.5);
    X.row(i) << std::cos(s), std::sin(s), 0.0;
  }
  X.row(n_inliers) << 0.0, std::cos(elevation), std::sin(elevation);
  Matrix tilted(3, 2);
  tilted << 1.0, 0.0, 0.0, std::cos(elevation), 0.0, std::sin(elevation);
  return Scenario{X, Subspace::from_orthonormal(Matrix::Identity(3, 3).leftCols(2)),
                  Subspace::from_orthonormal(tilted)};
}

std::vector<CheckResult> counterexample_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;
  char buf[256];

  for (double p : {0.5, 1.0, 2.0}) {
    Rng rng = make_stream(seed, 1, static_cast<std::uint64_t>(p * 1000));
    const Scenario s = scenario_orthogonal_outlier(100, p, rng);
    FitOptions opts;
    opts.p = p;
    opts.seed = seed;
    opts.n_restarts = 6;
    const FitResult fit = best_single_subspace(s.points, 1, opts);
    const double dist = grassmann_distance(fit.subspace(), s.inlier_subspace);
    std::snprintf(buf, sizeof buf, "p=%g dist(fit, inlier line)=%.6f (need > 1.0)", p, dist);
    out.push_back({"orthogonal outlier", dist > 1.0, buf});
  }

  {
    Rng rng = make_stream(seed, 2, 0);
    const Scenario s = scenario_elevated_outlier(50, 0.01, std::numbers::pi / 4, rng);
    const Certificate cert = check_sufficient_l1(SubspaceFrame(s.inlier_subspace), s.points, 200, rng);
    std::snprintf(buf, sizeof buf, "status=%s lhs=%.6g rhs=%.6g", to_string(cert.status), cert.lhs, cert.rhs);
    out.push_back({"elevated outlier", cert.status == CertificateStatus::kViolated && cert.witness.has_value(),
                   buf});
  }

  {
    const Scenario s = scenario_great_circle_arc(20, 0.05, 0.2);
    const EnergyParams l1{1.0, 0.0};
    const double at_arc = energy_single(s.points, s.inlier_subspace, l1);
    const double at_outlier = energy_single(s.points, s.alternative, l1);
    std::snprintf(buf, sizeof buf, "e_l1(outlier plane)=%.6g < e_l1(arc plane)=%.6g", at_outlier, at_arc);
    out.push_back({"great-circle arc", at_outlier < at_arc, buf});
  }
  return out;
}

std::vector<CheckResult> lemma_property_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;
  char buf[256];

  for (Index d = 1; d <= 3; ++d) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(d), 0xd5);
    constexpr int kDraws = 100000;
    Matrix moment = Matrix::Zero(d, d);
    for (int i = 0; i < kDraws; ++i) {
      const Vector x = sample_unit_ball(d, rng);
      moment.noalias() += x * x.transpose();
    }
    moment /= kDraws;
    const double err = (moment - Matrix::Identity(d, d) / static_cast<double>(d + 2)).norm();
    std::snprintf(buf, sizeof buf, "d=%td frobenius error %.3g (need < 0.02)", d, err);
    out.push_back({"second moment 1/(d+2)", err < 0.02, buf});
  }

  {
    Rng rng = make_stream(seed, 0, 0x11);
    std::uniform_int_distribution<Index> pickD(2, 6);
    int violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < 10000; ++t) {
      const Index D = pickD(rng);
      const Index d = std::uniform_int_distribution<Index>(1, D - 1)(rng);
      const Subspace L1 = random_subspace(D, d, rng);
      const Subspace L2 = random_subspace(D, d, rng);
      const Vector x = sample_unit_ball(D, rng);
      const double gap = std::abs(dist_point_subspace(x, L1) - dist_point_subspace(x, L2)) -
                         x.norm() * grassmann_distance(L1, L2);
      worst = std::max(worst, gap);
      if (gap > 1e-9) ++violations;
    }
    std::snprintf(buf, sizeof buf, "%d violations in 10000 triples, max excess %.3g", violations, worst);
    out.push_back({"distance Lipschitz bound", violations == 0, buf});
  }

  {
    Rng rng = make_stream(seed, 0, 0x3e);
    constexpr Index kSamples = 100000;
    int failures = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 50; ++t) {
      const Index D = 3 + t % 3;
      const Index d = 1 + t % 2;
      const double p = 0.25 * static_cast<double>(1 + t % 4);
      const Subspace L1 = random_subspace(D, d, rng);
      const Subspace L2 = random_subspace(D, d, rng);
      const Subspace Lhat = random_subspace(D, d, rng);
      Matrix X1(kSamples, D), X2(kSamples, D);
      for (Index i = 0; i < kSamples; ++i) {
        X1.row(i) = sample_on_subspace(L1, rng).transpose();
        X2.row(i) = sample_on_subspace(L2, rng).transpose();
      }
      const Vector h1 = point_distances(X1, Lhat).array().pow(p);
      const Vector h2 = point_distances(X2, Lhat).array().pow(p);
      for (const Subspace* Li : {&L1, &L2}) {
        const Vector diff1 = h1.array() - point_distances(X1, *Li).array().pow(p);
        const Vector diff2 = h2.array() - point_distances(X2, *Li).array().pow(p);
        const double n = static_cast<double>(kSamples);
        const double m1 = diff1.mean(), m2 = diff2.mean();
        const double var1 = (diff1.array() - m1).square().sum() / (n - 1);
        const double var2 = (diff2.array() - m2).square().sum() / (n - 1);
        const double se = std::sqrt(var1 / n + var2 / n);
        const double margin = (m1 + m2) + 3.0 * se;
        worst = std::min(worst, margin);
        if (margin < 0.0) ++failures;
      }
    }
    std::snprintf(buf, sizeof buf, "%d failures over 50 triples x 2, min margin %.3g", failures, worst);
    out.push_back({"mean distance lemma", failures == 0, buf});
  }

  {
    Rng rng = make_stream(seed, 0, 0xed);
    constexpr Index kSamples = 20000;
    int failures = 0;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 50; ++t) {
      const Index D = 3 + t % 3;
      const Index d = 1 + t % std::min<Index>(3, D - 1);
      const Index K = 1 + t % 3;
      const double p = (t % 3 == 0) ? 0.5 : (t % 3 == 1 ? 1.0 : 2.0);
      const Subspace L1 = random_subspace(D, d, rng);
      std::vector<Subspace> hats;
      double eps = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < K; ++j) {
        hats.push_back(random_subspace(D, d, rng));
        eps = std::min(eps, grassmann_distance(L1, hats.back()));
      }
      eps *= 0.999;
      Matrix X(kSamples, D);
      for (Index i = 0; i < kSamples; ++i) X.row(i) = sample_on_subspace(L1, rng).transpose();
      const double mean = energy_multi(X, hats, EnergyParams{p, 0.0}) / static_cast<double>(kSamples);
      const double bound = std::pow(eps, p) / (std::pow(2.0, 1.0 + p) * std::pow(static_cast<double>(K), p) *
                                              std::pow(static_cast<double>(d), 1.5 * p));
      worst_ratio = std::min(worst_ratio, mean / bound);
      if (!(mean > bound)) ++failures;
    }
    std::snprintf(buf, sizeof buf, "%d failures in 50 configurations, min mean/bound %.3g", failures,
                  worst_ratio);
    out.push_back({"energy lower bound lemma", failures == 0, buf});
  }
  return out;
}

}  // namespace lpsub
