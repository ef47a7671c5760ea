#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "lpsub/experiments.hpp"

namespace lpsub::cli {

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kIoError, "cannot write '" + path + "'");
  return f;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kIoError, "cannot read '" + path + "'");
  return f;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError: return kExitIo;
    case ErrorCode::kConfigRejected:
    case ErrorCode::kInvalidNoise:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kRankDeficient:
      return kExitConfigRejected;
    default: return kExitFailedCheck;
  }
}

struct SampleArgs {
  long D = 3, d = 1, k = 1;
  std::vector<double> alpha;
  double eps = 0.0;
  long n = 1000;
  std::uint64_t seed = 0;
  double min_sep = 0.0;
  std::string out;
  std::string truth_out;
};

struct FitArgs {
  double p = 1.0;
  long k = 1, d = 1;
  int restarts = 8;
  int max_iters = 500;
  std::uint64_t seed = 0;
  std::string input;
  std::string output;
};

struct CheckArgs {
  double p = 1.0;
  int samples = 200;
  std::uint64_t seed = 0;
  std::string input;
  std::string subspace;
  std::string output;
};

struct ExperimentArgs {
  std::string mode = "best";
  long D = 3, d = 1, k = 2;
  std::vector<double> alpha;
  std::vector<double> eps;
  std::vector<double> p;
  long n = 2000;
  int trials = 50;
  double tol = 0.05;
  int restarts = 8;
  int max_iters = 500;
  std::optional<std::uint64_t> seed;
  double min_sep = 0.0;
  std::optional<double> nu0;
  std::string config;
  std::string out;
  std::string summary;
  int jobs = 1;
  bool no_timing = false;
};

int do_sample(const SampleArgs& a, std::ostream& out) {
  std::ofstream file = open_output(a.out);
  std::optional<std::ofstream> truth_file;
  if (!a.truth_out.empty()) truth_file = open_output(a.truth_out);

  ExperimentConfig cfg;
  cfg.D = a.D;
  cfg.d = a.d;
  cfg.K = a.k;
  cfg.alpha = a.alpha.empty() ? std::vector<double>{} : a.alpha;
  if (cfg.alpha.empty()) {
    cfg.alpha.assign(static_cast<std::size_t>(a.k) + 1, 1.0 / static_cast<double>(a.k));
    cfg.alpha[0] = 0.0;
  }
  cfg.N = a.n;
  cfg.seed = a.seed;
  cfg.min_separation = a.min_sep;
  if (cfg.d < 1 || cfg.d >= cfg.D) throw Error(ErrorCode::kConfigRejected, "need 1 <= d < D");
  if (static_cast<long>(cfg.alpha.size()) != a.k + 1) {
    throw Error(ErrorCode::kConfigRejected, "alpha needs k+1 weights");
  }
  MixtureModel model{cfg.alpha, trial_truth(cfg, 0), a.eps};
  model.validate();
  const PointCloud cloud = trial_data(cfg, 0, a.eps);
  write_point_cloud(file, cloud);
  if (truth_file)
    for (const Subspace& L : model.subspaces) write_subspace(*truth_file, L);
  out << "wrote " << cloud.size() << " points to " << a.out << '\n';
  return kExitOk;
}

int do_fit(const FitArgs& a, std::ostream& out) {
  std::ifstream in = open_input(a.input);
  std::ofstream file = open_output(a.output);
  const PointCloud cloud = read_point_cloud(in);

  FitOptions opts;
  opts.p = a.p;
  opts.n_restarts = a.restarts;
  opts.max_iters = a.max_iters;
  opts.seed = a.seed;
  const FitResult fit = a.k == 1 ? best_single_subspace(cloud.points, a.d, opts)
                                 : best_k_subspaces(cloud.points, a.d, a.k, opts);
  for (const Subspace& L : fit.subspaces) write_subspace(file, L);
  out << std::setprecision(17) << "energy " << fit.final_energy << "\niterations " << fit.iterations
      << "\nrestarts " << fit.restarts_used << "\nconverged " << (fit.converged ? "yes" : "no") << '\n';
  if (fit.reseeds > 0) out << "reseeds " << fit.reseeds << '\n';
  return fit.converged ? kExitOk : kExitNotConverged;
}

int do_check(const CheckArgs& a, std::ostream& out) {
  std::ifstream in = open_input(a.input);
  std::ifstream sub = open_input(a.subspace);
  std::optional<std::ofstream> file;
  if (!a.output.empty()) file = open_output(a.output);
  std::ostream& dest = file ? static_cast<std::ostream&>(*file) : out;

  const PointCloud cloud = read_point_cloud(in);
  const auto subspaces = read_subspaces(sub);
  if (subspaces.empty()) throw Error(ErrorCode::kIoError, "no subspace in '" + a.subspace + "'");
  const SubspaceFrame frame(subspaces.front());

  if (a.p == 1.0) {
    Rng rng = make_stream(a.seed, 0, 0xc4);
    write_certificate(dest, check_sufficient_l1(frame, cloud.points, a.samples, rng));
    return kExitOk;
  }
  if (a.p > 1.0) {
    const Vector dist = point_distances(cloud.points, frame.subspace);
    std::vector<Index> rows;
    for (Index i = 0; i < dist.size(); ++i)
      if (dist(i) > kOnSubspaceTol) rows.push_back(i);
    Matrix outliers(static_cast<Index>(rows.size()), cloud.ambient_dim());
    for (std::size_t i = 0; i < rows.size(); ++i) outliers.row(static_cast<Index>(i)) = cloud.points.row(rows[i]);
    const NecessaryCheck check = check_necessary_p_gt1(frame, outliers, a.p);
    dest << std::setprecision(17) << "condition: necessary (p > 1)\nnorm: " << check.norm
         << "\nstatus: " << (check.satisfied ? "satisfied" : "violated") << '\n';
    return kExitOk;
  }
  throw Error(ErrorCode::kConfigRejected, "check supports p = 1 (sufficient) or p > 1 (necessary)");
}

std::string join(const std::vector<double>& v) {
  std::ostringstream s;
  s << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  return s.str();
}

int do_experiment(const ExperimentArgs& a, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  if (!a.config.empty()) {
    std::ifstream in = open_input(a.config);
    cfg = parse_config(in);
  }
  // Flags given explicitly override the config file.
  auto given = [&sub](const char* name) { return sub.count(name) > 0; };
  if (given("--mode")) apply_config_entry(cfg, "mode", a.mode);
  if (given("--D")) cfg.D = a.D;
  if (given("--d")) cfg.d = a.d;
  if (given("--k")) cfg.K = a.k;
  if (given("--alpha")) cfg.alpha = a.alpha;
  if (given("--eps")) cfg.eps_grid = a.eps;
  if (given("--p")) cfg.p_grid = a.p;
  if (given("--n")) cfg.N = a.n;
  if (given("--trials")) cfg.n_trials = a.trials;
  if (given("--tol")) cfg.recovery_tol = a.tol;
  if (given("--restarts")) cfg.fit.n_restarts = a.restarts;
  if (given("--max-iters")) cfg.fit.max_iters = a.max_iters;
  if (given("--seed")) cfg.seed = a.seed;
  if (given("--min-sep")) cfg.min_separation = a.min_sep;
  if (given("--nu0")) cfg.nu0 = a.nu0;
  if (!cfg.seed) throw Error(ErrorCode::kConfigRejected, "a seed is required (--seed or 'seed =' in the config)");
  if (a.jobs < 1) throw Error(ErrorCode::kConfigRejected, "--jobs must be >= 1");
  cfg.validate();

  std::optional<std::ofstream> csv;
  if (!a.out.empty()) csv = open_output(a.out);
  std::optional<std::ofstream> summary;
  if (!a.summary.empty()) summary = open_output(a.summary);

  const SweepReport report = run_sweep(cfg, a.jobs);
  write_csv(csv ? static_cast<std::ostream&>(*csv) : out, report, !a.no_timing);
  if (summary) write_summary(*summary, report);
  err << "mode " << to_string(cfg.mode) << ", p in {" << join(cfg.p_grid) << "}, eps in {"
      << join(cfg.eps_grid) << "}\n";
  write_summary(err, report);
  bool all_converged = true;
  for (const TrialRow& r : report.rows) all_converged = all_converged && r.converged;
  if (!all_converged) err << "note: some fits stopped at max-iters\n";
  return kExitOk;
}

int do_lemmas(std::uint64_t seed, std::ostream& out) {
  int failed = 0;
  auto emit = [&](const std::vector<CheckResult>& results) {
    for (const CheckResult& r : results) {
      out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
      failed += r.passed ? 0 : 1;
    }
  };
  emit(lemma_property_suite(seed));
  emit(counterexample_suite(seed));
  return failed == 0 ? kExitOk : kExitFailedCheck;
}

void add_experiment_flags(CLI::App& sub, ExperimentArgs& a) {
  sub.add_option("--config", a.config, "key = value file; flags override its entries");
  sub.add_option("--mode", a.mode, "best | all | noisy | noisy-all");
  sub.add_option("--D", a.D, "ambient dimension");
  sub.add_option("--d", a.d, "subspace dimension");
  sub.add_option("--k", a.k, "number of subspaces");
  sub.add_option("--alpha", a.alpha, "mixture weights alpha_0..alpha_K")->delimiter(',');
  sub.add_option("--eps", a.eps, "noise levels")->delimiter(',');
  sub.add_option("--p", a.p, "exponents")->delimiter(',');
  sub.add_option("--n", a.n, "points per trial");
  sub.add_option("--trials", a.trials, "trials per (p, eps)");
  sub.add_option("--tol", a.tol, "recovery tolerance in radians");
  sub.add_option("--restarts", a.restarts, "fit restarts per trial");
  sub.add_option("--max-iters", a.max_iters, "descent iterations per smoothing stage");
  sub.add_option("--seed", a.seed, "master seed (required here or in the config)");
  sub.add_option("--min-sep", a.min_sep, "minimum pairwise distance of drawn truth subspaces");
  sub.add_option("--nu0", a.nu0, "reject configs with alpha_0 >= nu0 (K-subspace modes)");
  sub.add_option("--out", a.out, "CSV output path (default stdout)");
  sub.add_option("--summary", a.summary, "aggregate CSV output path");
  sub.add_option("--jobs", a.jobs, "worker threads");
  sub.add_flag("--no-timing", a.no_timing, "write runtime_ms as 0");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust subspace recovery by lp energy minimization", "lpsub"};
  app.require_subcommand(1);

  SampleArgs sample;
  auto* s = app.add_subcommand("sample", "draw a point cloud from a uniform mixture");
  s->add_option("--D", sample.D, "ambient dimension");
  s->add_option("--d", sample.d, "subspace dimension");
  s->add_option("--k", sample.k, "number of subspaces");
  s->add_option("--alpha", sample.alpha, "weights alpha_0..alpha_K")->delimiter(',');
  s->add_option("--eps", sample.eps, "noise level");
  s->add_option("--n", sample.n, "number of points");
  s->add_option("--seed", sample.seed, "seed");
  s->add_option("--min-sep", sample.min_sep, "minimum pairwise subspace distance");
  s->add_option("--out", sample.out, "point cloud path")->required();
  s->add_option("--truth-out", sample.truth_out, "write the true subspaces here");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "fit lp subspaces to a point cloud");
  f->add_option("--p", fit.p, "exponent");
  f->add_option("--k", fit.k, "number of subspaces");
  f->add_option("--d", fit.d, "subspace dimension");
  f->add_option("--restarts", fit.restarts, "restarts");
  f->add_option("--max-iters", fit.max_iters, "descent iterations per smoothing stage");
  f->add_option("--seed", fit.seed, "seed");
  f->add_option("--input", fit.input, "point cloud path")->required();
  f->add_option("--output", fit.output, "subspace output path")->required();

  CheckArgs check;
  auto* c = app.add_subcommand("check", "test local-minimality conditions at a subspace");
  c->add_option("--p", check.p, "1: sampled sufficient condition; > 1: necessary condition");
  c->add_option("--samples", check.samples, "sampled directions");
  c->add_option("--seed", check.seed, "seed");
  c->add_option("--input", check.input, "point cloud path")->required();
  c->add_option("--subspace", check.subspace, "subspace file")->required();
  c->add_option("--output", check.output, "certificate path (default stdout)");

  ExperimentArgs experiment;
  auto* e = app.add_subcommand("experiment", "Monte Carlo recovery experiment");
  add_experiment_flags(*e, experiment);
  ExperimentArgs sweep;
  auto* w = app.add_subcommand("sweep", "Monte Carlo sweep driven by a config file");
  add_experiment_flags(*w, sweep);
  w->get_option("--config")->required();

  std::uint64_t lemma_seed = 0;
  auto* l = app.add_subcommand("lemmas", "property checks and counterexamples");
  l->add_option("--seed", lemma_seed, "seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*s) return do_sample(sample, out);
    if (*f) return do_fit(fit, out);
    if (*c) return do_check(check, out);
    if (*e) return do_experiment(experiment, *e, out, err);
    if (*w) return do_experiment(sweep, *w, out, err);
    if (*l) return do_lemmas(lemma_seed, out);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return exit_code_for(ex.code());
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace lpsub::cli
