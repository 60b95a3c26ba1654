#include "covscan/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <thread>

#include "CLI11.hpp"

#include "covscan/errors.hpp"
#include "covscan/io.hpp"
#include "covscan/matrixcase.hpp"
#include "covscan/posterior.hpp"
#include "covscan/problems.hpp"
#include "covscan/scan.hpp"

namespace covscan::cli {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string problem;
  std::string config;
  bool desk = false;
  bool paper = false;
  std::string out_dir = ".";
  int jobs = 0;
  std::optional<double> jitter;
  std::optional<double> rcond;
  std::optional<int> N;
  std::optional<int> N_t;
  std::optional<double> grid_lo;
  std::optional<double> grid_hi;
  std::optional<int> grid_count;
  std::optional<double> C;
  std::optional<double> exponent;
  std::optional<double> prominence;
};

void add_problem_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("problem,--problem", cfg.problem, "Preset id (see list-problems)");
  sub->add_option("--config", cfg.config, "JSON problem config (full spec or preset + overrides)");
  auto* desk = sub->add_flag("--desk", cfg.desk, "Desk-scale preset (N = N_t = 200, 300 lambdas)");
  auto* paper = sub->add_flag("--paper-scale", cfg.paper, "Paper-scale preset (500/500/500)");
  desk->excludes(paper);
  sub->add_option("--out-dir", cfg.out_dir, "Output directory")->capture_default_str();
  sub->add_option("--jobs", cfg.jobs, "Worker threads (0 = all cores)");
  sub->add_option("--jitter", cfg.jitter, "Diagonal jitter");
  sub->add_option("--rcond", cfg.rcond, "Relative eigenvalue cutoff of the pseudoinverse");
  sub->add_option("--collocation", cfg.N, "Collocation count N");
  sub->add_option("--test-points", cfg.N_t, "Test grid size N_t");
  sub->add_option("--grid-lo", cfg.grid_lo, "Lower end of the lambda grid");
  sub->add_option("--grid-hi", cfg.grid_hi, "Upper end of the lambda grid");
  sub->add_option("--grid-count", cfg.grid_count, "Number of lambda grid points");
  sub->add_option("--C", cfg.C, "Length-scale schedule constant C");
  sub->add_option("--exponent", cfg.exponent, "Length-scale schedule exponent p");
  sub->add_option("--prominence", cfg.prominence, "Peak prominence in decades");
}

ProblemSpec resolve_problem(const RunConfig& cfg, const std::string& fallback = "") {
  std::string id = cfg.problem;
  ProblemSpec p;
  if (!cfg.config.empty()) {
    if (!id.empty()) throw InvalidArgument("give either a problem id or --config, not both");
    p = load_problem_config(cfg.config);
  } else {
    if (id.empty()) id = fallback;
    if (id.empty()) throw InvalidArgument("missing problem id");
    p = make_preset(id, cfg.paper ? Scale::paper : Scale::desk);
  }
  if (cfg.jitter) p.jitter = *cfg.jitter;
  if (cfg.rcond) p.rcond = *cfg.rcond;
  if (cfg.N) p.collocation_count = *cfg.N;
  if (cfg.N_t) p.test_count = *cfg.N_t;
  if (cfg.grid_lo) p.grid.lo = *cfg.grid_lo;
  if (cfg.grid_hi) p.grid.hi = *cfg.grid_hi;
  if (cfg.grid_count) p.grid.count = *cfg.grid_count;
  if (cfg.C) p.schedule.C = *cfg.C;
  if (cfg.exponent) p.schedule.exponent = *cfg.exponent;
  if (cfg.prominence) p.prominence_decades = *cfg.prominence;
  p.validate();
  return p;
}

int resolved_jobs(int jobs) {
  if (jobs > 0) return jobs;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw InvalidArgument("cannot create output directory " + dir + ": " + ec.message());
  return p;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  return os;
}

int cmd_scan(const RunConfig& cfg, int refine_iterations, std::ostream& out) {
  const auto problem = resolve_problem(cfg);
  if (problem.mode != ProblemMode::eigen) throw InvalidArgument("scan needs an eigen-mode problem");
  const auto dir = prepare_out_dir(cfg.out_dir);
  const ScanOptions opts{resolved_jobs(cfg.jobs), Scaling::diagonal};

  SpectralScan scan;
  try {
    scan = scan_spectrum(problem, opts);
  } catch (const InvalidArgument&) {
    throw;
  } catch (const Error& e) {
    out << "scan failed: " << e.what() << '\n';
    return kVerificationFailure;
  }
  std::vector<PeakRecord> peaks;
  try {
    peaks = detect_peaks(scan, problem.prominence_decades);
  } catch (const InsufficientData& e) {
    out << "no peak detection: " << e.what() << '\n';
  }
  if (refine_iterations > 0) peaks = refine_peaks(problem, peaks, refine_iterations, opts);
  scan.peaks = peaks;

  std::vector<double> refs;
  if (has_reference(problem)) refs = reference_eigenvalues_in_range(problem);
  const auto reports = match_references(peaks, refs);
  std::optional<DecayFit> fit;
  if (peaks.size() >= 2) fit = fit_decay_slope(peaks);

  const auto csv_path = dir / (problem.id + "_spectrum.csv");
  const auto json_path = dir / (problem.id + "_peaks.json");
  {
    auto os = open_out(csv_path);
    write_spectrum_csv(os, scan);
  }
  {
    auto os = open_out(json_path);
    os << peaks_to_json(scan, reports, fit).dump(2) << '\n';
  }

  const auto skipped = std::count_if(scan.points.begin(), scan.points.end(),
                                     [](const ScanPoint& p) { return p.skipped; });
  out << problem.id << ": " << scan.points.size() << " lambdas, " << skipped << " skipped, "
      << peaks.size() << " peaks\n";
  out << std::setprecision(8);
  for (const auto& r : reports) {
    out << "  lambda_hat=" << r.peak.lambda_hat << "  J=" << r.peak.J_peak;
    if (r.reference) out << "  ref=" << *r.reference << "  rel_err=" << *r.relative_error;
    out << '\n';
  }
  if (fit) out << "  decay slope " << fit->slope << '\n';
  out << "wrote " << csv_path.string() << " and " << json_path.string() << '\n';
  return kOk;
}

int cmd_sample(const RunConfig& cfg, double lambda, int count, std::uint64_t seed,
               const std::string& normalization, std::ostream& out) {
  if (count < 1) throw InvalidArgument("--count must be >= 1");
  const auto norm = normalization_from_string(normalization);
  const auto problem = resolve_problem(cfg);
  const auto dir = prepare_out_dir(cfg.out_dir);
  const auto blocks = assemble_blocks(problem, lambda);
  const auto summary = posterior_covariance(blocks, {problem.jitter, problem.rcond, Scaling::diagonal});
  const auto samples = sample_posterior(summary, count, seed, norm);

  const auto csv_path = dir / (problem.id + "_samples.csv");
  const auto json_path = dir / (problem.id + "_samples.json");
  {
    auto os = open_out(csv_path);
    write_samples_csv(os, summary.test_x, samples);
  }
  {
    auto os = open_out(json_path);
    os << samples_sidecar(problem.id, summary, samples).dump(2) << '\n';
  }
  out << std::setprecision(8) << problem.id << " at lambda=" << lambda << ": trace_J=" << summary.trace_J
      << ", " << count << " samples\n";
  out << "wrote " << csv_path.string() << " and " << json_path.string() << '\n';
  return kOk;
}

int cmd_fd_verify(int trials, int max_dim, std::uint64_t seed, const std::string& report_path,
                  std::ostream& out) {
  if (trials < 1) throw InvalidArgument("--trials must be >= 1");
  if (max_dim < 1) throw InvalidArgument("--max-dim must be >= 1");
  const auto report = fd_theorem_suite(trials, max_dim, seed);
  out << "trial dim mult   off_norm   on_trace   sample_res factor_err proj_err  rank pass\n";
  out << std::scientific << std::setprecision(2);
  for (const auto& t : report.trials) {
    out << std::setw(5) << t.trial << std::setw(4) << t.dim << std::setw(5) << t.multiplicity << ' '
        << std::setw(10) << t.off_norm_ratio << ' ' << std::setw(10) << t.on_trace_ratio << ' '
        << std::setw(10) << t.sample_residual << ' ' << std::setw(10) << t.factor_error << ' '
        << std::setw(9) << t.projector_error << std::setw(5) << t.posterior_rank << ' '
        << (t.passed ? "ok" : "FAIL") << '\n';
  }
  out << report.passed_count() << "/" << trials << " trials passed\n";
  if (!report_path.empty()) {
    auto os = open_out(report_path);
    os << fd_report_to_json(report).dump(2) << '\n';
  }
  return report.all_passed() ? kOk : kVerificationFailure;
}

int cmd_bvp_demo(const RunConfig& cfg, const std::vector<int>& nf_values, std::ostream& out) {
  for (int nf : nf_values) {
    if (nf < 0) throw InvalidArgument("--nf must be >= 0");
  }
  const auto problem = resolve_problem(cfg, "poisson-demo");
  if (problem.mode != ProblemMode::bvp) throw InvalidArgument("bvp-demo needs a bvp-mode problem");
  const auto dir = prepare_out_dir(cfg.out_dir);
  out << std::setprecision(6);
  for (int nf : nf_values) {
    const auto s = solve_bvp(problem, nf);
    const auto path = dir / ("bvp_nf" + std::to_string(nf) + ".csv");
    auto os = open_out(path);
    write_bvp_csv(os, s);
    double max_err = 0.0;
    for (std::size_t i = 0; i < s.test_x.size(); ++i) {
      max_err = std::max(max_err, std::abs(s.mean(static_cast<Eigen::Index>(i)) - poisson_exact(s.test_x[i])));
    }
    out << "N_f=" << nf << ": max |mean - exact| = " << max_err << ", wrote " << path.string() << '\n';
  }
  return kOk;
}

int cmd_list(std::ostream& out) {
  for (const auto& id : preset_ids()) {
    const auto p = make_preset(id);
    out << std::left << std::setw(14) << id << to_string(p.mode);
    if (p.mode == ProblemMode::eigen) {
      out << "  grid " << to_string(p.grid.kind) << " [" << p.grid.lo << ", " << p.grid.hi << "] x"
          << p.grid.count;
    }
    out << "  N=" << p.collocation_count << " N_t=" << p.test_count << " jitter=" << p.jitter << '\n';
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Eigenvalue scanning with physics-informed GP posterior covariances", "covscan"};
  app.require_subcommand(1);

  RunConfig scan_cfg;
  int refine_iterations = 20;
  auto* scan = app.add_subcommand("scan", "Scan J(lambda) over the grid, detect and refine peaks");
  add_problem_options(scan, scan_cfg);
  scan->add_option("--refine", refine_iterations, "Golden-section iterations per peak (0 = off)")
      ->capture_default_str();

  RunConfig sample_cfg;
  double lambda = 0.0;
  int count = 5;
  std::uint64_t seed = 0;
  std::string normalization = "sup_norm";
  auto* sample = app.add_subcommand("sample", "Draw posterior samples at one lambda");
  add_problem_options(sample, sample_cfg);
  sample->add_option("--lambda", lambda, "Spectral parameter")->required();
  sample->add_option("--count", count, "Number of samples")->capture_default_str();
  sample->add_option("--seed", seed, "Random seed")->capture_default_str();
  sample->add_option("--normalization", normalization, "none, sup_norm or l2")->capture_default_str();

  int trials = 100;
  int max_dim = 8;
  std::uint64_t fd_seed = 0;
  std::string report_path;
  auto* fd = app.add_subcommand("fd-verify", "Check the finite-dimensional covariance theorem");
  fd->add_option("--trials", trials, "Random cases")->capture_default_str();
  fd->add_option("--max-dim", max_dim, "Largest matrix size")->capture_default_str();
  fd->add_option("--seed", fd_seed, "Random seed")->capture_default_str();
  fd->add_option("--report", report_path, "Write the report as JSON to this file");

  RunConfig bvp_cfg;
  std::vector<int> nf_values = {0, 3, 8};
  auto* bvp = app.add_subcommand("bvp-demo", "Poisson demo: condition on boundary + N_f interior rows");
  add_problem_options(bvp, bvp_cfg);
  bvp->add_option("--nf", nf_values, "Interior collocation counts")->capture_default_str();

  auto* list = app.add_subcommand("list-problems", "List built-in presets");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kConfigError;
  }

  CLI::App* active = nullptr;
  try {
    if (scan->parsed()) {
      active = scan;
      return cmd_scan(scan_cfg, refine_iterations, out);
    }
    if (sample->parsed()) {
      active = sample;
      return cmd_sample(sample_cfg, lambda, count, seed, normalization, out);
    }
    if (fd->parsed()) {
      active = fd;
      return cmd_fd_verify(trials, max_dim, fd_seed, report_path, out);
    }
    if (bvp->parsed()) {
      active = bvp;
      return cmd_bvp_demo(bvp_cfg, nf_values, out);
    }
    if (list->parsed()) return cmd_list(out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n\n" << (active ? active->help() : app.help());
    return kConfigError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailure;
  }
  err << app.help();
  return kConfigError;
}

}  // namespace covscan::cli
