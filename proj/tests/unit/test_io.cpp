#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"

#include "covscan/errors.hpp"
#include "covscan/io.hpp"
#include "covscan/problems.hpp"

using namespace covscan;
using nlohmann::json;

namespace {

SpectralScan sample_scan() {
  SpectralScan s;
  s.problem_id = "laplace";
  s.grid = {GridKind::log, 1.0, 10.0, 3, 1.0};
  ScanPoint a;
  a.lambda = 1.0;
  a.trace_J = 1.0 / 3.0;
  a.diag = {5, 2.5, 1e-9, 1, 1e-8};
  ScanPoint b;
  b.lambda = std::sqrt(10.0);
  b.skipped = true;
  b.skip_reason = "pole";
  ScanPoint c;
  c.lambda = 10.0;
  c.trace_J = 6.02214076e-23;
  c.diag = {4, 1e300, 3e-300, 2, 0};
  s.points = {a, b, c};
  return s;
}

}  // namespace

TEST_CASE("double formatting round-trips") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::bit_cast<double>(rng());
    if (!std::isfinite(v)) continue;
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::isnan(parse_double(format_double(std::nan("")))));
  CHECK(parse_double(format_double(-std::numeric_limits<double>::infinity())) ==
        -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(parse_double("1.5x"), InvalidArgument);
  CHECK_THROWS_AS(parse_double(""), InvalidArgument);
}

TEST_CASE("coefficient and operator JSON") {
  const CoeffExpr lam = CoeffExpr::lambda();
  const CoeffExpr e = -(lam * 2.0 / (lam - 1.0)) + 3.0;
  CHECK(coeff_from_json(to_json(e)) == e);
  CHECK(coeff_from_json(json::parse(R"({"neg": "lambda"})")).eval(4.0) == -4.0);
  CHECK(coeff_from_json(json(2.5)).eval(0.0) == 2.5);
  CHECK_THROWS_AS(coeff_from_json(json("mu")), InvalidArgument);
  CHECK_THROWS_AS(coeff_from_json(json::parse(R"({"pow": [1, 2]})")), InvalidArgument);
  CHECK_THROWS_AS(coeff_from_json(json::parse(R"({"add": [1]})")), InvalidArgument);

  const LinearOperator op({{2, -1.0}, {0, -lam}});
  CHECK(operator_from_json(to_json(op)) == op);
  CHECK_THROWS_AS(operator_from_json(json::parse(R"([{"order": 2, "coef": 1}])")), InvalidArgument);
}

TEST_CASE("presets round-trip through JSON") {
  for (const auto& id : preset_ids())
    for (Scale sc : {Scale::desk, Scale::paper}) {
      const auto p = make_preset(id, sc);
      const auto text = to_json(p).dump();
      CHECK(problem_from_json(json::parse(text)) == p);
    }
}

TEST_CASE("config documents") {
  auto p = problem_from_config(json::parse(
      R"({"preset": "laplace", "scale": "paper", "jitter": 1e-9, "grid": {"count": 100}})"));
  auto want = laplace_dirichlet(Scale::paper);
  want.jitter = 1e-9;
  want.grid.count = 100;
  CHECK(p == want);

  p = problem_from_config(to_json(cantilever()));
  CHECK(p == cantilever());

  CHECK_THROWS_AS(problem_from_config(json::parse(R"({"preset": "laplace", "jiter": 1})")),
                  InvalidArgument);
  CHECK_THROWS_AS(problem_from_config(json::parse(R"({"preset": "laplace", "jitter": "big"})")),
                  InvalidArgument);
  CHECK_THROWS_AS(problem_from_config(json::parse(R"({"preset": "laplace", "grid": {"count": 1}})")),
                  InvalidArgument);
  CHECK_THROWS_AS(problem_from_config(json::parse(R"({"preset": "nope"})")), InvalidArgument);
  CHECK_THROWS_AS(problem_from_config(json::parse(R"({"preset": "laplace", "scale": "huge"})")),
                  InvalidArgument);

  const auto dir = std::filesystem::temp_directory_path() / "covscan_io_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "ok.json") << R"({"preset": "loaded-string", "parameters": {"mass": 1, "kappa": 1}})";
    std::ofstream(dir / "bad.json") << "{ not json";
  }
  CHECK(load_problem_config(dir / "ok.json") == loaded_string());
  CHECK_THROWS_AS(load_problem_config(dir / "bad.json"), InvalidArgument);
  CHECK_THROWS_AS(load_problem_config(dir / "missing.json"), InvalidArgument);
  std::filesystem::remove_all(dir);
}

TEST_CASE("spectrum CSV") {
  const auto scan = sample_scan();
  std::stringstream ss;
  write_spectrum_csv(ss, scan);
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  CHECK(header == kSpectrumHeader);
  const auto back = read_spectrum_csv(ss);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].lambda == scan.points[i].lambda);
    CHECK(back[i].skipped == scan.points[i].skipped);
    if (!back[i].skipped) {
      CHECK(back[i].trace_J == scan.points[i].trace_J);
      CHECK(back[i].diag.rank == scan.points[i].diag.rank);
      CHECK(back[i].diag.sv_max == scan.points[i].diag.sv_max);
      CHECK(back[i].diag.sv_min_kept == scan.points[i].diag.sv_min_kept);
    }
  }
  std::stringstream bad("lambda,J\n1,2\n");
  CHECK_THROWS_AS(read_spectrum_csv(bad), InvalidArgument);
}

TEST_CASE("peak reports") {
  const std::vector<PeakRecord> peaks{{9.9, 0.1, 10, true}, {40.0, 0.01, 50, true}};
  const auto reports = match_references(peaks, {9.8696044010893586, 39.478417604357434});
  REQUIRE(reports.size() == 2);
  CHECK(*reports[0].reference == 9.8696044010893586);
  CHECK(*reports[0].relative_error == doctest::Approx(std::abs(9.9 - 9.8696044010893586) / 9.8696044010893586));
  CHECK(*reports[1].reference == 39.478417604357434);
  CHECK_FALSE(match_references(peaks, {}).front().reference.has_value());

  const auto j = peaks_to_json(sample_scan(), reports, DecayFit{-0.5, 0.2});
  CHECK(j.at("problem") == "laplace");
  CHECK(j.at("decay_fit").at("slope") == -0.5);
  const auto back = peaks_from_json(json::parse(j.dump()));
  REQUIRE(back.size() == 2);
  CHECK(back[1].peak.lambda_hat == 40.0);
  CHECK(back[1].peak.grid_index == 50);
  CHECK(*back[0].relative_error == *reports[0].relative_error);
  CHECK(peaks_to_json(sample_scan(), {}, std::nullopt).at("decay_fit").is_null());
}

TEST_CASE("samples and bvp CSV") {
  std::vector<EigenfunctionSample> samples(2);
  samples[0].values = {0.0, 1.0, -0.5};
  samples[1].values = {0.25, 0.5, 0.75};
  samples[0].residual = 0.1;
  samples[0].seed = samples[1].seed = 7;
  samples[1].index = 1;
  std::stringstream ss;
  write_samples_csv(ss, {0.0, 0.5, 1.0}, samples);
  const auto t = read_csv(ss);
  CHECK(t.header == std::vector<std::string>{"x", "sample_0", "sample_1"});
  REQUIRE(t.rows.size() == 3);
  CHECK(parse_double(t.rows[2][1]) == -0.5);

  PosteriorSummary s;
  s.test_x = {0.0, 0.5, 1.0};
  s.mean = Eigen::Vector3d(0.0, 1.2, 0.0);
  s.cov = Eigen::Matrix3d::Zero();
  s.cov(1, 1) = 0.04;
  s.prior_trace = 3;
  s.diag.rank = 2;
  const auto side = samples_sidecar("laplace", s, samples);
  CHECK(side.at("seed") == 7);
  CHECK(side.at("count") == 2);
  CHECK(side.at("rank") == 2);
  CHECK(side.at("residuals").size() == 2);

  std::stringstream bs;
  write_bvp_csv(bs, s);
  const auto b = read_csv(bs);
  CHECK(b.header == std::vector<std::string>{"x", "mean", "lower", "upper", "exact"});
  REQUIRE(b.rows.size() == 3);
  CHECK(parse_double(b.rows[1][2]) == doctest::Approx(1.2 - 1.96 * 0.2));
  CHECK(parse_double(b.rows[1][3]) == doctest::Approx(1.2 + 1.96 * 0.2));
  CHECK(parse_double(b.rows[1][4]) == 1.25);
  CHECK(parse_double(b.rows[0][2]) == parse_double(b.rows[0][3]));
}

TEST_CASE("enum names") {
  CHECK(to_string(GridKind::power_root) == "power_root");
  CHECK(to_string(ProblemMode::bvp) == "bvp");
  CHECK(normalization_from_string(to_string(Normalization::sup_norm)) == Normalization::sup_norm);
  CHECK(normalization_from_string("l2") == Normalization::l2);
  CHECK_THROWS_AS(normalization_from_string("max"), InvalidArgument);
  CHECK(scale_from_string("paper") == Scale::paper);
  CHECK_THROWS_AS(scale_from_string("x"), InvalidArgument);
}

TEST_CASE("fd report JSON") {
  const auto r = fd_theorem_suite(5, 4, 1);
  const auto j = fd_report_to_json(r);
  CHECK(j.at("total") == 5);
  CHECK(j.at("passed") == r.passed_count());
}
