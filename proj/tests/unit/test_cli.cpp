#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "covscan/cli.hpp"
#include "covscan/io.hpp"
#include "covscan/problems.hpp"

using namespace covscan;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable table(const fs::path& p) {
  std::ifstream in(p);
  return read_csv(in);
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run({}).code == cli::kConfigError);
  CHECK(run({"frobnicate"}).code == cli::kConfigError);
  const auto r = run({"scan"});
  CHECK(r.code == cli::kConfigError);
  CHECK_FALSE(r.err.empty());
  CHECK(run({"scan", "nope"}).code == cli::kConfigError);
  CHECK(run({"scan", "laplace", "--desk", "--paper-scale"}).code == cli::kConfigError);
  CHECK(run({"sample", "laplace"}).code == cli::kConfigError);
  CHECK(run({"fd-verify", "--trials", "0"}).code == cli::kConfigError);
  CHECK(run({"bvp-demo", "--nf", "-1"}).code == cli::kConfigError);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("list-problems") {
  const auto r = run({"list-problems"});
  CHECK(r.code == cli::kOk);
  for (const auto& id : preset_ids()) CHECK(r.out.find(id) != std::string::npos);
}

TEST_CASE("fd-verify") {
  TempDir dir("covscan_cli_fd");
  const auto report = (dir.path / "fd.json").string();
  const auto a = run({"fd-verify", "--trials", "40", "--seed", "5", "--report", report});
  CHECK(a.code == cli::kOk);
  const auto b = run({"fd-verify", "--trials", "40", "--seed", "5"});
  CHECK(a.out == b.out);
  const auto j = nlohmann::json::parse(slurp(report));
  CHECK(j.at("total") == 40);
  CHECK(j.at("passed") == 40);
}

TEST_CASE("sample") {
  TempDir dir("covscan_cli_sample");
  const double l3 = 9 * std::numbers::pi * std::numbers::pi;
  const std::vector<std::string> args{"sample", "laplace", "--lambda", format_double(l3), "--count",
                                      "5", "--seed", "7", "--out-dir", dir.str()};
  REQUIRE(run(args).code == cli::kOk);
  const auto first = slurp(dir.path / "laplace_samples.csv");
  const auto t = table(dir.path / "laplace_samples.csv");
  CHECK(t.header.size() == 6);
  CHECK(t.header[0] == "x");
  CHECK(t.rows.size() == 200);
  const auto side = nlohmann::json::parse(slurp(dir.path / "laplace_samples.json"));
  CHECK(side.at("seed") == 7);
  CHECK(side.at("count") == 5);

  REQUIRE(run(args).code == cli::kOk);
  CHECK(slurp(dir.path / "laplace_samples.csv") == first);

  CHECK(run({"sample", "laplace", "--lambda", "10", "--normalization", "bogus", "--out-dir", dir.str()})
            .code == cli::kConfigError);
}

TEST_CASE("bvp-demo") {
  TempDir dir("covscan_cli_bvp");
  REQUIRE(run({"bvp-demo", "--nf", "0", "8", "--out-dir", dir.str()}).code == cli::kOk);
  for (const char* name : {"bvp_nf0.csv", "bvp_nf8.csv"}) {
    const auto t = table(dir.path / name);
    CHECK(t.header == std::vector<std::string>{"x", "mean", "lower", "upper", "exact"});
    REQUIRE(t.rows.size() == 200);
    for (const auto& row : t.rows) {
      const double x = parse_double(row[0]);
      CHECK(parse_double(row[4]) == doctest::Approx(poisson_exact(x)).epsilon(1e-14));
      CHECK(parse_double(row[2]) <= parse_double(row[1]));
      CHECK(parse_double(row[1]) <= parse_double(row[3]));
    }
  }
}

TEST_CASE("scan across a pole") {
  TempDir dir("covscan_cli_pole");
  const auto r = run({"scan", "loaded-string", "--grid-lo", "0.5", "--grid-hi", "2", "--grid-count",
                      "3", "--collocation", "40", "--test-points", "40", "--out-dir", dir.str()});
  CHECK(r.code == cli::kOk);
  // log grid: the midpoint of [0.5, 2] is the pole at 1
  std::ifstream in(dir.path / "loaded-string_spectrum.csv");
  const auto pts = read_spectrum_csv(in);
  REQUIRE(pts.size() == 3);
  CHECK_FALSE(pts[0].skipped);
  CHECK(pts[1].skipped);
  CHECK_FALSE(pts[2].skipped);
}

TEST_CASE("scan with a config file") {
  TempDir dir("covscan_cli_cfg");
  const auto cfg = dir.path / "cfg.json";
  std::ofstream(cfg) << R"({"preset": "laplace", "collocation_count": 60, "test_count": 60,
                           "schedule": {"C": 18}, "grid": {"lo": 3, "hi": 30, "count": 25}})";
  const auto r = run({"scan", "--config", cfg.string(), "--refine", "10", "--out-dir", dir.str()});
  REQUIRE(r.code == cli::kOk);
  const auto peaks = peaks_from_json(nlohmann::json::parse(slurp(dir.path / "laplace_peaks.json")));
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].peak.refined);
  CHECK(*peaks[0].relative_error <= 0.01);

  CHECK(run({"scan", "laplace", "--config", cfg.string()}).code == cli::kConfigError);
  std::ofstream(dir.path / "bad.json") << R"({"preset": "laplace", "bogus": 1})";
  CHECK(run({"scan", "--config", (dir.path / "bad.json").string()}).code == cli::kConfigError);
}

TEST_CASE("desk-scale Laplace scan") {
  TempDir dir("covscan_cli_desk");
  const auto r = run({"scan", "laplace", "--desk", "--jobs", "0", "--out-dir", dir.str()});
  REQUIRE(r.code == cli::kOk);
  std::ifstream in(dir.path / "laplace_spectrum.csv");
  CHECK(read_spectrum_csv(in).size() == 300);
  const auto peaks = peaks_from_json(nlohmann::json::parse(slurp(dir.path / "laplace_peaks.json")));
  REQUIRE(peaks.size() >= 5);
  const auto ref = laplace_eigenvalues(5);
  for (int n = 0; n < 5; ++n) {
    CHECK(*peaks[static_cast<std::size_t>(n)].reference == doctest::Approx(ref[static_cast<std::size_t>(n)]));
    CHECK(*peaks[static_cast<std::size_t>(n)].relative_error <= 0.02);
  }
  for (const auto& p : peaks) CHECK(*p.relative_error <= 0.02);
}
