#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "covscan/matrixcase.hpp"
#include "covscan/posterior.hpp"
#include "covscan/problem.hpp"
#include "covscan/problems.hpp"
#include "covscan/scan.hpp"

namespace covscan {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
/// Throws InvalidArgument when `text` is not a complete number.
double parse_double(const std::string& text);

// JSON mapping. Coefficient expressions are written as numbers, the string
// "lambda", or one-key objects {"neg": e}, {"add": [a, b]}, {"mul": [a, b]},
// {"div": [a, b]}.
nlohmann::json to_json(const CoeffExpr& e);
CoeffExpr coeff_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LinearOperator& op);
LinearOperator operator_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProblemSpec& p);
/// Throws InvalidArgument on unknown keys, wrong types, or an invalid result.
ProblemSpec problem_from_json(const nlohmann::json& j);

/// A config document either spells out a full problem or names a preset and
/// overrides some fields:
///   {"preset": "laplace", "scale": "paper", "jitter": 1e-9, "grid": {"count": 100}}
/// Objects are merged key by key (JSON merge patch) onto the preset.
ProblemSpec problem_from_config(const nlohmann::json& doc);
ProblemSpec load_problem_config(const std::filesystem::path& path);

// Spectrum CSV: lambda,trace_J,skipped,rank,sv_max,sv_min_kept
inline constexpr const char* kSpectrumHeader = "lambda,trace_J,skipped,rank,sv_max,sv_min_kept";
void write_spectrum_csv(std::ostream& os, const SpectralScan& scan);
/// Reads rows back; skip reasons are not stored in the CSV.
std::vector<ScanPoint> read_spectrum_csv(std::istream& is);

struct PeakReport {
  PeakRecord peak;
  std::optional<double> reference;
  std::optional<double> relative_error;
};

/// Pairs each peak with the nearest reference eigenvalue (if any).
std::vector<PeakReport> match_references(const std::vector<PeakRecord>& peaks,
                                         const std::vector<double>& references);

nlohmann::json peaks_to_json(const SpectralScan& scan, const std::vector<PeakReport>& peaks,
                             const std::optional<DecayFit>& fit);
std::vector<PeakReport> peaks_from_json(const nlohmann::json& j);

/// x, sample_0, sample_1, ...
void write_samples_csv(std::ostream& os, const std::vector<double>& x,
                       const std::vector<EigenfunctionSample>& samples);
nlohmann::json samples_sidecar(const std::string& problem_id, const PosteriorSummary& summary,
                               const std::vector<EigenfunctionSample>& samples);

/// x, mean, lower, upper, exact with lower/upper = mean -+ 1.96 sqrt(var).
void write_bvp_csv(std::ostream& os, const PosteriorSummary& summary);

/// Simple numeric CSV reader (header row + rows of numbers / true / false).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(std::istream& is);

nlohmann::json fd_report_to_json(const FdTheoremReport& report);

std::string to_string(GridKind kind);
std::string to_string(ProblemMode mode);
std::string to_string(Normalization n);
Normalization normalization_from_string(const std::string& s);
Scale scale_from_string(const std::string& s);

}  // namespace covscan
