#include "covscan/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "covscan/errors.hpp"

namespace covscan {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw InvalidArgument("not a number: '" + text + "'");
  }
  return v;
}

std::string to_string(GridKind kind) {
  switch (kind) {
    case GridKind::linear: return "linear";
    case GridKind::log: return "log";
    case GridKind::power_root: return "power_root";
  }
  return "?";
}

std::string to_string(ProblemMode mode) { return mode == ProblemMode::eigen ? "eigen" : "bvp"; }

std::string to_string(Normalization n) {
  switch (n) {
    case Normalization::none: return "none";
    case Normalization::sup_norm: return "sup_norm";
    case Normalization::l2: return "l2";
  }
  return "?";
}

Normalization normalization_from_string(const std::string& s) {
  if (s == "none") return Normalization::none;
  if (s == "sup_norm" || s == "sup") return Normalization::sup_norm;
  if (s == "l2") return Normalization::l2;
  throw InvalidArgument("unknown normalization '" + s + "'");
}

Scale scale_from_string(const std::string& s) {
  if (s == "desk") return Scale::desk;
  if (s == "paper") return Scale::paper;
  throw InvalidArgument("unknown scale '" + s + "' (expected desk or paper)");
}

namespace {

GridKind grid_kind_from_string(const std::string& s) {
  if (s == "linear") return GridKind::linear;
  if (s == "log") return GridKind::log;
  if (s == "power_root") return GridKind::power_root;
  throw InvalidArgument("unknown grid kind '" + s + "'");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw InvalidArgument(std::string(what) + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw InvalidArgument(std::string("unknown key '") + key + "' in " + what);
  }
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json to_json(const CoeffExpr& e) {
  switch (e.kind()) {
    case CoeffExpr::Kind::constant: return e.value();
    case CoeffExpr::Kind::lambda: return "lambda";
    case CoeffExpr::Kind::negate: return json{{"neg", to_json(e.lhs())}};
    case CoeffExpr::Kind::sum: return json{{"add", {to_json(e.lhs()), to_json(e.rhs())}}};
    case CoeffExpr::Kind::product: return json{{"mul", {to_json(e.lhs()), to_json(e.rhs())}}};
    case CoeffExpr::Kind::quotient: return json{{"div", {to_json(e.lhs()), to_json(e.rhs())}}};
  }
  return nullptr;
}

CoeffExpr coeff_from_json(const json& j) {
  if (j.is_number()) return CoeffExpr(j.get<double>());
  if (j.is_string()) {
    if (j.get<std::string>() == "lambda") return CoeffExpr::lambda();
    throw InvalidArgument("unknown coefficient symbol '" + j.get<std::string>() + "'");
  }
  if (j.is_object() && j.size() == 1) {
    const auto& [key, arg] = *j.items().begin();
    if (key == "neg") return -coeff_from_json(arg);
    if (!arg.is_array() || arg.size() != 2) {
      throw InvalidArgument("coefficient '" + key + "' needs two operands");
    }
    const auto a = coeff_from_json(arg[0]);
    const auto b = coeff_from_json(arg[1]);
    if (key == "add") return a + b;
    if (key == "mul") return a * b;
    if (key == "div") return a / b;
    throw InvalidArgument("unknown coefficient operation '" + key + "'");
  }
  throw InvalidArgument("malformed coefficient expression: " + j.dump());
}

json to_json(const LinearOperator& op) {
  json terms = json::array();
  for (const auto& t : op.terms()) terms.push_back({{"order", t.deriv_order}, {"coeff", to_json(t.coeff)}});
  return terms;
}

LinearOperator operator_from_json(const json& j) {
  if (!j.is_array()) throw InvalidArgument("operator must be a list of terms");
  std::vector<OperatorTerm> terms;
  for (const auto& t : j) {
    check_keys(t, {"order", "coeff"}, "operator term");
    OperatorTerm term;
    term.deriv_order = t.at("order").get<int>();
    term.coeff = t.contains("coeff") ? coeff_from_json(t.at("coeff")) : CoeffExpr(1.0);
    terms.push_back(term);
  }
  return LinearOperator(std::move(terms));
}

json to_json(const ProblemSpec& p) {
  json boundary = json::array();
  for (const auto& s : p.boundary) {
    boundary.push_back({{"location", s.location}, {"op", to_json(s.op)}, {"rhs", s.rhs}});
  }
  json table = json::array();
  for (const auto& [x, f] : p.source.table) table.push_back({x, f});
  json j = {
      {"id", p.id},
      {"domain", {p.x_lo, p.x_hi}},
      {"mode", to_string(p.mode)},
      {"interior_op", to_json(p.interior_op)},
      {"boundary", boundary},
      {"collocation_count", p.collocation_count},
      {"test_count", p.test_count},
      {"schedule",
       {{"C", p.schedule.C}, {"exponent", p.schedule.exponent}, {"variance", p.schedule.variance}}},
      {"jitter", p.jitter},
      {"rcond", p.rcond},
      {"grid",
       {{"kind", to_string(p.grid.kind)},
        {"lo", p.grid.lo},
        {"hi", p.grid.hi},
        {"count", p.grid.count},
        {"root", p.grid.root}}},
      {"source", {{"constant", p.source.constant}, {"table", table}}},
      {"prominence_decades", p.prominence_decades},
      {"parameters", p.parameters},
  };
  if (p.fixed_length_scale) j["fixed_length_scale"] = *p.fixed_length_scale;
  return j;
}

ProblemSpec problem_from_json(const json& j) {
  try {
    check_keys(j,
               {"id", "domain", "mode", "interior_op", "boundary", "collocation_count", "test_count",
                "schedule", "fixed_length_scale", "jitter", "rcond", "grid", "source",
                "prominence_decades", "parameters"},
               "problem");
    ProblemSpec p;
    read_if(j, "id", p.id);
    if (j.contains("domain")) {
      const auto& d = j.at("domain");
      if (!d.is_array() || d.size() != 2) throw InvalidArgument("domain must be [x_lo, x_hi]");
      p.x_lo = d[0].get<double>();
      p.x_hi = d[1].get<double>();
    }
    if (j.contains("mode")) {
      const auto m = j.at("mode").get<std::string>();
      if (m == "eigen") p.mode = ProblemMode::eigen;
      else if (m == "bvp") p.mode = ProblemMode::bvp;
      else throw InvalidArgument("unknown mode '" + m + "'");
    }
    if (j.contains("interior_op")) p.interior_op = operator_from_json(j.at("interior_op"));
    if (j.contains("boundary")) {
      p.boundary.clear();
      for (const auto& s : j.at("boundary")) {
        check_keys(s, {"location", "op", "rhs"}, "boundary site");
        ConstraintSite site;
        site.location = s.at("location").get<double>();
        site.op = operator_from_json(s.at("op"));
        read_if(s, "rhs", site.rhs);
        p.boundary.push_back(site);
      }
    }
    read_if(j, "collocation_count", p.collocation_count);
    read_if(j, "test_count", p.test_count);
    if (j.contains("schedule")) {
      const auto& s = j.at("schedule");
      check_keys(s, {"C", "exponent", "variance"}, "schedule");
      read_if(s, "C", p.schedule.C);
      read_if(s, "exponent", p.schedule.exponent);
      read_if(s, "variance", p.schedule.variance);
    }
    if (j.contains("fixed_length_scale") && !j.at("fixed_length_scale").is_null()) {
      p.fixed_length_scale = j.at("fixed_length_scale").get<double>();
    }
    read_if(j, "jitter", p.jitter);
    read_if(j, "rcond", p.rcond);
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      check_keys(g, {"kind", "lo", "hi", "count", "root"}, "grid");
      if (g.contains("kind")) p.grid.kind = grid_kind_from_string(g.at("kind").get<std::string>());
      read_if(g, "lo", p.grid.lo);
      read_if(g, "hi", p.grid.hi);
      read_if(g, "count", p.grid.count);
      read_if(g, "root", p.grid.root);
    }
    if (j.contains("source")) {
      const auto& s = j.at("source");
      check_keys(s, {"constant", "table"}, "source");
      read_if(s, "constant", p.source.constant);
      p.source.table.clear();
      if (s.contains("table")) {
        for (const auto& row : s.at("table")) {
          if (!row.is_array() || row.size() != 2) throw InvalidArgument("source table rows are [x, f]");
          p.source.table.emplace_back(row[0].get<double>(), row[1].get<double>());
        }
        if (!std::is_sorted(p.source.table.begin(), p.source.table.end())) {
          throw InvalidArgument("source table must be sorted by x");
        }
      }
    }
    read_if(j, "prominence_decades", p.prominence_decades);
    if (j.contains("parameters")) p.parameters = j.at("parameters").get<std::map<std::string, double>>();
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
}

ProblemSpec problem_from_config(const json& doc) {
  if (!doc.is_object()) throw InvalidArgument("config must be a JSON object");
  if (!doc.contains("preset")) return problem_from_json(doc);
  try {
    const auto id = doc.at("preset").get<std::string>();
    const auto scale = doc.contains("scale") ? scale_from_string(doc.at("scale").get<std::string>())
                                             : Scale::desk;
    json merged = to_json(make_preset(id, scale));
    json patch = doc;
    patch.erase("preset");
    patch.erase("scale");
    merged.merge_patch(patch);
    return problem_from_json(merged);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
}

ProblemSpec load_problem_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("config " + path.string() + ": " + e.what());
  }
  return problem_from_config(doc);
}

void write_spectrum_csv(std::ostream& os, const SpectralScan& scan) {
  os << kSpectrumHeader << '\n';
  for (const auto& p : scan.points) {
    os << format_double(p.lambda) << ',' << format_double(p.trace_J) << ','
       << (p.skipped ? "true" : "false") << ',' << p.diag.rank << ','
       << format_double(p.diag.sv_max) << ',' << format_double(p.diag.sv_min_kept) << '\n';
  }
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      t.header = split(line);
      first = false;
    } else {
      auto row = split(line);
      if (row.size() != t.header.size()) throw InvalidArgument("csv row has the wrong column count");
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

std::vector<ScanPoint> read_spectrum_csv(std::istream& is) {
  const auto t = read_csv(is);
  std::string header;
  for (std::size_t i = 0; i < t.header.size(); ++i) header += (i ? "," : "") + t.header[i];
  if (header != kSpectrumHeader) throw InvalidArgument("unexpected spectrum header '" + header + "'");
  std::vector<ScanPoint> points;
  for (const auto& r : t.rows) {
    ScanPoint p;
    p.lambda = parse_double(r[0]);
    p.trace_J = parse_double(r[1]);
    if (r[2] != "true" && r[2] != "false") throw InvalidArgument("skipped must be true/false");
    p.skipped = r[2] == "true";
    p.diag.rank = static_cast<int>(parse_double(r[3]));
    p.diag.sv_max = parse_double(r[4]);
    p.diag.sv_min_kept = parse_double(r[5]);
    points.push_back(p);
  }
  return points;
}

std::vector<PeakReport> match_references(const std::vector<PeakRecord>& peaks,
                                         const std::vector<double>& references) {
  std::vector<PeakReport> out;
  for (const auto& p : peaks) {
    PeakReport r{p, std::nullopt, std::nullopt};
    if (!references.empty()) {
      const auto it = std::min_element(references.begin(), references.end(), [&](double a, double b) {
        return std::abs(a - p.lambda_hat) < std::abs(b - p.lambda_hat);
      });
      r.reference = *it;
      r.relative_error = std::abs(p.lambda_hat - *it) / std::abs(*it);
    }
    out.push_back(r);
  }
  return out;
}

json peaks_to_json(const SpectralScan& scan, const std::vector<PeakReport>& peaks,
                   const std::optional<DecayFit>& fit) {
  json arr = json::array();
  for (const auto& r : peaks) {
    json p = {{"lambda_hat", r.peak.lambda_hat},
              {"J_peak", r.peak.J_peak},
              {"grid_index", r.peak.grid_index},
              {"refined", r.peak.refined}};
    p["reference_lambda"] = r.reference ? json(*r.reference) : json(nullptr);
    p["relative_error"] = r.relative_error ? json(*r.relative_error) : json(nullptr);
    arr.push_back(p);
  }
  json j = {{"problem", scan.problem_id},
            {"grid",
             {{"kind", to_string(scan.grid.kind)},
              {"lo", scan.grid.lo},
              {"hi", scan.grid.hi},
              {"count", scan.grid.count},
              {"root", scan.grid.root}}},
            {"schedule",
             {{"C", scan.schedule.C},
              {"exponent", scan.schedule.exponent},
              {"variance", scan.schedule.variance}}},
            {"peaks", arr}};
  if (fit) j["decay_fit"] = {{"slope", fit->slope}, {"intercept", fit->intercept}};
  else j["decay_fit"] = nullptr;
  return j;
}

std::vector<PeakReport> peaks_from_json(const json& j) {
  try {
    std::vector<PeakReport> out;
    for (const auto& p : j.at("peaks")) {
      PeakReport r;
      r.peak.lambda_hat = p.at("lambda_hat").get<double>();
      r.peak.J_peak = p.at("J_peak").get<double>();
      r.peak.grid_index = p.at("grid_index").get<int>();
      r.peak.refined = p.at("refined").get<bool>();
      if (!p.at("reference_lambda").is_null()) r.reference = p.at("reference_lambda").get<double>();
      if (!p.at("relative_error").is_null()) r.relative_error = p.at("relative_error").get<double>();
      out.push_back(r);
    }
    return out;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("peaks json: ") + e.what());
  }
}

void write_samples_csv(std::ostream& os, const std::vector<double>& x,
                       const std::vector<EigenfunctionSample>& samples) {
  os << 'x';
  for (const auto& s : samples) os << ",sample_" << s.index;
  os << '\n';
  for (std::size_t i = 0; i < x.size(); ++i) {
    os << format_double(x[i]);
    for (const auto& s : samples) os << ',' << format_double(s.values.at(i));
    os << '\n';
  }
}

json samples_sidecar(const std::string& problem_id, const PosteriorSummary& summary,
                     const std::vector<EigenfunctionSample>& samples) {
  json residuals = json::array();
  for (const auto& s : samples) residuals.push_back(s.residual);
  const double max_diag = summary.cov.size() > 0 ? summary.cov.diagonal().maxCoeff() : 0.0;
  return {{"problem", problem_id},
          {"lambda", summary.lambda},
          {"trace_J", summary.trace_J},
          {"prior_trace", summary.prior_trace},
          {"max_diag", max_diag},
          {"rank", summary.diag.rank},
          {"seed", samples.empty() ? 0 : samples.front().seed},
          {"count", samples.size()},
          {"normalization",
           to_string(samples.empty() ? Normalization::none : samples.front().normalization)},
          {"residuals", residuals}};
}

void write_bvp_csv(std::ostream& os, const PosteriorSummary& summary) {
  os << "x,mean,lower,upper,exact\n";
  for (std::size_t i = 0; i < summary.test_x.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double x = summary.test_x[i];
    const double m = summary.mean(k);
    const double band = 1.96 * std::sqrt(std::max(summary.cov(k, k), 0.0));
    os << format_double(x) << ',' << format_double(m) << ',' << format_double(m - band) << ','
       << format_double(m + band) << ',' << format_double(poisson_exact(x)) << '\n';
  }
}

json fd_report_to_json(const FdTheoremReport& report) {
  json trials = json::array();
  for (const auto& t : report.trials) {
    trials.push_back({{"trial", t.trial},
                      {"dim", t.dim},
                      {"multiplicity", t.multiplicity},
                      {"lambda_on", t.lambda_on},
                      {"lambda_off", t.lambda_off},
                      {"off_norm_ratio", t.off_norm_ratio},
                      {"off_sample_norm", t.off_sample_norm},
                      {"on_trace_ratio", t.on_trace_ratio},
                      {"sample_residual", t.sample_residual},
                      {"factor_error", t.factor_error},
                      {"projector_error", t.projector_error},
                      {"posterior_rank", t.posterior_rank},
                      {"passed", t.passed}});
  }
  const auto& tol = report.tolerances;
  return {{"passed", report.passed_count()},
          {"total", report.trials.size()},
          {"tolerances",
           {{"off_norm", tol.off_norm},
            {"off_sample", tol.off_sample},
            {"on_trace", tol.on_trace},
            {"sample_residual", tol.sample_residual},
            {"factor", tol.factor},
            {"projector", tol.projector}}},
          {"trials", trials}};
}

}  // namespace covscan
