#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "wfit/distributions.hpp"
#include "wfit/errors.hpp"
#include "wfit/estimation.hpp"
#include "wfit/model_selection.hpp"
#include "wfit/prediction.hpp"
#include "wfit/resampling.hpp"
#include "wfit/sample.hpp"

namespace wfit {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::string_view kTestModeEnv = "WFIT_TEST_MODE";

using Json = nlohmann::ordered_json;

/// True when WFIT_TEST_MODE is set to anything other than "" or "0".
inline bool test_mode() {
  const char* v = std::getenv(kTestModeEnv.data());
  return v != nullptr && *v != '\0' && std::string_view(v) != "0";
}

/// UTC ISO-8601 timestamp; the epoch in test mode.
inline std::string report_timestamp() {
  if (test_mode()) return "1970-01-01T00:00:00Z";
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// CSV samples

struct CsvOptions {
  bool header = false;  // skip the first non-blank line
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

inline void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace detail

/// Parses one positive number per line. Blank lines are ignored.
inline Sample parse_csv(std::istream& in, const CsvOptions& options = {}) {
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  bool header_pending = options.header;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view raw(line);
    const std::string_view tok = detail::trim(raw);
    if (tok.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const std::size_t column = static_cast<std::size_t>(tok.data() - raw.data()) + 1;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw ParseError(lineno, column, std::string(tok), "not a number");
    }
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw ParseError(lineno, column, std::string(tok), "lifetime must be a positive finite number");
    }
    values.push_back(v);
  }
  if (values.empty()) throw EmptyInputError("input contains no data records");
  return Sample(std::move(values));
}

inline Sample load_csv(const std::filesystem::path& path, const CsvOptions& options = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return parse_csv(in, options);
  } catch (const EmptyInputError&) {
    throw EmptyInputError("'" + path.string() + "' contains no data records");
  }
}

/// One value per line at full precision, so load_csv reads back the same doubles.
inline void write_csv(const Sample& s, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  for (double v : s.values()) out << detail::format_double(v) << '\n';
  detail::finish_write(out, path);
}

inline void write_ttt_csv(const TttCurve& curve, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "r_over_n,G\n";
  for (const auto& p : curve.points) {
    out << detail::format_double(p.r_over_n) << ',' << detail::format_double(p.g) << '\n';
  }
  detail::finish_write(out, path);
}

// ---------------------------------------------------------------------------
// Report

struct InputSummary {
  std::string source;
  std::size_t n = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;

  static InputSummary of(const Sample& s, std::string source) {
    return {std::move(source), s.size(), s.min(), s.max(), s.mean()};
  }
};

struct FamilyEntry {
  FitResult fit;
  std::optional<GofResult> gof;
};

struct Report {
  int schema_version = kSchemaVersion;
  std::string tool_version = std::string(kToolVersion);
  std::string generated_at;
  std::string command;
  Json config = Json::object();
  std::uint64_t seed = 0;
  InputSummary input;
  std::optional<TttCurve> ttt;
  std::string hazard_shape;
  std::vector<FamilyEntry> fits;
  std::optional<SelectionReport> selection;
  std::optional<BootstrapResult> bootstrap;
  std::optional<MaintenancePlan> plan;
};

namespace detail {

// Non-finite doubles are written as null (NaN) or the strings "inf" / "-inf".
inline Json num(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline double get_num(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ParseError(0, 0, s, "expected a number");
  }
  return j.get<double>();
}

inline Json params_json(const Params& p) {
  Json j = Json::object();
  const auto names = param_names(family_of(p));
  const auto v = param_values(p);
  for (std::size_t i = 0; i < 3; ++i) j[std::string(names[i])] = num(v[i]);
  return j;
}

inline Params params_from_json(Family f, const Json& j) {
  const auto names = param_names(f);
  std::array<double, 3> v{};
  for (std::size_t i = 0; i < 3; ++i) v[i] = get_num(j.at(std::string(names[i])));
  return make_params(f, v);
}

inline Json interval_json(const Interval& iv) { return Json{{"lower", num(iv.lower)}, {"upper", num(iv.upper)}}; }

inline Interval interval_from_json(const Json& j) { return {get_num(j.at("lower")), get_num(j.at("upper"))}; }

inline Json fit_json(const FitResult& f) {
  const auto names = param_names(f.family);
  Json se = Json::object();
  Json ci = Json::object();
  for (std::size_t i = 0; i < 3; ++i) {
    se[std::string(names[i])] = num(f.std_errors[i]);
    ci[std::string(names[i])] = interval_json(f.wald_ci_95[i]);
  }
  Json info = Json::array();
  for (int r = 0; r < 3; ++r) {
    Json row = Json::array();
    for (int c = 0; c < 3; ++c) row.push_back(num(f.observed_info(r, c)));
    info.push_back(std::move(row));
  }
  return Json{{"family", family_name(f.family)},
              {"params", params_json(f.params)},
              {"loglik", num(f.loglik)},
              {"std_errors", std::move(se)},
              {"wald_ci_95", std::move(ci)},
              {"observed_information", std::move(info)},
              {"score_residual", num(f.score_residual)},
              {"converged", f.converged},
              {"optimizer_converged", f.optimizer_converged},
              {"at_search_boundary", f.at_search_boundary},
              {"restarts", f.n_restarts_used},
              {"evaluations", f.evaluations},
              {"n", f.n},
              {"diagnostics", f.diagnostics}};
}

inline FitResult fit_from_json(const Json& j) {
  FitResult f;
  f.family = parse_family(j.at("family").get<std::string>());
  f.params = params_from_json(f.family, j.at("params"));
  f.loglik = get_num(j.at("loglik"));
  const auto names = param_names(f.family);
  for (std::size_t i = 0; i < 3; ++i) {
    f.std_errors[i] = get_num(j.at("std_errors").at(std::string(names[i])));
    f.wald_ci_95[i] = interval_from_json(j.at("wald_ci_95").at(std::string(names[i])));
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) f.observed_info(r, c) = get_num(j.at("observed_information").at(r).at(c));
  }
  f.score_residual = get_num(j.at("score_residual"));
  f.converged = j.at("converged").get<bool>();
  f.optimizer_converged = j.at("optimizer_converged").get<bool>();
  f.at_search_boundary = j.at("at_search_boundary").get<bool>();
  f.n_restarts_used = j.at("restarts").get<int>();
  f.evaluations = j.at("evaluations").get<int>();
  f.n = j.at("n").get<std::size_t>();
  f.diagnostics = j.at("diagnostics").get<std::string>();
  return f;
}

inline Json gof_json(const GofResult& g) {
  return Json{{"family", family_name(g.family)},
              {"loglik", num(g.loglik)},
              {"k", g.k},
              {"n", g.n},
              {"aic", num(g.aic)},
              {"aicc", num(g.aicc)},
              {"ks_d", num(g.ks_stat)},
              {"ks_p", num(g.ks_pvalue)},
              {"admissible", g.admissible()},
              {"score_residual", num(g.score_residual)},
              {"converged", g.converged}};
}

inline GofResult gof_from_json(const Json& j) {
  GofResult g;
  g.family = parse_family(j.at("family").get<std::string>());
  g.loglik = get_num(j.at("loglik"));
  g.k = j.at("k").get<int>();
  g.n = j.at("n").get<std::size_t>();
  g.aic = get_num(j.at("aic"));
  g.aicc = get_num(j.at("aicc"));
  g.ks_stat = get_num(j.at("ks_d"));
  g.ks_pvalue = get_num(j.at("ks_p"));
  g.score_residual = get_num(j.at("score_residual"));
  g.converged = j.at("converged").get<bool>();
  return g;
}

inline Json bootstrap_json(const BootstrapResult& b) {
  Json stats = Json::array();
  for (const auto& s : b.statistics) {
    stats.push_back(Json{{"name", s.name},
                         {"point", num(s.point)},
                         {"lower", num(s.interval.lower)},
                         {"upper", num(s.interval.upper)},
                         {"sd", num(s.sd)}});
  }
  return Json{{"family", family_name(b.family)}, {"replicates", b.replicates},
              {"effective", b.effective},        {"failed", b.failed},
              {"seed", b.seed},                  {"level", num(b.level)},
              {"u", num(b.u)},                   {"statistics", std::move(stats)}};
}

inline BootstrapResult bootstrap_from_json(const Json& j) {
  BootstrapResult b;
  b.family = parse_family(j.at("family").get<std::string>());
  b.replicates = j.at("replicates").get<int>();
  b.effective = j.at("effective").get<int>();
  b.failed = j.at("failed").get<int>();
  b.seed = j.at("seed").get<std::uint64_t>();
  b.level = get_num(j.at("level"));
  b.u = get_num(j.at("u"));
  for (const auto& s : j.at("statistics")) {
    BootstrapStatistic st;
    st.name = s.at("name").get<std::string>();
    st.point = get_num(s.at("point"));
    st.interval = {get_num(s.at("lower")), get_num(s.at("upper"))};
    st.sd = get_num(s.at("sd"));
    b.statistics.push_back(std::move(st));
  }
  return b;
}

inline Json plan_json(const MaintenancePlan& p) {
  return Json{{"family", family_name(p.family)},
              {"params", params_json(p.params)},
              {"u", num(p.u)},
              {"y_star", num(p.y_star)},
              {"ci", interval_json(p.ci)},
              {"level", num(p.level)},
              {"rounded_days", p.rounded_days()},
              {"replicates", p.replicates},
              {"effective_replicates", p.effective_replicates},
              {"seed", p.seed},
              {"recommendation", p.recommendation()}};
}

inline MaintenancePlan plan_from_json(const Json& j) {
  MaintenancePlan p;
  p.family = parse_family(j.at("family").get<std::string>());
  p.params = params_from_json(p.family, j.at("params"));
  p.u = get_num(j.at("u"));
  p.y_star = get_num(j.at("y_star"));
  p.ci = interval_from_json(j.at("ci"));
  p.level = get_num(j.at("level"));
  p.replicates = j.at("replicates").get<int>();
  p.effective_replicates = j.at("effective_replicates").get<int>();
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

}  // namespace detail

inline Json to_json(const Report& r) {
  Json j;
  j["schema_version"] = r.schema_version;
  j["tool"] = "wfit";
  j["tool_version"] = r.tool_version;
  j["generated_at"] = r.generated_at;
  j["command"] = r.command;
  j["config"] = r.config;
  j["seed"] = r.seed;
  j["input"] = Json{{"source", r.input.source},
                    {"n", r.input.n},
                    {"min", detail::num(r.input.min)},
                    {"max", detail::num(r.input.max)},
                    {"mean", detail::num(r.input.mean)}};
  if (r.ttt) {
    Json pts = Json::array();
    for (const auto& p : r.ttt->points) pts.push_back(Json::array({p.r_over_n, p.g}));
    j["ttt"] = Json{{"hazard_shape", r.hazard_shape}, {"points", std::move(pts)}};
  } else {
    j["ttt"] = nullptr;
  }
  Json fits = Json::array();
  for (const auto& e : r.fits) {
    Json f = detail::fit_json(e.fit);
    f["gof"] = e.gof ? detail::gof_json(*e.gof) : Json(nullptr);
    fits.push_back(std::move(f));
  }
  j["fits"] = std::move(fits);
  if (r.selection) {
    Json ranking = Json::array();
    for (const auto& g : r.selection->results) ranking.push_back(detail::gof_json(g));
    j["selection"] = Json{{"best", family_name(r.selection->best)}, {"ranking", std::move(ranking)}};
  } else {
    j["selection"] = nullptr;
  }
  j["bootstrap"] = r.bootstrap ? detail::bootstrap_json(*r.bootstrap) : Json(nullptr);
  j["plan"] = r.plan ? detail::plan_json(*r.plan) : Json(nullptr);
  return j;
}

inline Report report_from_json(const Json& j) {
  Report r;
  r.schema_version = j.at("schema_version").get<int>();
  if (r.schema_version != kSchemaVersion) {
    throw ParseError(0, 0, std::to_string(r.schema_version), "unsupported report schema_version");
  }
  r.tool_version = j.at("tool_version").get<std::string>();
  r.generated_at = j.at("generated_at").get<std::string>();
  r.command = j.at("command").get<std::string>();
  r.config = j.at("config");
  r.seed = j.at("seed").get<std::uint64_t>();
  const auto& in = j.at("input");
  r.input = {in.at("source").get<std::string>(), in.at("n").get<std::size_t>(), detail::get_num(in.at("min")),
             detail::get_num(in.at("max")), detail::get_num(in.at("mean"))};
  if (!j.at("ttt").is_null()) {
    TttCurve c;
    for (const auto& p : j.at("ttt").at("points")) c.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    r.ttt = std::move(c);
    r.hazard_shape = j.at("ttt").at("hazard_shape").get<std::string>();
  }
  for (const auto& f : j.at("fits")) {
    FamilyEntry e{detail::fit_from_json(f), std::nullopt};
    if (!f.at("gof").is_null()) e.gof = detail::gof_from_json(f.at("gof"));
    r.fits.push_back(std::move(e));
  }
  if (!j.at("selection").is_null()) {
    SelectionReport s;
    s.best = parse_family(j.at("selection").at("best").get<std::string>());
    for (const auto& g : j.at("selection").at("ranking")) s.results.push_back(detail::gof_from_json(g));
    r.selection = std::move(s);
  }
  if (!j.at("bootstrap").is_null()) r.bootstrap = detail::bootstrap_from_json(j.at("bootstrap"));
  if (!j.at("plan").is_null()) r.plan = detail::plan_from_json(j.at("plan"));
  return r;
}

enum class ReportFormat { Json, CsvBundle };

inline void write_report_json(const Report& r, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << to_json(r).dump(2) << '\n';
  detail::finish_write(out, path);
}

/// Directory with ttt.csv, fits.csv, selection.csv and plan.csv. Sections missing from
/// the report produce header-only files.
inline void write_report_csv_bundle(const Report& r, const std::filesystem::path& dir) {
  using detail::format_double;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());

  {
    const auto path = dir / "ttt.csv";
    if (r.ttt) {
      write_ttt_csv(*r.ttt, path);
    } else {
      auto out = detail::open_for_write(path);
      out << "r_over_n,G\n";
      detail::finish_write(out, path);
    }
  }
  {
    const auto path = dir / "fits.csv";
    auto out = detail::open_for_write(path);
    out << "family,parameter,estimate,std_error,ci_lower,ci_upper,loglik,converged\n";
    for (const auto& e : r.fits) {
      const auto names = param_names(e.fit.family);
      const auto v = param_values(e.fit.params);
      for (std::size_t i = 0; i < 3; ++i) {
        out << family_name(e.fit.family) << ',' << names[i] << ',' << format_double(v[i]) << ','
            << format_double(e.fit.std_errors[i]) << ',' << format_double(e.fit.wald_ci_95[i].lower) << ','
            << format_double(e.fit.wald_ci_95[i].upper) << ',' << format_double(e.fit.loglik) << ','
            << (e.fit.converged ? "true" : "false") << '\n';
      }
    }
    detail::finish_write(out, path);
  }
  {
    const auto path = dir / "selection.csv";
    auto out = detail::open_for_write(path);
    out << "family,aic,aicc,ks_d,ks_p,admissible\n";
    std::vector<GofResult> rows;
    if (r.selection) {
      rows = r.selection->results;
    } else {
      for (const auto& e : r.fits) {
        if (e.gof) rows.push_back(*e.gof);
      }
    }
    for (const auto& g : rows) {
      out << family_name(g.family) << ',' << format_double(g.aic) << ',' << format_double(g.aicc) << ','
          << format_double(g.ks_stat) << ',' << format_double(g.ks_pvalue) << ','
          << (g.admissible() ? "true" : "false") << '\n';
    }
    detail::finish_write(out, path);
  }
  {
    const auto path = dir / "plan.csv";
    auto out = detail::open_for_write(path);
    out << "family,u,y_star,ci_lower,ci_upper,level,rounded_days,replicates,effective_replicates,seed\n";
    if (r.plan) {
      const auto& p = *r.plan;
      out << family_name(p.family) << ',' << format_double(p.u) << ',' << format_double(p.y_star) << ','
          << format_double(p.ci.lower) << ',' << format_double(p.ci.upper) << ',' << format_double(p.level)
          << ',' << p.rounded_days() << ',' << p.replicates << ',' << p.effective_replicates << ',' << p.seed
          << '\n';
    }
    detail::finish_write(out, path);
  }
}

inline void write_report(const Report& r, const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::Json) {
    write_report_json(r, path);
  } else {
    write_report_csv_bundle(r, path);
  }
}

inline Report read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, e.byte, "", std::string("malformed JSON in '") + path.string() + "'");
  }
  return report_from_json(j);
}

// ---------------------------------------------------------------------------
// SVG plots

namespace detail {

struct PlotFrame {
  double width = 640, height = 480, left = 64, right = 24, top = 40, bottom = 56;
  double xmax = 1.0, ymax = 1.0;

  double px(double x) const { return left + x / xmax * (width - left - right); }
  double py(double y) const { return height - bottom - y / ymax * (height - top - bottom); }
};

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline void svg_open(std::ostream& out, const PlotFrame& f, std::string_view title, std::string_view xlabel,
                     std::string_view ylabel) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
      << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << fmt(f.width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(title) << "</text>\n"
      << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
      << "<line x1=\"" << fmt(f.px(0)) << "\" y1=\"" << fmt(f.py(0)) << "\" x2=\"" << fmt(f.px(f.xmax))
      << "\" y2=\"" << fmt(f.py(0)) << "\"/>\n"
      << "<line x1=\"" << fmt(f.px(0)) << "\" y1=\"" << fmt(f.py(0)) << "\" x2=\"" << fmt(f.px(0))
      << "\" y2=\"" << fmt(f.py(f.ymax)) << "\"/>\n"
      << "</g>\n<g class=\"ticks\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double x = f.xmax * i / 5.0;
    const double y = f.ymax * i / 5.0;
    out << "<text x=\"" << fmt(f.px(x)) << "\" y=\"" << fmt(f.py(0) + 16) << "\" text-anchor=\"middle\">"
        << fmt(x) << "</text>\n"
        << "<text x=\"" << fmt(f.px(0) - 6) << "\" y=\"" << fmt(f.py(y) + 4) << "\" text-anchor=\"end\">"
        << fmt(y) << "</text>\n";
  }
  out << "</g>\n"
      << "<text x=\"" << fmt(f.width / 2) << "\" y=\"" << fmt(f.height - 12) << "\" text-anchor=\"middle\">"
      << xml_escape(xlabel) << "</text>\n"
      << "<text x=\"16\" y=\"" << fmt(f.height / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fmt(f.height / 2) << ")\">" << xml_escape(ylabel) << "</text>\n";
}

inline const char* family_color(Family f) {
  switch (f) {
    case Family::GG: return "#1f77b4";
    case Family::GW: return "#ff7f0e";
    case Family::EW: return "#d62728";
    case Family::MOW: return "#2ca02c";
    case Family::EPW: return "#9467bd";
  }
  return "black";
}

}  // namespace detail

/// TTT curve as a polyline with one vertex per order statistic, plus the unit diagonal.
inline void write_ttt_plot(const TttCurve& curve, const std::filesystem::path& path,
                           std::string_view title = "TTT plot") {
  if (curve.points.empty()) throw ParameterError("write_ttt_plot: empty curve");
  using detail::fmt;
  detail::PlotFrame f;
  auto out = detail::open_for_write(path);
  detail::svg_open(out, f, title, "r/n", "G(r/n)");
  out << "<line class=\"diagonal\" x1=\"" << fmt(f.px(0)) << "\" y1=\"" << fmt(f.py(0)) << "\" x2=\""
      << fmt(f.px(1)) << "\" y2=\"" << fmt(f.py(1)) << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
  out << "<polyline class=\"ttt-curve\" data-n=\"" << curve.points.size()
      << "\" fill=\"none\" stroke=\"black\" points=\"";
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    if (i) out << ' ';
    out << fmt(f.px(curve.points[i].r_over_n)) << ',' << fmt(f.py(curve.points[i].g));
  }
  out << "\"/>\n</svg>\n";
  detail::finish_write(out, path);
}

/// Empirical survival step function (1 - edf) with one labelled fitted survival curve
/// per entry of `overlays`.
inline void write_survival_plot(const Sample& s, const std::vector<std::pair<Family, Params>>& overlays,
                                const std::filesystem::path& path,
                                std::string_view title = "Empirical and fitted survival") {
  if (overlays.empty()) throw ParameterError("write_survival_plot: no fitted curves to overlay");
  using detail::fmt;
  detail::PlotFrame f;
  f.xmax = s.max() * 1.05;
  auto out = detail::open_for_write(path);
  detail::svg_open(out, f, title, "t (days)", "S(t)");

  const auto t = s.sorted();
  const double n = static_cast<double>(t.size());
  out << "<path class=\"empirical-survival\" fill=\"none\" stroke=\"black\" d=\"M" << fmt(f.px(0)) << ','
      << fmt(f.py(1));
  std::size_t i = 0;
  while (i < t.size()) {
    std::size_t j = i;
    while (j < t.size() && t[j] == t[i]) ++j;
    out << " H" << fmt(f.px(t[i])) << " V" << fmt(f.py(1.0 - static_cast<double>(j) / n));
    i = j;
  }
  out << " H" << fmt(f.px(f.xmax)) << "\"/>\n";

  constexpr int kGrid = 200;
  for (std::size_t k = 0; k < overlays.size(); ++k) {
    const auto& [family, params] = overlays[k];
    const double upper = std::visit([](const auto& q) { return support_upper(q); }, params);
    out << "<polyline class=\"fitted-survival\" data-family=\"" << family_name(family)
        << "\" fill=\"none\" stroke=\"" << detail::family_color(family) << "\" points=\"";
    for (int g = 0; g <= kGrid; ++g) {
      const double x = f.xmax * g / kGrid;
      const double y = x <= 0.0 ? 1.0 : (x >= upper ? 0.0 : survival(params, x));
      if (g) out << ' ';
      out << fmt(f.px(x)) << ',' << fmt(f.py(y));
    }
    out << "\"/>\n";
    const double ly = f.top + 16.0 * static_cast<double>(k + 1);
    out << "<text class=\"legend\" x=\"" << fmt(f.width - f.right - 60) << "\" y=\"" << fmt(ly) << "\" fill=\""
        << detail::family_color(family) << "\">" << family_name(family) << "</text>\n";
  }
  out << "</svg>\n";
  detail::finish_write(out, path);
}

}  // namespace wfit
