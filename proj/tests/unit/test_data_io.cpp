#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <unistd.h>

#include "wfit/data_io.hpp"
#include "wfit/datasets.hpp"

using namespace wfit;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("wfit_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::vector<double> vec(const Sample& s) { return {s.values().begin(), s.values().end()}; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::size_t count_matches(const std::string& text, const std::string& pattern) {
  const std::regex re(pattern);
  return static_cast<std::size_t>(std::distance(std::sregex_iterator(text.begin(), text.end(), re), {}));
}

// Hand-built report with fixed numbers, independent of the optimizer.
Report fixture_report() {
  Report r;
  r.generated_at = "1970-01-01T00:00:00Z";
  r.command = "predict";
  r.config = Json{{"dataset", "fixture"}, {"u", 0.25}, {"replicates", 100}};
  r.seed = 42;
  const Sample s(std::vector<double>{1.0, 2.0, 4.0, 8.0});
  r.input = InputSummary::of(s, "fixture");
  r.ttt = ttt_transform(s);
  r.hazard_shape = std::string(hazard_shape_label(HazardShape::Decreasing));

  FitResult ew;
  ew.family = Family::EW;
  ew.params = EWParams{3.5, 0.75, 1.25};
  ew.loglik = -10.5;
  ew.score_residual = 1e-7;
  ew.observed_info << 2.0, 0.5, 0.25, 0.5, 3.0, 0.125, 0.25, 0.125, 4.0;
  ew.std_errors = {0.75, 0.5, std::numeric_limits<double>::quiet_NaN()};
  ew.wald_ci_95 = {Interval{2.0, 5.0}, Interval{0.1, 1.4}, Interval{}};
  ew.converged = true;
  ew.optimizer_converged = true;
  ew.n_restarts_used = 8;
  ew.evaluations = 1234;
  ew.n = 4;
  ew.diagnostics = "ok";

  FitResult gw = ew;
  gw.family = Family::GW;
  gw.params = GWParams{-0.5, 3.0, 1.5};
  gw.loglik = -11.0;
  gw.converged = false;
  gw.at_search_boundary = true;
  gw.score_residual = std::numeric_limits<double>::infinity();
  gw.diagnostics = "score check failed";

  GofResult g_ew;
  g_ew.family = Family::EW;
  g_ew.loglik = -10.5;
  g_ew.ks_stat = 0.25;
  g_ew.ks_pvalue = 0.5;
  g_ew.aic = 27.0;
  g_ew.aicc = 51.0;
  g_ew.n = 4;
  g_ew.converged = true;
  GofResult g_gw = g_ew;
  g_gw.family = Family::GW;
  g_gw.aic = 28.0;
  g_gw.aicc = 52.0;
  g_gw.ks_pvalue = 0.01;
  g_gw.converged = false;

  r.fits = {{ew, g_ew}, {gw, g_gw}};
  r.selection = select_best({g_gw, g_ew});

  BootstrapResult b;
  b.family = Family::EW;
  b.replicates = 100;
  b.effective = 97;
  b.failed = 3;
  b.seed = 42;
  b.statistics = {{"sigma", 3.5, {2.5, 4.5}, 0.5},
                  {"phi", 0.75, {0.5, 1.5}, 0.25},
                  {"alpha", 1.25, {1.0, 2.0}, 0.125},
                  {"y_star", 2.0, {1.5, 2.75}, 0.375}};
  r.bootstrap = b;

  MaintenancePlan p;
  p.family = Family::EW;
  p.params = ew.params;
  p.u = 0.25;
  p.y_star = 2.0;
  p.ci = {1.5, 2.75};
  p.replicates = 100;
  p.effective_replicates = 97;
  p.seed = 42;
  r.plan = p;
  return r;
}

fs::path golden_dir() {
  if (const char* d = std::getenv("WFIT_GOLDEN_DIR")) return d;
#ifdef WFIT_GOLDEN_DIR
  return WFIT_GOLDEN_DIR;
#else
  return "tests/golden";
#endif
}

}  // namespace

// ---- Embedded datasets ---------------------------------------------------------

TEST(Datasets, CountsAndExtremes) {
  const auto a = load_embedded(DatasetId::PrickerA);
  EXPECT_EQ(a.size(), 48u);
  EXPECT_EQ(a.min(), 1.0);
  EXPECT_EQ(a.max(), 53.0);
  EXPECT_EQ(load_embedded(DatasetId::PrickerB).size(), 59u);
  EXPECT_EQ(load_embedded(DatasetId::TransmissionA).size(), 53u);
  const auto tb = load_embedded(DatasetId::TransmissionB);
  EXPECT_EQ(tb.size(), 25u);
  EXPECT_EQ(tb.max(), 61.0);
}

TEST(Datasets, ChecksumsMatchCommittedConstants) {
  EXPECT_EQ(dataset_checksum(embedded_values(DatasetId::PrickerA)), 0x7a2edfb44119b827ULL);
  EXPECT_EQ(dataset_checksum(embedded_values(DatasetId::PrickerB)), 0xedca32fbeb39d50fULL);
  EXPECT_EQ(dataset_checksum(embedded_values(DatasetId::TransmissionA)), 0x4e9b42f1d2717129ULL);
  EXPECT_EQ(dataset_checksum(embedded_values(DatasetId::TransmissionB)), 0xed953fbed0dc0e7fULL);
}

TEST(Datasets, NamesRoundTrip) {
  for (auto id : kAllDatasets) EXPECT_EQ(parse_dataset_id(dataset_name(id)), id);
  EXPECT_FALSE(parse_dataset_id("pricker_c").has_value());
}

// ---- CSV -------------------------------------------------------------------------

TEST(Csv, ParsesOneValuePerLine) {
  std::istringstream in("1\n2\n3\n");
  const auto s = parse_csv(in);
  EXPECT_EQ(vec(s), (std::vector<double>{1.0, 2.0, 3.0}));
}

TEST(Csv, ToleratesBlankLinesWhitespaceAndCrlf) {
  std::istringstream in("\n  4.5 \r\n\n7\r\n");
  EXPECT_EQ(vec(parse_csv(in)), (std::vector<double>{4.5, 7.0}));
}

TEST(Csv, ZeroIsRejectedWithLineNumber) {
  std::istringstream in("1\n0\n3\n");
  try {
    parse_csv(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 1u);
    EXPECT_EQ(e.token(), "0");
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Csv, NonNumericTokenReportsColumn) {
  std::istringstream in("5\n  abc\n");
  try {
    parse_csv(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 3u);
    EXPECT_EQ(e.token(), "abc");
  }
  std::istringstream neg("-2\n");
  EXPECT_THROW(parse_csv(neg), ParseError);
  std::istringstream inf("inf\n");
  EXPECT_THROW(parse_csv(inf), ParseError);
}

TEST(Csv, HeaderSkippedOnlyWhenRequested) {
  std::istringstream a("days\n3\n9\n");
  EXPECT_EQ(vec(parse_csv(a, CsvOptions{.header = true})), (std::vector<double>{3.0, 9.0}));
  std::istringstream b("days\n3\n9\n");
  EXPECT_THROW(parse_csv(b), ParseError);
}

TEST(Csv, EmptyInputIsAnError) {
  std::istringstream empty("");
  EXPECT_THROW(parse_csv(empty), EmptyInputError);
  std::istringstream header_only("days\n");
  EXPECT_THROW(parse_csv(header_only, CsvOptions{.header = true}), EmptyInputError);
  TempDir dir;
  spit(dir.path() / "empty.csv", "");
  EXPECT_THROW(load_csv(dir.path() / "empty.csv"), EmptyInputError);
  EXPECT_THROW(load_csv(dir.path() / "missing.csv"), IoError);
}

TEST(Csv, WriteThenLoadRoundTripsExactly) {
  TempDir dir;
  for (auto id : kAllDatasets) {
    const auto s = load_embedded(id).scaled(1.0 / 3.0);
    write_csv(s, dir.path() / "s.csv");
    EXPECT_EQ(vec(load_csv(dir.path() / "s.csv")), vec(s));
  }
}

TEST(Csv, TttFileHasHeaderAndOneRowPerPoint) {
  TempDir dir;
  const auto curve = ttt_transform(load_embedded(DatasetId::PrickerA));
  write_ttt_csv(curve, dir.path() / "ttt.csv");
  std::istringstream in(slurp(dir.path() / "ttt.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "r_over_n,G");
  std::size_t rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  EXPECT_EQ(rows, 48u);
  EXPECT_EQ(last, "1,1");
}

// ---- Report ------------------------------------------------------------------------

TEST(Report, JsonRoundTripIsStructurallyEqual) {
  TempDir dir;
  const auto r = fixture_report();
  write_report(r, dir.path() / "r.json", ReportFormat::Json);
  const auto back = read_report(dir.path() / "r.json");
  EXPECT_EQ(to_json(back), to_json(r));
  EXPECT_TRUE(std::isnan(back.fits[0].fit.std_errors[2]));
  EXPECT_TRUE(std::isinf(back.fits[1].fit.score_residual));
  EXPECT_EQ(back.selection->best, Family::EW);
  EXPECT_EQ(back.plan->seed, 42u);
}

TEST(Report, KeyOrderIsStable) {
  const auto j = to_json(fixture_report());
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  const std::vector<std::string> expected{"schema_version", "tool",  "tool_version", "generated_at", "command",
                                          "config",         "seed",  "input",        "ttt",          "fits",
                                          "selection",      "bootstrap", "plan"};
  EXPECT_EQ(keys, expected);
}

TEST(Report, RejectsOtherSchemaVersions) {
  auto j = to_json(fixture_report());
  j["schema_version"] = 2;
  EXPECT_THROW(report_from_json(j), ParseError);
}

TEST(Report, MatchesGoldenBytes) {
  TempDir dir;
  write_report_json(fixture_report(), dir.path() / "r.json");
  const auto golden = golden_dir() / "report_fixture.json";
  if (std::getenv("WFIT_UPDATE_GOLDEN")) fs::copy_file(dir.path() / "r.json", golden, fs::copy_options::overwrite_existing);
  ASSERT_TRUE(fs::exists(golden)) << golden;
  EXPECT_EQ(slurp(dir.path() / "r.json"), slurp(golden));
}

TEST(Report, CsvBundleSchemas) {
  TempDir dir;
  write_report(fixture_report(), dir.path() / "bundle", ReportFormat::CsvBundle);
  for (const char* name : {"ttt.csv", "fits.csv", "selection.csv", "plan.csv"}) {
    EXPECT_TRUE(fs::exists(dir.path() / "bundle" / name)) << name;
  }
  std::istringstream sel(slurp(dir.path() / "bundle" / "selection.csv"));
  std::string line;
  std::getline(sel, line);
  EXPECT_EQ(line, "family,aic,aicc,ks_d,ks_p,admissible");
  std::vector<std::string> rows;
  while (std::getline(sel, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].substr(0, 3), "EW,");
  EXPECT_EQ(rows[0].substr(rows[0].size() - 4), "true");
  EXPECT_EQ(rows[1].substr(rows[1].size() - 5), "false");

  std::istringstream fits(slurp(dir.path() / "bundle" / "fits.csv"));
  std::getline(fits, line);
  EXPECT_EQ(line, "family,parameter,estimate,std_error,ci_lower,ci_upper,loglik,converged");
  std::size_t fit_rows = 0;
  while (std::getline(fits, line)) ++fit_rows;
  EXPECT_EQ(fit_rows, 6u);

  std::istringstream plan(slurp(dir.path() / "bundle" / "plan.csv"));
  std::getline(plan, line);
  EXPECT_EQ(line, "family,u,y_star,ci_lower,ci_upper,level,rounded_days,replicates,effective_replicates,seed");
}

TEST(Report, WriteToUnwritablePathCarriesPathContext) {
  const fs::path bad = "/nonexistent-dir/for/sure/r.json";
  try {
    write_report_json(fixture_report(), bad);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(bad.string()), std::string::npos);
  }
}

// ---- Plots ---------------------------------------------------------------------------

TEST(Plots, TttPlotHasAllPointsAndDiagonal) {
  TempDir dir;
  write_ttt_plot(ttt_transform(load_embedded(DatasetId::PrickerA)), dir.path() / "ttt.svg");
  const auto svg = slurp(dir.path() / "ttt.svg");
  EXPECT_EQ(count_matches(svg, "<line class=\"diagonal\""), 1u);
  EXPECT_EQ(count_matches(svg, "<polyline class=\"ttt-curve\" data-n=\"48\""), 1u);
  const std::smatch m = [&] {
    std::smatch mm;
    std::regex_search(svg, mm, std::regex("class=\"ttt-curve\"[^>]*points=\"([^\"]*)\""));
    return mm;
  }();
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(count_matches(m[1].str(), "[0-9.]+,[0-9.]+"), 48u);
}

TEST(Plots, SurvivalOverlayCountsCurves) {
  TempDir dir;
  const auto s = load_embedded(DatasetId::PrickerA);
  std::vector<std::pair<Family, Params>> overlays{
      {Family::GG, GGParams{2.0, 0.5, 0.6}},   {Family::GW, GWParams{0.2, 5.0, 1.2}},
      {Family::EW, EWParams{0.727, 6.446, 0.379}}, {Family::MOW, MOWParams{0.2, 0.5, 0.9}},
      {Family::EPW, EPWParams{-0.5, 1.0, 0.05}}};
  write_survival_plot(s, overlays, dir.path() / "surv.svg");
  const auto svg = slurp(dir.path() / "surv.svg");
  EXPECT_EQ(count_matches(svg, "class=\"fitted-survival\""), 5u);
  EXPECT_EQ(count_matches(svg, "class=\"empirical-survival\""), 1u);
  EXPECT_EQ(count_matches(svg, "class=\"legend\""), 5u);
  for (const char* f : {"GG", "GW", "EW", "MOW", "EPW"}) {
    EXPECT_EQ(count_matches(svg, std::string("data-family=\"") + f + "\""), 1u) << f;
  }
}

TEST(Plots, EmptyOverlayIsAnError) {
  TempDir dir;
  EXPECT_THROW(write_survival_plot(load_embedded(DatasetId::PrickerA), {}, dir.path() / "s.svg"), ParameterError);
  EXPECT_FALSE(fs::exists(dir.path() / "s.svg"));
}
