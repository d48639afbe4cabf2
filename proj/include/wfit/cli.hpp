#pragma once

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wfit/data_io.hpp"
#include "wfit/datasets.hpp"
#include "wfit/distributions.hpp"
#include "wfit/errors.hpp"
#include "wfit/estimation.hpp"
#include "wfit/model_selection.hpp"
#include "wfit/prediction.hpp"
#include "wfit/resampling.hpp"

namespace wfit::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kInputError = 2,
  kConvergenceError = 3,
  kNoAdmissibleModel = 4,
  kUsage = 64,
};

struct CliConfig {
  std::string subcommand;
  std::string dataset;
  bool header = false;
  std::string families = "all";
  double u = 0.25;
  OptimizerConfig optimizer;
  int replicates = 1000;
  std::optional<std::uint64_t> seed;
  double level = 0.95;
  unsigned threads = 0;
  std::string output;
  std::string format = "json";
  std::string out_dir = ".";
  std::string plot;
  bool quiet = false;
  bool verbose = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<Family> parse_family_list(const std::string& spec) {
  if (spec == "all") return {kAllFamilies.begin(), kAllFamilies.end()};
  std::vector<Family> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    Family f;
    try {
      f = parse_family(item);
    } catch (const std::exception&) {
      throw UsageError("unknown family '" + item + "' (expected gg, gw, ew, mow, epw or all)");
    }
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  }
  if (out.empty()) throw UsageError("at least one family must be selected");
  return out;
}

struct Loaded {
  Sample sample;
  std::string source;
  std::string stem;
};

inline Loaded load_dataset(const CliConfig& c) {
  if (const auto id = parse_dataset_id(c.dataset)) {
    return {load_embedded(*id), std::string(dataset_name(*id)), std::string(dataset_name(*id))};
  }
  const std::filesystem::path p(c.dataset);
  if (!std::filesystem::is_regular_file(p)) {
    throw IoError("dataset '" + c.dataset + "' is neither an embedded dataset nor a readable file");
  }
  return {load_csv(p, CsvOptions{c.header}), p.string(), p.stem().string()};
}

inline Json config_echo(const CliConfig& c, const std::vector<Family>& families) {
  Json fams = Json::array();
  for (auto f : families) fams.push_back(family_name(f));
  Json j{{"subcommand", c.subcommand},
         {"dataset", c.dataset},
         {"header", c.header},
         {"families", std::move(fams)},
         {"u", c.u},
         {"optimizer",
          Json{{"max_iter", c.optimizer.max_iter},
               {"tol", c.optimizer.tol},
               {"starts", c.optimizer.n_starts},
               {"seed", c.optimizer.seed}}}};
  if (c.subcommand == "predict") {
    j["bootstrap"] = Json{{"replicates", c.replicates}, {"seed", c.seed.value_or(0)}, {"level", c.level}};
  }
  return j;
}

inline std::string fixed(double x, int digits = 4) {
  if (std::isnan(x)) return "-";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

inline std::string padded(std::string s, std::size_t w) {
  if (s.size() < w) s.insert(0, w - s.size(), ' ');
  return s;
}

inline void print_fit_table(std::ostream& out, const FitResult& f, const GofResult& g) {
  out << family_name(f.family) << "  n=" << f.n << "  log-likelihood " << fixed(f.loglik)
      << "  AIC " << fixed(g.aic, 3) << "  AICc " << fixed(g.aicc, 3) << "  KS p " << fixed(g.ks_pvalue)
      << (f.converged ? "" : "  [not converged]") << (f.at_search_boundary ? "  [boundary]" : "") << '\n';
  out << padded("parameter", 10) << padded("MLE", 14) << padded("SE", 14) << padded("95% CI", 30) << '\n';
  const auto names = param_names(f.family);
  const auto v = param_values(f.params);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& ci = f.wald_ci_95[i];
    const std::string ci_text =
        std::isnan(ci.lower) ? "-" : "(" + fixed(ci.lower) + ", " + fixed(ci.upper) + ")";
    out << padded(std::string(names[i]), 10) << padded(fixed(v[i]), 14) << padded(fixed(f.std_errors[i]), 14)
        << padded(ci_text, 30) << '\n';
  }
}

inline void print_selection_table(std::ostream& out, const std::vector<GofResult>& ranked,
                                  std::optional<Family> best) {
  out << padded("family", 7) << padded("loglik", 12) << padded("AIC", 11) << padded("AICc", 11)
      << padded("KS D", 9) << padded("KS p", 9) << padded("admissible", 12) << '\n';
  for (const auto& g : ranked) {
    const bool win = best && *best == g.family;
    out << padded(std::string(family_name(g.family)), 7) << padded(fixed(g.loglik, 3), 12)
        << padded(fixed(g.aic, 3), 11) << padded(fixed(g.aicc, 3), 11) << padded(fixed(g.ks_stat), 9)
        << padded(fixed(g.ks_pvalue), 9) << padded(g.admissible() ? "yes" : "no (x)", 12)
        << (win ? "  * selected" : "") << (g.converged ? "" : "  [not converged]") << '\n';
  }
}

inline void emit_report(const CliConfig& c, const Report& r) {
  if (c.output.empty()) return;
  write_report(r, c.output, c.format == "csv" ? ReportFormat::CsvBundle : ReportFormat::Json);
}

inline Report base_report(const CliConfig& c, const Loaded& d, const std::vector<Family>& families) {
  Report r;
  r.generated_at = report_timestamp();
  r.command = c.subcommand;
  r.config = config_echo(c, families);
  r.seed = c.seed.value_or(c.optimizer.seed);
  r.input = InputSummary::of(d.sample, d.source);
  return r;
}

struct FitAll {
  std::vector<FamilyEntry> entries;
  bool all_converged = true;
};

inline FitAll fit_families(const CliConfig& c, const Sample& s, const std::vector<Family>& families,
                           std::ostream& err) {
  FitAll out;
  for (auto f : families) {
    FitResult fit = fit_mle(f, s, c.optimizer);
    GofResult g = goodness_of_fit(fit, s);
    if (!fit.converged) {
      out.all_converged = false;
      err << "warning: " << family_name(f) << " fit did not converge: " << fit.diagnostics << '\n';
    } else if (c.verbose) {
      err << family_name(f) << ": " << fit.diagnostics << " (" << fit.evaluations << " evaluations, "
          << fit.n_restarts_used << " restarts)\n";
    }
    out.entries.push_back({std::move(fit), g});
  }
  return out;
}

inline void maybe_plot(const CliConfig& c, const Sample& s, const std::vector<FamilyEntry>& entries) {
  if (c.plot.empty()) return;
  std::vector<std::pair<Family, Params>> overlays;
  for (const auto& e : entries) {
    if (e.gof && e.gof->admissible()) overlays.emplace_back(e.fit.family, e.fit.params);
  }
  write_survival_plot(s, overlays, c.plot);
}

inline int cmd_ttt(const CliConfig& c, std::ostream& out) {
  const auto d = load_dataset(c);
  const auto curve = ttt_transform(d.sample);
  const auto shape = diagnose_hazard_shape(curve);
  const std::filesystem::path dir(c.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
  const auto csv = dir / (d.stem + "_ttt.csv");
  const auto svg = dir / (d.stem + "_ttt.svg");
  write_ttt_csv(curve, csv);
  write_ttt_plot(curve, svg, "TTT plot: " + d.source);

  Report r = base_report(c, d, {});
  r.ttt = curve;
  r.hazard_shape = std::string(hazard_shape_label(shape));
  emit_report(c, r);
  if (!c.quiet) {
    out << d.source << ": n=" << d.sample.size() << '\n'
        << "TTT shape: " << hazard_shape_label(shape) << " (" << hazard_shape_meaning(shape) << ")\n"
        << "wrote " << csv.string() << '\n'
        << "wrote " << svg.string() << '\n';
  }
  return kOk;
}

inline int cmd_fit(const CliConfig& c, std::ostream& out, std::ostream& err) {
  const auto families = parse_family_list(c.families);
  const auto d = load_dataset(c);
  auto fits = fit_families(c, d.sample, families, err);
  if (!c.quiet) {
    for (const auto& e : fits.entries) {
      print_fit_table(out, e.fit, *e.gof);
      out << '\n';
    }
  }
  Report r = base_report(c, d, families);
  r.fits = fits.entries;
  emit_report(c, r);
  maybe_plot(c, d.sample, fits.entries);
  return fits.all_converged ? kOk : kConvergenceError;
}

struct Selected {
  Loaded data;
  std::vector<Family> families;
  FitAll fits;
  SelectionReport selection;
};

inline Selected run_selection(const CliConfig& c, std::ostream& out, std::ostream& err, Report& r) {
  const auto families = parse_family_list(c.families);
  auto d = load_dataset(c);
  auto fits = fit_families(c, d.sample, families, err);
  std::vector<GofResult> gofs;
  for (const auto& e : fits.entries) gofs.push_back(*e.gof);
  r = base_report(c, d, families);
  r.fits = fits.entries;
  try {
    auto sel = select_best(gofs);
    if (!c.quiet) print_selection_table(out, sel.results, sel.best);
    r.selection = sel;
    return {std::move(d), families, std::move(fits), std::move(sel)};
  } catch (const NoAdmissibleModelError&) {
    std::sort(gofs.begin(), gofs.end(), [](const GofResult& a, const GofResult& b) { return a.aicc < b.aicc; });
    if (!c.quiet) print_selection_table(out, gofs, std::nullopt);
    emit_report(c, r);
    throw;
  }
}

inline int cmd_select(const CliConfig& c, std::ostream& out, std::ostream& err) {
  Report r;
  const auto sel = run_selection(c, out, err, r);
  if (!c.quiet) out << "selected: " << family_name(sel.selection.best) << '\n';
  emit_report(c, r);
  maybe_plot(c, sel.data.sample, sel.fits.entries);
  return kOk;
}

inline int cmd_predict(const CliConfig& c, std::ostream& out, std::ostream& err) {
  Report r;
  const auto sel = run_selection(c, out, err, r);
  const auto& winner = std::find_if(sel.fits.entries.begin(), sel.fits.entries.end(), [&](const FamilyEntry& e) {
                         return e.fit.family == sel.selection.best;
                       })->fit;
  BootstrapConfig bc;
  bc.replicates = c.replicates;
  bc.seed = *c.seed;
  bc.level = c.level;
  bc.u = c.u;
  bc.threads = c.threads;
  const auto boot = bootstrap_fit(winner.family, sel.data.sample, bc, winner);
  const auto plan = predict_maintenance(winner, c.u, boot);
  r.bootstrap = boot;
  r.plan = plan;
  if (!c.quiet) {
    out << "selected: " << family_name(plan.family) << "  u=" << plan.u << "  y*=" << fixed(plan.y_star)
        << "  bootstrap " << boot.effective << "/" << boot.replicates << " replicates, seed " << boot.seed << '\n'
        << plan.recommendation() << '\n';
  }
  emit_report(c, r);
  maybe_plot(c, sel.data.sample, sel.fits.entries);
  return kOk;
}

/// Entry point shared by the executable and the tests. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Lifetime distribution fitting and preventive-maintenance planning", "wfit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  CliConfig c;
  std::uint64_t seed_value = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-d,--dataset", c.dataset, "embedded dataset id or path to a CSV file")->required();
    sub->add_flag("--header", c.header, "CSV input has a header row");
    sub->add_flag("-q,--quiet", c.quiet, "suppress tables on stdout");
    sub->add_flag("-v,--verbose", c.verbose, "print fit diagnostics on stderr");
    sub->add_option("-o,--output", c.output, "write a machine-readable report to this path");
    sub->add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_fitting = [&](CLI::App* sub) {
    sub->add_option("-f,--families", c.families, "comma-separated families (gg,gw,ew,mow,epw) or all");
    sub->add_option("--max-iter", c.optimizer.max_iter, "Nelder-Mead iteration limit")->check(CLI::PositiveNumber);
    sub->add_option("--tol", c.optimizer.tol, "simplex convergence tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--starts", c.optimizer.n_starts, "optimizer starting points")->check(CLI::PositiveNumber);
    sub->add_option("--opt-seed", c.optimizer.seed, "seed for jittered starting points");
    sub->add_option("--plot", c.plot, "write an SVG of empirical and fitted survival");
  };

  auto* ttt = app.add_subcommand("ttt", "TTT transform, plot and hazard-shape diagnosis");
  add_common(ttt);
  ttt->add_option("--out-dir", c.out_dir, "directory for the TTT CSV and SVG");

  auto* fit = app.add_subcommand("fit", "maximum-likelihood fits with standard errors");
  add_common(fit);
  add_fitting(fit);

  auto* select = app.add_subcommand("select", "compare families by AIC, AICc and KS");
  add_common(select);
  add_fitting(select);

  auto* predict = app.add_subcommand("predict", "select, bootstrap and recommend a maintenance interval");
  add_common(predict);
  add_fitting(predict);
  predict->add_option("-u,--u", c.u, "quantile level of the predictive value")->check(CLI::Range(0.0, 1.0));
  predict->add_option("-B,--replicates", c.replicates, "bootstrap replicates")->check(CLI::Range(100, 1000000));
  auto* seed_opt = predict->add_option("-s,--seed", seed_value, "bootstrap seed");
  predict->add_option("--level", c.level, "confidence level")->check(CLI::Range(0.0, 1.0));
  predict->add_option("--threads", c.threads, "worker threads for the bootstrap (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (ttt->parsed()) c.subcommand = "ttt";
    if (fit->parsed()) c.subcommand = "fit";
    if (select->parsed()) c.subcommand = "select";
    if (predict->parsed()) c.subcommand = "predict";
    if (!(c.u > 0.0 && c.u < 1.0)) throw UsageError("--u must lie strictly between 0 and 1");
    if (!(c.level > 0.0 && c.level < 1.0)) throw UsageError("--level must lie strictly between 0 and 1");
    if (c.subcommand == "predict") {
      if (*seed_opt) {
        c.seed = seed_value;
      } else if (test_mode()) {
        throw UsageError("--seed is required when WFIT_TEST_MODE is set");
      } else {
        c.seed = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
      }
    }
    if (c.subcommand != "ttt") parse_family_list(c.families);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (c.subcommand == "ttt") return cmd_ttt(c, out);
    if (c.subcommand == "fit") return cmd_fit(c, out, err);
    if (c.subcommand == "select") return cmd_select(c, out, err);
    return cmd_predict(c, out, err);
  } catch (const NoAdmissibleModelError& e) {
    err << "error: " << e.what() << '\n';
    return kNoAdmissibleModel;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kConvergenceError;
  } catch (const ParseError& e) {
    err << "input error: " << c.dataset << ": " << e.what() << '\n';
    return kInputError;
  } catch (const IoError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const EmptyInputError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const DegenerateSampleError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace wfit::cli
