#include "robscatter/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "robscatter/bench.hpp"
#include "robscatter/csv.hpp"
#include "robscatter/detmcd.hpp"
#include "robscatter/errors.hpp"
#include "robscatter/fastmcd.hpp"
#include "robscatter/mrcd.hpp"
#include "robscatter/reweight.hpp"
#include "robscatter/univariate.hpp"

namespace robscatter::cli {
namespace {

using nlohmann::json;

struct CliConfig {
  std::string input;
  std::string estimator = "fastmcd";
  std::optional<double> alpha;
  std::optional<long long> h;
  std::uint64_t seed = 0;
  bool no_reweight = false;
  std::optional<double> rho;
  std::string target = "identity";
  std::string format = "json";
  std::string output;
  int starts = 500;
  // bench
  std::string suite = "all";
  long long bench_p = 2;
  long long bench_n = 1000;
  int reps = 500;
  int trials = 200;
};

struct Fitted {
  LocationScatter raw;
  LocationScatter final;
  std::optional<MrcdResult> mrcd;
  std::vector<std::string> warnings;
};

Index resolve_h(const DataMatrix& x, const CliConfig& cfg) {
  const Index n = x.n();
  const Index p = x.p();
  if (cfg.h) {
    const auto h = static_cast<Index>(*cfg.h);
    const Index lower = cfg.estimator == "mrcd" ? 1 : p;
    if (h <= lower || h > n) {
      throw ConfigError("--h must satisfy " + std::to_string(lower) + " < h <= n = " +
                        std::to_string(n));
    }
    return h;
  }
  if (cfg.alpha) {
    if (!(*cfg.alpha >= 0.5 && *cfg.alpha <= 1.0)) {
      throw ConfigError("--alpha must lie in [0.5, 1]");
    }
    if (cfg.estimator == "mrcd") {
      return std::clamp<Index>(static_cast<Index>(std::ceil(*cfg.alpha * n - 1e-9)), 2, n);
    }
    return h_from_alpha(n, p, *cfg.alpha);
  }
  if (cfg.estimator == "mrcd") return std::max<Index>(2, (3 * n + 3) / 4);
  return default_h(n, p);
}

Fitted fit_estimator(const DataMatrix& x, const CliConfig& cfg) {
  Fitted f;
  const std::string& e = cfg.estimator;
  if (e == "classical") {
    f.raw = classical_estimate(x);
    f.final = f.raw;
    return f;
  }
  const Index h = resolve_h(x, cfg);
  if (e == "fastmcd") {
    FastMcdConfig fc;
    fc.h = h;
    fc.seed = cfg.seed;
    fc.n_starts = cfg.starts;
    fc.n_keep = std::min(fc.n_keep, cfg.starts);
    f.raw = fast_mcd(x, fc);
  } else if (e == "detmcd" && x.p() == 1) {
    f.raw = uni_mcd_estimate(x, h);
    f.warnings.push_back("p = 1: detmcd uses the exact univariate MCD");
  } else if (e == "detmcd") {
    f.raw = det_mcd(x, h);
  } else if (e == "unimcd") {
    f.raw = uni_mcd_estimate(x, h);
  } else if (e == "mrcd") {
    MrcdConfig mc;
    mc.h = h;
    mc.rho = cfg.rho;
    mc.target = cfg.target == "equicorr" ? TargetKind::Equicorrelation : TargetKind::Identity;
    f.mrcd = mrcd(x, mc);
    f.raw = f.mrcd->as_location_scatter();
  } else {
    throw ConfigError("unknown estimator '" + e + "'");
  }
  f.final = f.raw;
  if (cfg.no_reweight) return f;
  if (f.raw.exact_fit) {
    f.warnings.push_back("exact fit: reweighting skipped");
    return f;
  }
  if (e == "mrcd" && x.n() <= x.p()) {
    f.warnings.push_back("n <= p: reweighting skipped for mrcd");
    return f;
  }
  f.final = reweight(x, f.raw);
  return f;
}

json to_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Matrix& m) {
  json a = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(std::move(row));
  }
  return a;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void emit_fit(const DataMatrix& x, const CliConfig& cfg, const Fitted& f, std::ostream& out) {
  const LocationScatter& est = f.final;
  // flags follow the weights, which come from the raw estimate
  std::vector<bool> flags;
  if (!f.raw.exact_fit) flags = outlier_report(x, f.raw).flagged;
  const Matrix corr = robust_correlation(est.scatter);
  if (cfg.format == "csv") {
    const Index p = x.p();
    std::vector<std::string> header{"variable", "center"};
    for (Index j = 1; j <= p; ++j) header.push_back("scatter_" + std::to_string(j));
    for (Index j = 1; j <= p; ++j) header.push_back("correlation_" + std::to_string(j));
    for (const char* s : {"h", "alpha", "log_det", "c0", "c1"}) header.emplace_back(s);
    write_csv_header(out, header);
    for (Index i = 0; i < p; ++i) {
      std::vector<double> row{static_cast<double>(i + 1), est.center(i)};
      for (Index j = 0; j < p; ++j) row.push_back(est.scatter(i, j));
      for (Index j = 0; j < p; ++j) row.push_back(corr(i, j));
      row.insert(row.end(), {static_cast<double>(est.h), est.alpha, est.log_det, est.c0, est.c1});
      write_csv_row(out, row);
    }
    return;
  }
  json j;
  j["estimator"] = cfg.estimator;
  j["kind"] = to_string(est.kind);
  j["n"] = x.n();
  j["p"] = x.p();
  if (!x.column_names().empty()) j["columns"] = x.column_names();
  j["center"] = to_json(est.center);
  j["scatter"] = to_json(est.scatter);
  j["robust_correlation"] = to_json(corr);
  j["h"] = est.h;
  j["alpha"] = est.alpha;
  j["log_det"] = number_or_null(est.log_det);
  j["c0"] = est.c0;
  j["c1"] = est.c1;
  j["flags"] = flags;
  j["exact_fit"] = est.exact_fit;
  if (f.mrcd) {
    j["rho"] = f.mrcd->rho_used;
    j["target"] = cfg.target;
  }
  std::vector<std::string> warnings = est.warnings;
  warnings.insert(warnings.end(), f.warnings.begin(), f.warnings.end());
  j["warnings"] = warnings;
  out << j.dump(2) << '\n';
}

void emit_flag(const DataMatrix& x, const CliConfig& cfg, const Fitted& f, std::ostream& out) {
  const OutlierReport r = outlier_report(x, f.raw);
  if (cfg.format == "csv") {
    write_csv_header(out, {"index", "md", "rd", "weight", "flagged", "cutoff"});
    for (Index i = 0; i < x.n(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      write_csv_row(out, {static_cast<double>(i), r.md(i), r.rd(i),
                          static_cast<double>(r.weight[k]), r.flagged[k] ? 1.0 : 0.0, r.cutoff});
    }
    return;
  }
  json j;
  j["estimator"] = cfg.estimator;
  j["kind"] = to_string(r.kind);
  j["h"] = r.h;
  j["alpha"] = r.alpha;
  j["cutoff"] = r.cutoff;
  j["flagged_count"] = r.flagged_count();
  json rows = json::array();
  for (Index i = 0; i < x.n(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    rows.push_back({{"index", i},
                    {"md", number_or_null(r.md(i))},
                    {"rd", r.rd(i)},
                    {"weight", r.weight[k]},
                    {"flagged", static_cast<bool>(r.flagged[k])}});
  }
  j["rows"] = std::move(rows);
  out << j.dump(2) << '\n';
}

void emit_ddplot(const DataMatrix& x, const CliConfig& cfg, const Fitted& f, std::ostream& out) {
  const DdPlotData d = dd_plot_data(x, f.final);
  if (cfg.format == "csv") {
    write_csv_header(out, {"index", "md", "rd", "cutoff"});
    for (Index i = 0; i < x.n(); ++i) {
      write_csv_row(out, {static_cast<double>(i), d.md(i), d.rd(i), d.cutoff});
    }
    return;
  }
  json j;
  j["cutoff"] = d.cutoff;
  j["md"] = to_json(d.md);
  j["rd"] = to_json(d.rd);
  out << j.dump(2) << '\n';
}

void emit_ellipse(const DataMatrix& x, const CliConfig& cfg, const Fitted& f, std::ostream& out) {
  if (x.p() != 2) throw ConfigError("ellipse requires exactly two columns");
  const LocationScatter classical = classical_estimate(x);
  const double radius = distance_cutoff(2);
  if (cfg.format == "csv") {
    // kind 0: classical, 1: robust
    write_csv_header(out, {"kind", "center_1", "center_2", "s11", "s12", "s22", "radius"});
    for (const auto* e : {&classical, &f.final}) {
      write_csv_row(out, {e == &classical ? 0.0 : 1.0, e->center(0), e->center(1),
                          e->scatter(0, 0), e->scatter(0, 1), e->scatter(1, 1), radius});
    }
    return;
  }
  json j;
  j["radius"] = radius;
  j["classical"] = {{"center", to_json(classical.center)}, {"scatter", to_json(classical.scatter)}};
  j["robust"] = {{"center", to_json(f.final.center)},
                 {"scatter", to_json(f.final.scatter)},
                 {"kind", to_string(f.final.kind)}};
  out << j.dump(2) << '\n';
}

void emit_bench(const CliConfig& cfg, std::ostream& out) {
  const bool all = cfg.suite == "all";
  json j = json::object();
  std::ostringstream table;
  table << std::left << std::setw(14) << "suite" << std::setw(44) << "metric" << std::setw(14)
        << "estimate" << "mc_se\n";
  auto line = [&](const std::string& suite, const std::string& metric, double v, double se) {
    table << std::left << std::setw(14) << suite << std::setw(44) << metric << std::setw(14)
          << format_number(v) << (std::isnan(se) ? std::string("-") : format_number(se)) << '\n';
  };
  const double none = std::numeric_limits<double>::quiet_NaN();

  if (all || cfg.suite == "efficiency") {
    EfficiencyConfig ec;
    ec.p = static_cast<Index>(cfg.bench_p);
    ec.n = static_cast<Index>(cfg.bench_n);
    ec.reps = cfg.reps;
    ec.seed = cfg.seed;
    ec.n_starts = cfg.starts;
    if (cfg.alpha) ec.alpha = *cfg.alpha;
    if (cfg.h) ec.h = static_cast<Index>(*cfg.h);
    if (cfg.estimator == "detmcd") {
      ec.estimator = BenchEstimator::DetMcd;
    } else if (cfg.estimator != "fastmcd") {
      throw ConfigError("bench supports --estimator fastmcd or detmcd");
    }
    const EfficiencyResult r = bench_efficiency(ec);
    j["efficiency"] = {{"p", ec.p}, {"n", ec.n}, {"reps", r.reps}, {"h", r.h},
                       {"alpha", ec.alpha}, {"raw", r.raw}, {"raw_se", r.raw_se},
                       {"weighted", r.weighted}, {"weighted_se", r.weighted_se}};
    const std::string tag = "(p=" + std::to_string(ec.p) + ",n=" + std::to_string(ec.n) +
                            ",h=" + std::to_string(r.h) + ")";
    line("efficiency", "raw " + tag, r.raw, r.raw_se);
    line("efficiency", "weighted " + tag, r.weighted, r.weighted_se);
  }
  if (all || cfg.suite == "breakdown") {
    BreakdownConfig bc;
    bc.trials = cfg.trials;
    bc.seed = cfg.seed;
    bc.n_starts = cfg.starts;
    const BreakdownResult r = bench_breakdown(bc);
    j["breakdown"] = {{"trials", r.trials},
                      {"scattered_count", r.scattered_count},
                      {"clustered_count", r.clustered_count},
                      {"held", r.held},
                      {"broken", r.broken},
                      {"degenerate", r.degenerate}};
    line("breakdown", "held with " + std::to_string(r.scattered_count) + " scattered",
         static_cast<double>(r.held) / r.trials, none);
    line("breakdown", "broken with " + std::to_string(r.clustered_count) + " clustered",
         static_cast<double>(r.broken) / r.trials, none);
    line("breakdown", "degenerate samples", static_cast<double>(r.degenerate), none);
  }
  if (all || cfg.suite == "equivariance") {
    EquivarianceConfig qc;
    qc.trials = std::min(cfg.trials, 50);
    qc.seed = cfg.seed;
    const EquivarianceResult r = bench_detmcd_equivariance(qc);
    j["equivariance"] = {{"trials", r.trials},
                         {"mean_center_dev", r.mean_center_dev},
                         {"max_center_dev", r.max_center_dev},
                         {"mean_scatter_dev", r.mean_scatter_dev},
                         {"max_scatter_dev", r.max_scatter_dev}};
    line("equivariance", "detmcd mean center deviation", r.mean_center_dev, none);
    line("equivariance", "detmcd max center deviation", r.max_center_dev, none);
    line("equivariance", "detmcd mean scatter deviation", r.mean_scatter_dev, none);
    line("equivariance", "detmcd max scatter deviation", r.max_scatter_dev, none);
  }
  if (j.empty()) throw ConfigError("unknown bench suite '" + cfg.suite + "'");
  if (cfg.format == "json") {
    out << j.dump(2) << '\n';
  } else {
    out << table.str();
  }
}

void add_estimator_options(CLI::App& sub, CliConfig& cfg, bool with_input) {
  if (with_input) sub.add_option("input", cfg.input, "CSV file (rows are cases)")->required();
  sub.add_option("--estimator", cfg.estimator, "fastmcd, detmcd, mrcd, unimcd or classical")
      ->check(CLI::IsMember({"fastmcd", "detmcd", "mrcd", "unimcd", "classical"}));
  auto* alpha = sub.add_option("--alpha", cfg.alpha, "Fraction of retained cases, in [0.5, 1]");
  sub.add_option("--h", cfg.h, "Subset size h")->excludes(alpha);
  sub.add_option("--seed", cfg.seed, "Random seed (fastmcd)");
  sub.add_option("--starts", cfg.starts, "Random starts (fastmcd)")->check(CLI::PositiveNumber);
  sub.add_flag("--no-reweight", cfg.no_reweight, "Report the raw estimate");
  sub.add_option("--rho", cfg.rho, "MRCD regularization weight in (0, 1]; automatic if omitted");
  sub.add_option("--target", cfg.target, "MRCD target")
      ->check(CLI::IsMember({"identity", "equicorr"}));
  sub.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  sub.add_option("--output", cfg.output, "Write to this path instead of stdout");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  CLI::App app{"Robust location and scatter estimation (MCD family)", "robust_scatter"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  auto* fit = app.add_subcommand("fit", "Estimate location and scatter");
  auto* flag = app.add_subcommand("flag", "Per-row distances, weights and outlier flags");
  auto* ddplot = app.add_subcommand("ddplot", "Classical versus robust distances");
  auto* ellipse = app.add_subcommand("ellipse", "Tolerance ellipse parameters (p = 2)");
  auto* bench = app.add_subcommand("bench", "Monte Carlo efficiency, breakdown and equivariance");
  for (auto* sub : {fit, flag, ddplot, ellipse}) add_estimator_options(*sub, cfg, true);
  add_estimator_options(*bench, cfg, false);
  bench->add_option("--suite", cfg.suite, "efficiency, breakdown, equivariance or all")
      ->check(CLI::IsMember({"efficiency", "breakdown", "equivariance", "all"}));
  bench->add_option("--p", cfg.bench_p, "Dimension")->check(CLI::PositiveNumber);
  bench->add_option("--n", cfg.bench_n, "Sample size")->check(CLI::PositiveNumber);
  bench->add_option("--reps", cfg.reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
  bench->add_option("--trials", cfg.trials, "Breakdown/equivariance trials")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  if (bench->parsed()) {
    // bench prints a table unless JSON is requested explicitly
    if (bench->count("--format") == 0 || cfg.format == "csv") cfg.format = "table";
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!cfg.output.empty()) {
    file.open(cfg.output);
    if (!file) {
      err << "error: cannot write '" << cfg.output << "'\n";
      return kExitConfigError;
    }
    sink = &file;
  }

  try {
    if (bench->parsed()) {
      emit_bench(cfg, *sink);
      return kExitOk;
    }
    const DataMatrix x = to_data_matrix(read_csv_file(cfg.input));
    const Fitted f = fit_estimator(x, cfg);
    if (fit->parsed()) emit_fit(x, cfg, f, *sink);
    if (flag->parsed()) emit_flag(x, cfg, f, *sink);
    if (ddplot->parsed()) emit_ddplot(x, cfg, f, *sink);
    if (ellipse->parsed()) emit_ellipse(x, cfg, f, *sink);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const Error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

}  // namespace robscatter::cli
