// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// nonzero if any criterion fails. Wine criteria skip when the data files from
// tools/fetch_wine.py are absent.
//
// Usage: acceptance [id ...]   (no ids: run every criterion)

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include "robscatter/bench.hpp"
#include "robscatter/csv.hpp"
#include "robscatter/cstep.hpp"
#include "robscatter/detmcd.hpp"
#include "robscatter/fastmcd.hpp"
#include "robscatter/mrcd.hpp"
#include "robscatter/reweight.hpp"
#include "robscatter/univariate.hpp"
#include "test_util.hpp"

#ifndef ROBSCATTER_WINE_DIR
#define ROBSCATTER_WINE_DIR "data"
#endif

using namespace robscatter;
namespace fs = std::filesystem;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome verdict(bool ok, const std::string& detail) {
  return {ok ? Status::Pass : Status::Fail, detail};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<Index> random_subset(Index n, Index h, CounterRng& rng) {
  std::vector<Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  for (Index i = 0; i < h; ++i) {
    const auto j = i + static_cast<Index>(rng.uniform(static_cast<std::uint64_t>(n - i)));
    std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
  }
  all.resize(static_cast<std::size_t>(h));
  return all;
}

fs::path wine_file(const char* name) { return fs::path(ROBSCATTER_WINE_DIR) / name; }

Outcome wine_bivariate() {
  const fs::path path = wine_file("wine2d.csv");
  if (!fs::exists(path)) return {Status::Skip, path.string() + " not found; run tools/fetch_wine.py"};
  const DataMatrix x = to_data_matrix(read_csv_file(path.string()));
  if (x.n() != 59 || x.p() != 2) return verdict(false, "unexpected shape");
  const double classical = robust_correlation(classical_estimate(x).scatter)(0, 1);
  const Index h = h_from_alpha(x.n(), x.p(), 0.75);
  bool ok = std::abs(classical + 0.37) <= 0.02;
  std::ostringstream d;
  d << "classical r=" << fmt("%.4f", classical);
  FastMcdConfig cfg;
  cfg.h = h;
  for (const auto& [name, raw] : {std::pair{"fastmcd", fast_mcd(x, cfg)},
                                  std::pair{"detmcd", det_mcd(x, h)}}) {
    const double r = robust_correlation(reweight(x, raw).scatter)(0, 1);
    const Index flagged = outlier_report(x, raw).flagged_count();
    ok = ok && std::abs(r - 0.10) <= 0.03 && flagged >= 7 && flagged <= 9;
    d << "; " << name << " robust r=" << fmt("%.4f", r) << " flagged=" << flagged;
  }
  d << " (h=" << h << ")";
  return verdict(ok, d.str());
}

Outcome wine_dd() {
  const fs::path path = wine_file("wine_cultivar1.csv");
  if (!fs::exists(path)) return {Status::Skip, path.string() + " not found; run tools/fetch_wine.py"};
  const DataMatrix x = to_data_matrix(read_csv_file(path.string()));
  if (x.n() != 59 || x.p() != 13) return verdict(false, "unexpected shape");
  const Index h = default_h(x.n(), x.p());
  bool ok = true;
  std::ostringstream d;
  for (const auto& [name, raw] : {std::pair{"fastmcd", fast_mcd(x)},
                                  std::pair{"detmcd", det_mcd(x, h)}}) {
    const DdPlotData dd = dd_plot_data(x, reweight(x, raw));
    const auto far = (dd.rd.array() > 2.0 * dd.cutoff).count();
    const auto md = (dd.md.array() > dd.cutoff).count();
    ok = ok && far >= 7 && md <= 3;
    d << name << ": rd>2*cutoff=" << far << " md>cutoff=" << md << "; ";
  }
  d << "h=" << h;
  return verdict(ok, d.str());
}

Outcome cstep_monotonicity() {
  CounterRng rng(2024, 3);
  double worst = -std::numeric_limits<double>::infinity();
  long steps = 0;
  for (int t = 0; t < 10000; ++t) {
    const Index n = 10 + static_cast<Index>(rng.uniform(191));
    const Index p = 1 + static_cast<Index>(rng.uniform(5));
    const DataMatrix x(standard_normal_matrix(n, p, rng));
    const Index lo = std::max<Index>(p + 2, (n + 1) / 2);
    const Index h = lo + static_cast<Index>(rng.uniform(static_cast<std::uint64_t>(n - lo + 1)));
    HSubset cur = subset_stats(x, random_subset(n, h, rng));
    if (cur.singular()) continue;
    const auto r = concentrate(x, cur);
    for (std::size_t i = 1; i < r.log_det_trace.size(); ++i) {
      worst = std::max(worst, r.log_det_trace[i] - r.log_det_trace[i - 1]);
      ++steps;
    }
  }
  return verdict(worst <= 1e-10, std::to_string(steps) + " C-steps, largest increase " +
                                     fmt("%.3g", worst));
}

Outcome exhaustive_optimality() {
  CounterRng rng(77, 4);
  int hit = 0;
  const int instances = 200;
  for (int t = 0; t < instances; ++t) {
    const Index n = 8 + static_cast<Index>(rng.uniform(8));
    const Index lo = (n + 3) / 2;
    const Index hi = std::min<Index>(9, n);
    const Index h = lo + static_cast<Index>(rng.uniform(static_cast<std::uint64_t>(hi - lo + 1)));
    const DataMatrix x(standard_normal_matrix(n, 2, rng));
    FastMcdConfig cfg;
    cfg.h = h;
    cfg.seed = static_cast<std::uint64_t>(t);
    const FastMcdFit fit = fast_mcd_fit(x, cfg);
    const auto best = testutil::brute_force_mcd(x, h);
    if (fit.trace.best.log_det <= best.log_det + 1e-9 * std::max(1.0, std::abs(best.log_det))) {
      ++hit;
    }
  }
  int uni_hit = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto n = static_cast<Index>(2 + rng.uniform(14));
    const auto h = static_cast<Index>(2 + rng.uniform(static_cast<std::uint64_t>(n - 1)));
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& e : v) e = rng.uniform01() * 100.0;
    const UniMcdResult a = uni_mcd(v, h);
    const UniMcdResult b = uni_mcd_bruteforce(v, h);
    if (std::abs(a.raw_variance - b.raw_variance) <= 1e-9 * std::max(1.0, b.raw_variance) &&
        std::abs(a.location - b.location) <= 1e-9 * std::max(1.0, std::abs(b.location))) {
      ++uni_hit;
    }
  }
  return verdict(hit >= 198 && uni_hit == 1000,
                 "fast_mcd " + std::to_string(hit) + "/200, uni_mcd " + std::to_string(uni_hit) +
                     "/1000");
}

Outcome equivariance() {
  CounterRng rng(55, 5);
  const Matrix g = testutil::gaussian(100, 3, 55);
  FastMcdConfig cfg;
  cfg.seed = 12;
  const LocationScatter f = fast_mcd(DataMatrix(g), cfg);
  const LocationScatter dm = det_mcd(DataMatrix(g), 52);
  double worst_f = 0.0, worst_d = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Matrix a = testutil::random_nonsingular(3, rng);
    const Vector b = standard_normal_matrix(3, 1, rng) * 5.0;
    const LocationScatter e = fast_mcd(DataMatrix((g * a.transpose()).rowwise() + b.transpose()), cfg);
    worst_f = std::max({worst_f, testutil::rel_dev(e.center, a * f.center + b),
                        testutil::rel_dev(e.scatter, a * f.scatter * a.transpose())});
    Vector d(3);
    for (Index j = 0; j < 3; ++j) {
      d(j) = (0.1 + 5.0 * rng.uniform01()) * (rng.uniform(2) ? 1.0 : -1.0);
    }
    const Matrix dd = d.asDiagonal();
    const LocationScatter e2 = det_mcd(DataMatrix((g * dd).rowwise() + b.transpose()), 52);
    worst_d = std::max({worst_d, testutil::rel_dev(e2.center, dd * dm.center + b),
                        testutil::rel_dev(e2.scatter, dd * dm.scatter * dd)});
  }
  return verdict(worst_f <= 1e-8 && worst_d <= 1e-8,
                 "max relative deviation fastmcd " + fmt("%.2g", worst_f) + ", detmcd " +
                     fmt("%.2g", worst_d));
}

Outcome detmcd_permutation() {
  Matrix g = testutil::gaussian(120, 4, 66);
  for (Index i = 0; i < 15; ++i) g.row(i).array() += 6.0;
  // duplicated rows make distance ties certain
  for (Index i = 20; i < 26; ++i) g.row(i) = g.row(30);
  const DataMatrix x(g);
  const Index h = 70;
  const LocationScatter a = det_mcd(x, h);
  const LocationScatter b = det_mcd(x, h);
  const bool identical = a.center == b.center && a.scatter == b.scatter && a.subset == b.subset;
  CounterRng rng(66, 6);
  std::vector<Index> perm(static_cast<std::size_t>(x.n()));
  std::iota(perm.begin(), perm.end(), 0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::shuffle(perm.begin(), perm.end(), rng);
    const LocationScatter c = det_mcd(DataMatrix(g(perm, Eigen::all)), h);
    worst = std::max({worst, (c.center - a.center).cwiseAbs().maxCoeff(),
                      (c.scatter - a.scatter).cwiseAbs().maxCoeff()});
  }
  return verdict(identical && worst <= 1e-10,
                 std::string(identical ? "reruns bit-identical" : "reruns differ") +
                     ", max deviation over 100 permutations " + fmt("%.2g", worst));
}

Outcome breakdown() {
  const BreakdownResult r = bench_breakdown(BreakdownConfig{});
  const bool ok = r.held == r.trials && r.broken >= static_cast<int>(0.95 * r.trials + 0.5 - 1e-9);
  return verdict(ok, std::to_string(r.scattered_count) + " scattered: held " +
                         std::to_string(r.held) + "/" + std::to_string(r.trials) + "; " +
                         std::to_string(r.clustered_count) + " clustered: broken " +
                         std::to_string(r.broken) + "/" + std::to_string(r.trials) +
                         " (degenerate samples " + std::to_string(r.degenerate) + ")");
}

Outcome efficiency() {
  const EfficiencyResult r = bench_efficiency(EfficiencyConfig{});
  const bool ok = r.raw >= 0.03 && r.raw <= 0.10 && r.weighted >= 0.35 && r.weighted <= 0.56;
  return verdict(ok, "raw " + fmt("%.4f", r.raw) + " (se " + fmt("%.4f", r.raw_se) +
                         "), weighted " + fmt("%.4f", r.weighted) + " (se " +
                         fmt("%.4f", r.weighted_se) + "), h=" + std::to_string(r.h));
}

Outcome mrcd_properties() {
  bool ok = true;
  std::ostringstream d;
  for (const auto& [n, p] : {std::pair<Index, Index>{50, 100}, {100, 1000}}) {
    const DataMatrix x(testutil::gaussian(n, p, static_cast<std::uint64_t>(p)));
    MrcdConfig cfg;
    cfg.rho = 0.25;
    const MrcdResult r = mrcd(x, cfg);
    const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(r.regularized_scatter,
                                                              Eigen::EigenvaluesOnly)
                            .eigenvalues()(0);
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t steps = 0;
    auto scan = [&](const MrcdStart& s) {
      for (std::size_t i = 1; i < s.objective_trace.size(); ++i) {
        worst = std::max(worst, s.objective_trace[i] - s.objective_trace[i - 1]);
        ++steps;
      }
    };
    for (const auto& s : r.starts) scan(s);
    const std::size_t start_steps = steps;
    // The deterministic starts are usually fixed points when n < p, so the
    // modified C-steps are also run from random h-subsets.
    CounterRng rng(static_cast<std::uint64_t>(p), 9);
    for (int t = 0; t < 10; ++t) {
      scan(mrcd_concentrate(x, random_subset(n, r.subset.h(), rng), r.target, 0.25));
    }
    const bool monotone = steps == 0 || worst <= 1e-10;
    ok = ok && lmin >= 0.25 - 1e-10 && monotone;
    d << "(n=" << n << ",p=" << p << ") lambda_min=" << fmt("%.4f", lmin)
      << " steps from deterministic starts=" << start_steps << " all steps=" << steps
      << " max increase=" << fmt("%.2g", steps ? worst : 0.0) << "; ";
  }
  return verdict(ok, d.str());
}

Outcome consistency_factor() {
  const double expected = 0.5 / (1.0 - std::exp(-std::log(2.0)) * (1.0 + std::log(2.0)));
  const double got = consistency_factor_raw(0.5, 2);
  return verdict(std::abs(got - expected) <= 1e-6,
                 "c0(0.5, 2) = " + fmt("%.10f", got) + ", closed form " + fmt("%.10f", expected));
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  const std::vector<Criterion> criteria{
      {1, "wine bivariate reproduction", 5, wine_bivariate},
      {2, "wine 13-dimensional distance-distance check", 10, wine_dd},
      {3, "C-step monotonicity", 60, cstep_monotonicity},
      {4, "exhaustive optimality at desk scale", 120, exhaustive_optimality},
      {5, "affine equivariance (fastmcd) and diagonal equivariance (detmcd)", 1e9, equivariance},
      {6, "detmcd determinism and permutation invariance", 1e9, detmcd_permutation},
      {7, "breakdown stress", 1e9, breakdown},
      {8, "efficiency Monte Carlo", 600, efficiency},
      {9, "mrcd properties", 300, mrcd_properties},
      {10, "consistency factor", 1e9, consistency_factor},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Status::Fail, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.status != Status::Skip && secs > c.budget_seconds) {
      o.status = Status::Fail;
      o.detail += "; over the " + fmt("%.0f", c.budget_seconds) + " s budget";
    }
    const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
    if (o.status == Status::Fail) ++failed;
    std::cout << tag << " [" << c.id << "] " << c.name << ": " << o.detail << " ("
              << fmt("%.2f", secs) << " s)" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
