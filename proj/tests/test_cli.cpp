#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "robscatter/cli.hpp"
#include "robscatter/csv.hpp"
#include "robscatter/errors.hpp"
#include "test_util.hpp"

using namespace robscatter;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_csv(const std::string& name, const std::string& body) {
  const fs::path p = fs::temp_directory_path() / ("robscatter_test_" + name);
  std::ofstream(p) << body;
  return p.string();
}

std::string gaussian_csv(const std::string& name, Index n, Index p, std::uint64_t seed) {
  const Matrix g = testutil::gaussian(n, p, seed);
  std::vector<std::string> header;
  for (Index j = 0; j < p; ++j) header.push_back("v" + std::to_string(j + 1));
  std::ostringstream body;
  write_csv_header(body, header);
  for (Index i = 0; i < n; ++i) {
    std::vector<double> row;
    for (Index j = 0; j < p; ++j) row.push_back(g(i, j));
    write_csv_row(body, row);
  }
  return temp_csv(name, body.str());
}

}  // namespace

TEST_CASE("csv parsing") {
  std::istringstream with_header("\xEF\xBB\xBF" "a,b\r\n1,2\r\n3.5,-4e2\r\n");
  const CsvTable t = parse_csv(with_header);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  CHECK(t.values.rows() == 2);
  CHECK(t.values(1, 1) == -400.0);

  std::istringstream no_header("1,2\n3,4\n");
  const CsvTable u = parse_csv(no_header);
  CHECK(u.header.empty());
  CHECK(u.values.rows() == 2);

  for (const char* bad : {"a,b\n1,\n", "a,b\n1,x\n", "a,b\n1,nan\n", "a,b\n1,2,3\n"}) {
    std::istringstream in(bad);
    CHECK_THROWS_AS(parse_csv(in), DataError);
  }
  std::istringstream named("a,b\n1,2\n3,oops\n");
  try {
    parse_csv(named, "f.csv");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }
}

TEST_CASE("numbers round-trip") {
  CounterRng rng(1, 0);
  for (int i = 0; i < 1000; ++i) {
    const double v = (rng.uniform01() - 0.5) * std::pow(10.0, static_cast<double>(rng.uniform(40)) - 20);
    CHECK(std::stod(format_number(v)) == v);
  }
}

TEST_CASE("ddplot schema and round trip") {
  const std::string path = gaussian_csv("dd.csv", 50, 3, 2);
  const Run r = run_cli({"ddplot", "--format", "csv", path});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("index,md,rd,cutoff\n", 0) == 0);
  std::istringstream in(r.out);
  const CsvTable t = parse_csv(in);
  CHECK(t.header == std::vector<std::string>{"index", "md", "rd", "cutoff"});
  CHECK(t.values.rows() == 50);
  std::ostringstream again;
  write_csv_header(again, t.header);
  for (Index i = 0; i < t.values.rows(); ++i) {
    write_csv_row(again, std::vector<double>(t.values.row(i).begin(), t.values.row(i).end()));
  }
  CHECK(again.str() == r.out);
}

TEST_CASE("fit json schema and determinism") {
  const std::string path = gaussian_csv("fit.csv", 60, 2, 3);
  for (const char* est : {"fastmcd", "detmcd", "mrcd", "classical"}) {
    const Run a = run_cli({"fit", "--estimator", est, "--seed", "3", path});
    REQUIRE(a.code == 0);
    const auto j = nlohmann::json::parse(a.out);
    for (const char* key : {"center", "scatter", "h", "alpha", "log_det", "c0", "c1", "flags"}) {
      CHECK(j.contains(key));
    }
    CHECK(j["center"].size() == 2);
    CHECK(j["scatter"].size() == 2);
    CHECK(j["flags"].size() == 60);
    const Run b = run_cli({"fit", "--estimator", est, "--seed", "3", path});
    CHECK(a.out == b.out);
  }
  const auto h = nlohmann::json::parse(run_cli({"fit", "--h", "40", path}).out);
  CHECK(h["h"] == 40);
  const auto raw = nlohmann::json::parse(run_cli({"fit", "--no-reweight", path}).out);
  CHECK(raw["kind"] == "raw_mcd");
  CHECK(raw["c1"] == 1.0);

  const std::string uni = gaussian_csv("uni.csv", 30, 1, 4);
  CHECK(run_cli({"fit", "--estimator", "unimcd", uni}).code == 0);
  CHECK(run_cli({"fit", "--estimator", "unimcd", "--format", "csv", uni}).code == 0);
  const auto det1 = nlohmann::json::parse(run_cli({"fit", "--estimator", "detmcd", "--no-reweight", uni}).out);
  CHECK(det1["kind"] == "uni_mcd");
}

TEST_CASE("flag and ellipse outputs") {
  const std::string path = gaussian_csv("flag.csv", 80, 2, 5);
  const Run f = run_cli({"flag", "--format", "csv", path});
  REQUIRE(f.code == 0);
  CHECK(f.out.rfind("index,md,rd,weight,flagged,cutoff\n", 0) == 0);
  std::istringstream in(f.out);
  const CsvTable t = parse_csv(in);
  for (Index i = 0; i < t.values.rows(); ++i) CHECK(t.values(i, 4) == 1 - t.values(i, 3));

  const Run e = run_cli({"ellipse", "--format", "csv", path});
  REQUIRE(e.code == 0);
  std::istringstream ein(e.out);
  const CsvTable et = parse_csv(ein);
  CHECK(et.header.size() == 7);
  CHECK(et.values.rows() == 2);
  CHECK(et.values(0, 6) == doctest::Approx(std::sqrt(-2.0 * std::log(0.025))));
  CHECK(run_cli({"ellipse", gaussian_csv("e3.csv", 30, 3, 6)}).code == cli::kExitConfigError);

  const fs::path out = fs::temp_directory_path() / "robscatter_test_out.json";
  CHECK(run_cli({"flag", "--output", out.string(), path}).code == 0);
  std::ifstream back(out);
  CHECK(nlohmann::json::parse(back)["rows"].size() == 80);
}

TEST_CASE("exit codes") {
  const std::string same = temp_csv("same.csv", "a,b\n1,2\n1,2\n1,2\n1,2\n1,2\n1,2\n");
  const Run z = run_cli({"flag", same});
  CHECK(z.code == cli::kExitDataError);
  CHECK_FALSE(z.err.empty());
  CHECK(run_cli({"flag", "--estimator", "detmcd", same}).code == cli::kExitDataError);

  const std::string bad = temp_csv("bad.csv", "a,b\n1,2\n3,\n");
  const Run b = run_cli({"fit", bad});
  CHECK(b.code == cli::kExitDataError);
  CHECK(b.err.find("row 2") != std::string::npos);
  CHECK(run_cli({"fit", "/nonexistent/file.csv"}).code == cli::kExitDataError);

  const std::string ok = gaussian_csv("ok.csv", 40, 2, 7);
  CHECK(run_cli({"fit", "--alpha", "0.3", ok}).code == cli::kExitConfigError);
  CHECK(run_cli({"fit", "--h", "2", ok}).code == cli::kExitConfigError);
  CHECK(run_cli({"fit", "--h", "41", ok}).code == cli::kExitConfigError);
  CHECK(run_cli({"fit", "--alpha", "0.6", "--h", "30", ok}).code == cli::kExitConfigError);
  CHECK(run_cli({"fit", "--estimator", "nope", ok}).code == cli::kExitConfigError);
  CHECK(run_cli({"fit", "--target", "nope", ok}).code == cli::kExitConfigError);
  CHECK(run_cli({"fit", "--estimator", "mrcd", "--rho", "1.5", ok}).code ==
        cli::kExitConfigError);
  CHECK(run_cli({}).code == cli::kExitConfigError);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("bench subcommand") {
  const Run r = run_cli({"bench", "--suite", "efficiency", "--n", "100", "--reps", "20",
                         "--starts", "20"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("efficiency") != std::string::npos);
  const Run j = run_cli({"bench", "--suite", "breakdown", "--trials", "3", "--starts", "50",
                         "--format", "json"});
  REQUIRE(j.code == 0);
  CHECK(nlohmann::json::parse(j.out)["breakdown"]["trials"] == 3);
  CHECK(run_cli({"bench", "--suite", "efficiency", "--n", "100000", "--reps", "500"}).code ==
        cli::kExitConfigError);
}

TEST_CASE("wine example through the command line") {
  const fs::path wine = fs::path(ROBSCATTER_WINE_DIR) / "wine2d.csv";
  if (!fs::exists(wine)) {
    MESSAGE("skipped: " << wine.string() << " not found; run tools/fetch_wine.py");
    return;
  }
  const Run r = run_cli({"fit", "--estimator", "detmcd", "--alpha", "0.75", wine.string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["robust_correlation"][0][1].get<double>() == doctest::Approx(0.10).epsilon(0.3));
  CHECK(j["h"] == 45);
}
