#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "daa/csv.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "daa");
  std::ostringstream out, err;
  const int code = daa::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("unknown flags print usage and fail") {
  const Result r = call({"run", "--frobnicate"});
  CHECK(r.code != 0);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(call({}).code != 0);
  CHECK(call({"nonsense"}).code != 0);
}

TEST_CASE("help exits cleanly") { CHECK(call({"--help"}).code == 0); }

TEST_CASE("run prints a header and a deterministic row") {
  const std::vector<std::string> args{"run", "--objective", "NCA", "--hidden", "3", "--bias",
                                      "0.9", "--lr", "0.05", "--seed", "12"};
  const Result a = call(args), b = call(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  std::istringstream in(a.out);
  const daa::CsvTable t = daa::read_csv(in);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][t.column("objective")] == "NCA");
  CHECK(t.rows[0][t.column("h")] == "3");
  CHECK(t.rows[0][t.column("status")] == "ok");
}

TEST_CASE("run searches the lr grid when none is given") {
  const Result r = call({"run", "--objective", "DPO", "--hidden", "2", "--seeds", "2", "--epochs",
                         "5", "--jobs", "2"});
  CHECK(r.code == 0);
  CHECK(r.err.find("selected lr") != std::string::npos);
}

TEST_CASE("bad values are reported, not thrown") {
  CHECK(call({"run", "--objective", "KTO"}).code == 2);
  CHECK(call({"run", "--hidden", "0", "--lr", "0.1"}).code == 2);
  CHECK(call({"run", "--config", "/nonexistent.json"}).code != 0);
  CHECK(call({"report", "--out", "/nonexistent/dir"}).code == 2);
}

TEST_CASE("generate writes a dataset") {
  const Result r = call({"generate", "--seed", "3", "--bias", "0.9", "--samples", "20"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  CHECK(daa::read_csv(in).rows.size() == 20);
}

TEST_CASE("sweep and report") {
  const fs::path dir = fs::temp_directory_path() / ("daa_cli_sweep_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  const Result r = call({"sweep", "--seeds", "2", "--hidden", "1,2", "--objective", "DPO,NCA",
                         "--bias", "0.9", "--pilot-seeds", "2", "--epochs", "5", "--out",
                         dir.string()});
  CHECK(r.code == 0);
  const daa::CsvTable runs = daa::read_csv_file((dir / "runs.csv").string());
  CHECK(runs.rows.size() == 2 * 2 * 2);
  CHECK(call({"report", "--out", dir.string()}).code == 0);
  CHECK(fs::exists(dir / "plot_accuracy_bias0.9.csv"));
  fs::remove_all(dir);
}

TEST_CASE("verify passes") {
  const Result r = call({"verify"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
