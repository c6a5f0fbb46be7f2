#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "surfzeta/cli/app.hpp"
#include "surfzeta/error.hpp"

using namespace surfzeta;
using namespace surfzeta::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "surfzeta");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("surfzeta_cli_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(R"({"genus": 3, "representation": {"d": 3}, "truncations": {"N": 10, "n_max": 6},
                                  "s_list": [2.5, [3, 0.5]], "character": {"source": "theta", "theta": [0,0,0,0,0,0.5]}})");
  CHECK(c.genus == 3);
  CHECK(c.d == 3);
  CHECK(c.N == 10);
  CHECK(c.cutoff_value == 6);
  REQUIRE(c.s_list.size() == 2);
  CHECK(c.s_list[1].im == 0.5);
  CHECK_NOTHROW(validate_config(c));

  CHECK_THROWS_AS(parse_config(R"({"gneus": 2})"), Error);
  CHECK_THROWS_AS(parse_config("not json"), Error);
  CHECK_THROWS_AS(parse_config(R"({"genus": "two"})"), Error);

  RunConfig bad;
  bad.theta = {0.1};
  bad.character_source = "theta";
  CHECK_THROWS_AS(validate_config(bad), Error);
}

TEST_CASE("digest ignores output location only") {
  RunConfig a, b;
  b.output_dir = "elsewhere";
  b.threads = 4;
  CHECK(a.digest() == b.digest());
  b.N = 11;
  CHECK(a.digest() != b.digest());
}

TEST_CASE("genus 1 is a config error") {
  const auto r = run_cli({"entropy", "--genus", "1"});
  CHECK(r.code == kConfigError);
  CHECK(r.err.find("genus >= 2 required") != std::string::npos);
}

TEST_CASE("unknown flag and missing subcommand exit 1") {
  CHECK(run_cli({"zeta", "--bogus"}).code == kConfigError);
  CHECK(run_cli({}).code == kConfigError);
}

TEST_CASE("verify, zeta and count write outputs") {
  const auto dir = scratch_dir("verify");
  auto r = run_cli({"verify", "--n-max", "6", "--output-dir", dir.string()});
  CHECK(r.code == kOk);
  const auto v = nlohmann::json::parse(slurp(dir / "verify.json"));
  CHECK(v["pass"] == true);
  CHECK(v["meta"]["config_digest"].get<std::string>().size() == 16);

  r = run_cli({"zeta", "--n-max", "6", "--s", "3,0", "--s", "3.5,1", "--output-dir", dir.string()});
  CHECK(r.code == kOk);
  const auto csv = slurp(dir / "zeta.csv");
  CHECK(csv.rfind("# surfzeta ", 0) == 0);
  CHECK(csv.find("s_re,s_im,value_re,value_im,method,truncation") != std::string::npos);
  CHECK(csv.find("determinant_selberg") != std::string::npos);

  r = run_cli({"count", "--n-max", "6", "--output-dir", dir.string()});
  CHECK(r.code == kOk);
  CHECK(slurp(dir / "count.csv").find("T,pi,li,ratio") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("database reuse and staleness") {
  const auto dir = scratch_dir("db");
  CHECK(run_cli({"orbits", "--n-max", "5", "--output-dir", dir.string()}).code == kOk);
  const auto db = (dir / "orbits.jsonl").string();
  CHECK(run_cli({"lfun", "--database", db, "--theta", "0.1,0.2,0.3,0.4", "--s", "3", "--output-dir", dir.string()}).code ==
        kOk);
  const auto r = run_cli({"lfun", "--database", db, "--dim", "3", "--s", "3", "--output-dir", dir.string()});
  CHECK(r.code == kConfigError);
  CHECK(r.err.find("staleness") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("output dir precedence: config < env < flag") {
  const auto base = scratch_dir("prec");
  fs::create_directories(base);
  const auto cfg = base / "c.json";
  std::ofstream(cfg) << R"({"output_dir": ")" << (base / "from_config").string() << R"(", "limitset": {"samples": 5, "length": 6}})";
  CHECK(run_cli({"limitset", "-c", cfg.string()}).code == kOk);
  CHECK(fs::exists(base / "from_config" / "limitset.csv"));

  setenv("SURFZETA_OUTPUT_DIR", (base / "from_env").string().c_str(), 1);
  CHECK(run_cli({"limitset", "-c", cfg.string()}).code == kOk);
  CHECK(fs::exists(base / "from_env" / "limitset.csv"));
  CHECK(run_cli({"limitset", "-c", cfg.string(), "--output-dir", (base / "from_flag").string()}).code == kOk);
  CHECK(fs::exists(base / "from_flag" / "limitset.csv"));
  unsetenv("SURFZETA_OUTPUT_DIR");
  fs::remove_all(base);
}

TEST_CASE("automaton subcommand") {
  const auto dir = scratch_dir("aut");
  CHECK(run_cli({"automaton", "--output-dir", dir.string()}).code == kOk);
  const auto rep = nlohmann::json::parse(slurp(dir / "automaton_report.json"));
  CHECK(rep["pass"] == true);
  CHECK(run_cli({"entropy", "--n-max", "6", "--automaton-file", (dir / "automaton.json").string(), "--output-dir",
                 dir.string()})
            .code == kOk);
  fs::remove_all(dir);
}
