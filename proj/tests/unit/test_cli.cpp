#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "chaosdesign/cli.hpp"
#include "chaosdesign/errors.hpp"
#include "chaosdesign/rng.hpp"

using namespace chaosdesign;
using namespace chaosdesign::cli;

namespace {

std::optional<RunConfig> parse(std::vector<std::string> args) {
  args.insert(args.begin(), "chaosdesign");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  return parse_args(static_cast<int>(argv.size()), argv.data(), out);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "chaosdesign_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("split_seed regression vectors") {
  CHECK(split_seed(0, "H1") == 13327548870459985700ULL);
  CHECK(split_seed(0, "H2") == 17144344619835448460ULL);
  CHECK(split_seed(0, "elements") == 1734858104698508604ULL);
  CHECK(split_seed(42, "H1") == split_seed(42, "H1"));
}

TEST_CASE("split_seed separates labels across many masters") {
  for (std::uint64_t m = 0; m < 10000; ++m) CHECK_FALSE(split_seed(m, "H1") == split_seed(m, "H2"));
  std::set<std::uint64_t> seen;
  for (const char* l : {"H1", "H2", "elements", "paulis", "times"}) seen.insert(split_seed(123, l));
  CHECK(seen.size() == 5);
}

TEST_CASE("defaults and flag parsing") {
  const auto cfg = parse({"frame-potential"});
  REQUIRE(cfg);
  CHECK(cfg->n_qubits == 7);
  CHECK(cfg->T == 1e6);
  CHECK(cfg->samples == 400);
  CHECK(cfg->k_list == std::vector<int>{1, 2, 3, 4});
  const auto custom = parse({"frame-potential", "--model", "spin", "--n", "5", "--k", "2,3", "--pauli", "none",
                             "--seed", "7", "--format", "json"});
  REQUIRE(custom);
  CHECK(custom->model == ModelKind::RandomSpin);
  CHECK(custom->pauli == PauliEnsembleKind::IdentityOnly);
  CHECK(custom->k_list == std::vector<int>{2, 3});
  CHECK(custom->format == OutputFormat::Json);
  CHECK_FALSE(parse({"--help"}).has_value());
}

TEST_CASE("bad configurations raise validation errors") {
  CHECK_THROWS_AS(parse({"frame-potential", "--n", "0"}), ValidationError);
  CHECK_THROWS_AS(parse({"frame-potential", "--pauli", "abc"}), ValidationError);
  CHECK_THROWS_AS(parse({"frame-potential", "--samples", "1"}), ValidationError);
  CHECK_THROWS_AS(parse({"sweep-time"}), ValidationError);
  CHECK_THROWS_AS(parse({"sweep-time", "--T-grid", "10,5"}), ValidationError);
  CHECK_THROWS_AS(parse({"nonsense"}), ValidationError);
  CHECK_THROWS_AS(parse({"frame-potential", "--unknown-flag", "1"}), ValidationError);
}

TEST_CASE("config file values are overridden by flags") {
  const auto path = scratch("run.cfg");
  std::ofstream(path) << "n=4\nk=2,3\nT=500\nseed=11\n";
  const auto cfg = parse({"frame-potential", "--config", path.string(), "--seed", "12"});
  REQUIRE(cfg);
  CHECK(cfg->n_qubits == 4);
  CHECK(cfg->k_list == std::vector<int>{2, 3});
  CHECK(cfg->T == 500.0);
  CHECK(cfg->seed == 12);
}

TEST_CASE("format_real round trips") {
  for (double v : {0.1, 1.0 / 3.0, 2.000244140625, 1e-300, 6.02e23, -0.0})
    CHECK(std::stod(format_real(v)) == v);
}

TEST_CASE("CSV and JSON round trips") {
  Table t;
  t.columns = {{"k", ColumnType::Integer}, {"x", ColumnType::Real}, {"status", ColumnType::Text}};
  t.rows.push_back({std::int64_t{1}, 0.1, std::string("ok")});
  t.rows.push_back({std::int64_t{2}, std::numeric_limits<double>::quiet_NaN(), std::string("a, \"quoted\"\nline")});
  t.rows.push_back({std::monostate{}, std::numeric_limits<double>::infinity(), std::string("")});
  t.rows.push_back({std::int64_t{-4}, 1.0 / 3.0, std::string("x")});
  const auto csv = parse_csv(emit_csv(t), t.columns);
  CHECK(same_table(csv, t) == false);  // empty text reads back as missing
  t.rows[2][2] = std::monostate{};
  CHECK(same_table(parse_csv(emit_csv(t), t.columns), t));
  CHECK(same_table(parse_json(emit_json(t)), t));
  CHECK_THROWS_AS(parse_csv("a,b\n1,2\n", t.columns), ValidationError);
}

TEST_CASE("frame-potential output schema") {
  const auto cfg = parse({"frame-potential", "--n", "3", "--samples", "30", "--T", "100"});
  REQUIRE(cfg);
  std::ostringstream out, err;
  CHECK(run(*cfg, out, err) == ExitCode::Ok);
  const auto table = parse_csv(out.str(), frame_potential_schema());
  CHECK(table.rows.size() == 4);
  CHECK(out.str().rfind("k,F_mean,F_stderr,F_haar,delta_F,prediction,p0,n_pairs\n", 0) == 0);
}

TEST_CASE("outputs are byte identical across thread counts") {
  for (const char* command : {"frame-potential", "sweep-time", "sweep-size"}) {
    std::string payload;
    for (const char* threads : {"1", "3"}) {
      const auto path = scratch(std::string(command) + "_" + threads + ".json");
      const auto cfg = parse({command, "--n", "3", "--samples", "40", "--T", "50", "--k", "2,3",
                              "--T-grid", "5,50", "--n-list", "2,3", "--coincident-paulis", "4",
                              "--time-samples", "64", "--threads", threads, "--format", "json",
                              "--output", path.string()});
      REQUIRE(cfg);
      std::ostringstream out, err;
      REQUIRE(run(*cfg, out, err) == ExitCode::Ok);
      CHECK(std::filesystem::exists(meta_path(path.string())));
      const std::string body = slurp(path);
      if (payload.empty()) {
        payload = body;
      } else {
        CHECK(body == payload);
      }
    }
  }
}

TEST_CASE("exit codes") {
  RunConfig cfg;
  cfg.command = "frame-potential";
  cfg.n_qubits = 0;
  std::ostringstream out, err;
  CHECK(run(cfg, out, err) == ExitCode::ConfigError);
  cfg.n_qubits = 2;
  cfg.samples = 20;
  cfg.command = "pauli-spectrum";
  cfg.pauli = PauliEnsembleKind::IdentityOnly;
  CHECK(run(cfg, out, err) == ExitCode::ConfigError);
}

TEST_CASE("meta path replaces the extension") {
  CHECK(meta_path("out/run.csv") == "out/run.meta.json");
  CHECK(meta_path("run") == "run.meta.json");
}
