#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"

using namespace lookahead;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "lookahead-cr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "lookahead_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("number formatting uses 12 significant digits") {
  CHECK(cli::format_number(1.0 / 3) == "0.333333333333");
  CHECK(cli::format_number(2.0) == "2");
  CHECK(cli::format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(cli::round_numbers(Json{{"x", 1.0 / 3}})["x"].get<double>() == 0.333333333333);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"cr", "--kind", "grid", "--param", "n=3", "--mode", "bogus", "--L", "1"}).code == cli::kExitUsage);
  CHECK(run({"envgen", "--kind", "grid"}).code == cli::kExitUsage);  // missing parameter n
  CHECK(run({"value", "--kind", "grid", "--param", "n=3", "--L", "9"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("envgen writes a loadable environment") {
  const std::string path = (scratch() / "grid3.json").string();
  REQUIRE(run({"envgen", "--kind", "grid", "--param", "n=3", "--out", path}).code == 0);
  const Json j = Json::parse(slurp(path));
  CHECK(j["mdp"]["S"] == 9);
  CHECK(j["rewards"]["family"] == "deterministic");
  const Result v = run({"value", "--env", path, "--L", "1"});
  REQUIRE(v.code == 0);
  const Json vj = Json::parse(v.out);
  CHECK(vj["V0"].get<double>() == doctest::Approx(5.0));
  CHECK(vj["VL_sup"].get<double>() >= 5.0);
  CHECK(vj.contains("witness"));
}

TEST_CASE("cr emits a report and a CSV row") {
  const std::string csv = (scratch() / "cr.csv").string();
  const Result r = run({"cr", "--kind", "chain", "--param", "H=3", "--param", "A=2", "--mode", "fixed",
                        "--L", "3", "--csv", csv});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["ratio"].get<double>() == doctest::Approx(1.0 / 3));
  const auto rows = parse_csv(slurp(csv));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"S", "A", "H", "L", "mode", "value", "lower_bound",
                                            "upper_bound", "runtime_ms"});
  CHECK(rows[1][5] == "0.333333333333");

  const Result w = run({"cr", "--kind", "chain", "--param", "H=3", "--param", "A=2", "--mode", "worst-r",
                        "--L", "3"});
  REQUIRE(w.code == 0);
  CHECK(Json::parse(w.out)["ratio"].get<double>() == doctest::Approx(0.2));
}

TEST_CASE("resource caps exit with 3") {
  const Result r = run({"cr", "--kind", "random", "--param", "S=3", "--param", "A=3", "--param", "H=4",
                        "--mode", "worst-r", "--L", "1", "--cap", "3"});
  CHECK(r.code == cli::kExitCap);
}

TEST_CASE("reach and simulate") {
  const Result r = run({"reach", "--kind", "chain", "--param", "H=2", "--param", "A=2"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out).contains("d_star"));

  const std::string traces = (scratch() / "traces.jsonl").string();
  const Result s = run({"simulate", "--kind", "delayed-tree", "--param", "A=2", "--param", "n=1", "--param",
                        "H=4", "--agent", "greedy-lookahead", "--L", "4", "--episodes", "2000", "--seed",
                        "3", "--traces", traces, "--max-traces", "5"});
  REQUIRE(s.code == 0);
  CHECK(Json::parse(s.out)["episodes"] == 2000);
  CHECK(parse_csv(slurp(traces)).size() == 5);
  const Result again = run({"simulate", "--kind", "delayed-tree", "--param", "A=2", "--param", "n=1",
                            "--param", "H=4", "--agent", "greedy-lookahead", "--L", "4", "--episodes",
                            "2000", "--seed", "3"});
  CHECK(again.out == s.out);

  const Result t = run({"simulate", "--agent", "transition-lookahead", "--episodes", "2000"});
  REQUIRE(t.code == 0);
  CHECK(Json::parse(t.out)["leaves"] == 8);
}

TEST_CASE("reproduce writes the report and flags unknown sections") {
  const Result r = run({"reproduce", "bandit"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  CHECK(rows[0] == std::vector<std::string>{"quantity", "computed", "reference_value_or_bound", "pass",
                                            "tolerance"});
  CHECK(rows.size() == 9);
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k][3] == "pass");
  CHECK(run({"reproduce", "nowhere"}).code == cli::kExitUsage);
  for (const auto& s : cli::reproduce_sections())
    for (const auto& row : cli::reproduce(s)) CHECK_MESSAGE(row.pass, row.quantity);
}

TEST_CASE("sweep: dense grid ratios do not increase with L") {
  const std::string cfg = write("grid.json", R"({"envs": [{"kind": "grid", "params": {"n": 4}}],
    "modes": ["fixed"], "rewards": "dense"})");
  const Result r = run({"sweep", "--config", cfg});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 8);
  for (std::size_t k = 2; k < rows.size(); ++k) CHECK(std::stod(rows[k][6]) <= std::stod(rows[k - 1][6]) + 1e-12);
  CHECK(run({"sweep", "--config", cfg}).out == r.out);
}

TEST_CASE("sweep: prophet chain has equal one-step and full ratios") {
  const std::string cfg = write("chain.json", R"({"envs": [{"kind": "chain", "params": {"H": 5, "A": 2}}],
    "lookaheads": [1, 5]})");
  const Result r = run({"sweep", "--config", cfg});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][6] == rows[2][6]);
}

TEST_CASE("sweep: empty env list and config errors") {
  const Result e = run({"sweep", "--config", write("empty.json", R"({"envs": []})")});
  REQUIRE(e.code == 0);
  CHECK(e.out == "env,S,A,H,L,mode,value,lower_bound,upper_bound\n");

  const Result bad = run({"sweep", "--config", write("bad.json", "{\n  \"envs\": [\n    {\"kind\": \"grid\",,}\n  ]\n}")});
  CHECK(bad.code == cli::kExitUsage);
  CHECK(bad.err.find("line 3") != std::string::npos);

  const Result unknown = run({"sweep", "--config", write("kind.json", "{\"envs\": [\n\n {\"kind\": \"moon\"}]}")});
  CHECK(unknown.code == cli::kExitUsage);
  CHECK(unknown.err.find("line 3") != std::string::npos);

  const Result big = run({"sweep", "--config", write("big.json", R"({"envs": [{"kind": "grid", "params": {"n": 3}}],
    "lookaheads": [9]})")});
  CHECK(big.code == cli::kExitUsage);
}

TEST_CASE("check passes on a fresh build and names a corrupted kernel") {
  const Result ok = run({"check", "--level", "fast"});
  CHECK(ok.code == 0);
  Json env = Json::parse(run({"envgen", "--kind", "chain", "--param", "H=2", "--param", "A=2"}).out);
  env["mdp"]["P"][0][0][0][0] = 0.5;
  const std::string path = write("corrupt.json", env.dump());
  const Result bad = run({"check", "--level", "fast", "--mdp", path});
  CHECK(bad.code == cli::kExitFailure);
  CHECK(bad.err.find("transition row does not sum to 1") != std::string::npos);
  CHECK(run({"cr", "--env", path, "--L", "1"}).code == cli::kExitFailure);
}

TEST_CASE("the installed binary reports exit codes") {
  const char* bin = std::getenv("LOOKAHEAD_CR_BIN");
  if (!bin) return;
  const std::string base = std::string(bin) + " ";
  CHECK(std::system((base + "check --level fast > /dev/null").c_str()) == 0);
  const int code = std::system((base + "nonsense 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(code) == 2);
}
