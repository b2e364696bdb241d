#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lookahead/env_zoo.hpp"
#include "lookahead/json_io.hpp"

namespace lookahead::cli {

enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitCap = 3 };

/// 12 significant digits; infinities print as "inf" / "-inf".
std::string format_number(double x);

/// Copy of `j` with every floating-point number rounded to 12 significant digits.
Json round_numbers(const Json& j);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  void write(std::ostream& out) const;
};

/// Environment from a JSON file (environment or bare MDP), or from a
/// generator kind with "key=value" parameters.
Environment load_environment(const std::string& path, const std::string& kind,
                             const std::vector<std::string>& params);
std::map<std::string, double> parse_params(const std::vector<std::string>& params);

// reproduce

struct ReproRow {
  std::string quantity;
  double computed = 0.0;
  double reference = 0.0;
  bool pass = false;
  double tolerance = 0.0;
};

std::vector<std::string> reproduce_sections();
/// Throws DomainError for an unknown section.
std::vector<ReproRow> reproduce(const std::string& section);
CsvTable reproduce_table(const std::vector<ReproRow>& rows);

// sweep

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct SweepEnv {
  std::string kind;
  std::map<std::string, double> params;
  std::string path;
  int line = 0;
};

/**
 * Sweep configuration:
 *   {"envs": [{"kind": "grid", "params": {"n": 4}} | {"path": "m.json"}, ...],
 *    "lookaheads": [1, 2] | "all",
 *    "modes": ["fixed", "worst-r", "worst-r-stationary"],
 *    "rewards": "env" | "dense",
 *    "timing": false}
 * Missing "lookaheads" means 1..H per environment.
 */
struct SweepConfig {
  std::vector<SweepEnv> envs;
  std::vector<int> lookaheads;
  std::vector<std::string> modes{"fixed"};
  std::string rewards = "env";
  bool timing = false;
};

SweepConfig parse_sweep_config(const std::string& text);
CsvTable run_sweep(const SweepConfig& config);

// check

struct CheckReport {
  int checks = 0;
  std::vector<std::string> failures;
};

/// "fast" runs the invariant suites; "full" adds the brute-force cross-checks.
/// A non-empty `mdp_path` adds the invariants of that file.
CheckReport run_check(const std::string& level, const std::string& mdp_path);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lookahead::cli
