#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lookahead/cr_solver.hpp"
#include "lookahead/lookahead_value.hpp"
#include "lookahead/reach.hpp"
#include "lookahead/sim.hpp"

namespace lookahead::cli {

namespace {

struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_valid(const Environment& env) {
  auto v = validate(env.mdp);
  if (env.rewards) {
    auto rv = validate(env.mdp, *env.rewards);
    v.insert(v.end(), rv.begin(), rv.end());
  }
  if (!v.empty()) throw ValidationFailure(describe(v));
}

double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

void emit(std::ostream& out, const Json& j) { out << round_numbers(j).dump(2) << "\n"; }

Array3 dense_ones(const TabularMDP& m) {
  Array3 r({std::size_t(m.horizon()), std::size_t(m.num_states()), std::size_t(m.num_actions())});
  for (int h = 0; h < m.horizon(); ++h)
    for (int s = 0; s < m.num_states(); ++s)
      for (int a = 0; a < m.num_actions(); ++a)
        if (m.available(h, s, a)) r(h, s, a) = 1.0;
  return r;
}

RewardSpec rewards_or_fail(const Environment& env) {
  if (!env.rewards) throw ValidationFailure("environment has no rewards; pass --rewards");
  return *env.rewards;
}

struct EnvArgs {
  std::string path, kind, rewards_path;
  std::vector<std::string> params;

  void add(CLI::App* cmd) {
    cmd->add_option("--env", path, "environment or MDP JSON file");
    cmd->add_option("--kind", kind, "generator kind");
    cmd->add_option("--param", params, "generator parameter key=value")->take_all();
    cmd->add_option("--rewards", rewards_path, "reward JSON file overriding the environment's");
  }
  Environment load() const {
    Environment env = load_environment(path, kind, params);
    if (!rewards_path.empty()) env.rewards = rewards_from_json(read_json_file(rewards_path));
    require_valid(env);
    return env;
  }
};

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

}  // namespace

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Json round_numbers(const Json& j) {
  if (j.is_number_float()) return round12(j.get<double>());
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& x : j) out.push_back(round_numbers(x));
    return out;
  }
  if (j.is_object()) {
    Json out = Json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = round_numbers(it.value());
    return out;
  }
  return j;
}

void CsvTable::write(std::ostream& out) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
    out << "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
}

std::map<std::string, double> parse_params(const std::vector<std::string>& params) {
  std::map<std::string, double> out;
  for (const auto& p : params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw DomainError("parameter '" + p + "' is not key=value");
    try {
      std::size_t used = 0;
      const std::string v = p.substr(eq + 1);
      out[p.substr(0, eq)] = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::logic_error&) {
      throw DomainError("parameter '" + p + "' has a non-numeric value");
    }
  }
  return out;
}

Environment load_environment(const std::string& path, const std::string& kind,
                             const std::vector<std::string>& params) {
  if (!path.empty() && !kind.empty()) throw DomainError("use either --env or --kind");
  if (!path.empty()) return environment_from_json(read_json_file(path));
  if (kind.empty()) throw DomainError("an environment is required (--env or --kind)");
  return make_environment(kind, parse_params(params));
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Competitive ratios of reward-lookahead agents in tabular MDPs", "lookahead-cr"};
  app.require_subcommand(1);
  int code = kExitOk;

  // envgen
  auto* envgen = app.add_subcommand("envgen", "generate an environment as JSON");
  std::string env_kind, env_out;
  std::vector<std::string> env_params;
  envgen->add_option("--kind", env_kind, "generator kind")->required();
  envgen->add_option("--param", env_params, "parameter key=value")->take_all();
  envgen->add_option("--out", env_out, "output file (stdout by default)");
  envgen->callback([&] {
    Environment env = make_environment(env_kind, parse_params(env_params));
    require_valid(env);
    write_text(env_out, to_json(env).dump(2) + "\n", out);
  });

  // value
  auto* value = app.add_subcommand("value", "no-lookahead optimum and lookahead supremum");
  EnvArgs value_env;
  value_env.add(value);
  int value_L = 1;
  value->add_option("--L", value_L, "lookahead window")->required();
  value->callback([&] {
    Environment env = value_env.load();
    const RewardSpec rewards = rewards_or_fail(env);
    const PlanResult v0 = optimal_value_no_lookahead(env.mdp, rewards);
    const LookaheadValue sup = sup_lookahead_value(env.mdp, rewards, value_L);
    Json j{{"L", value_L}, {"V0", v0.value}, {"VL_sup", sup.value},
           {"witness", to_json(sup.witness)}};
    if (sup.certified_factor) j["certified_factor"] = *sup.certified_factor;
    emit(out, j);
  });

  // cr
  auto* cr = app.add_subcommand("cr", "competitive ratio");
  EnvArgs cr_env;
  cr_env.add(cr);
  std::string cr_mode = "fixed", cr_csv;
  int cr_L = 1, cr_restarts = 8;
  bool cr_heuristic = false, cr_dense = false;
  std::uint64_t cr_cap = 1000000, cr_seed = 0;
  cr->add_option("--mode", cr_mode, "fixed | worst-r | worst-r-stationary")
      ->check(CLI::IsMember({"fixed", "worst-r", "worst-r-stationary"}));
  cr->add_option("--L", cr_L, "lookahead window")->required();
  cr->add_flag("--dense", cr_dense, "fixed mode with r = 1 on every available action");
  cr->add_option("--cap", cr_cap, "enumeration cap for the worst case");
  cr->add_flag("--heuristic", cr_heuristic, "local search instead of enumeration");
  cr->add_option("--restarts", cr_restarts, "heuristic restarts");
  cr->add_option("--seed", cr_seed, "heuristic seed");
  cr->add_option("--csv", cr_csv, "also write a CSV row to this file");
  cr->callback([&] {
    Environment env = cr_env.load();
    const auto start = std::chrono::steady_clock::now();
    CRReport report;
    if (cr_mode == "fixed") {
      if (cr_dense) report = cr_fixed(env.mdp, RewardSpec::deterministic(dense_ones(env.mdp)), cr_L);
      else report = cr_fixed(env.mdp, rewards_or_fail(env), cr_L);
    } else {
      const bool stationary = cr_mode == "worst-r-stationary";
      report = cr_heuristic
                   ? cr_worst_expectations_heuristic(env.mdp, cr_L, stationary, cr_restarts, cr_seed)
                   : cr_worst_expectations(env.mdp, cr_L, stationary, {cr_cap});
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    emit(out, to_json(report));
    if (!cr_csv.empty()) {
      double upper = std::numeric_limits<double>::infinity();
      for (const auto& b : report.upper_bounds) upper = std::min(upper, b.value);
      CsvTable t{{"S", "A", "H", "L", "mode", "value", "lower_bound", "upper_bound", "runtime_ms"},
                 {{std::to_string(env.mdp.num_states()), std::to_string(env.mdp.num_actions()),
                   std::to_string(env.mdp.horizon()), std::to_string(cr_L), cr_mode,
                   format_number(report.ratio), format_number(report.lower_bound),
                   format_number(upper), format_number(ms)}}};
      std::ostringstream s;
      t.write(s);
      write_text(cr_csv, s.str(), out);
    }
  });

  // reach
  auto* reach = app.add_subcommand("reach", "optimal reaching probabilities");
  EnvArgs reach_env;
  reach_env.add(reach);
  reach->callback([&] {
    Environment env = reach_env.load();
    emit(out, to_json(ReachTable(env.mdp)));
  });

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo estimates");
  EnvArgs sim_env;
  sim_env.add(sim);
  std::string agent = "no-lookahead", traces_path, policy_path;
  std::uint64_t episodes = 10000, seed = 0;
  std::size_t max_traces = 100;
  int sim_L = 1, tree_A = 3, tree_H = 9;
  sim->add_option("--agent", agent, "greedy-lookahead | no-lookahead | transition-lookahead")
      ->check(CLI::IsMember({"greedy-lookahead", "no-lookahead", "transition-lookahead"}));
  sim->add_option("--episodes", episodes, "episode count")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "seed");
  sim->add_option("--L", sim_L, "lookahead window for greedy-lookahead");
  sim->add_option("--policy", policy_path, "base policy JSON (uniform by default)");
  sim->add_option("--traces", traces_path, "JSONL trace dump");
  sim->add_option("--max-traces", max_traces, "traces to dump");
  sim->add_option("--A", tree_A, "actions of the transition-lookahead tree");
  sim->add_option("--H", tree_H, "horizon of the transition-lookahead tree");
  sim->callback([&] {
    if (agent == "transition-lookahead") {
      const auto e = simulate_transition_lookahead(tree_A, tree_H, episodes, seed);
      emit(out, Json{{"V0", to_json(e.no_lookahead)},
                     {"V1", to_json(e.one_step)},
                     {"ratio", e.ratio},
                     {"ratio_std_error", e.ratio_std_error},
                     {"leaves", e.leaves}});
      return;
    }
    Environment env = sim_env.load();
    const RewardSpec rewards = rewards_or_fail(env);
    std::vector<EpisodeTrace> traces;
    MCEstimate est;
    if (agent == "no-lookahead") {
      const MarkovPolicy pi = policy_path.empty()
                                  ? optimal_value_no_lookahead(env.mdp, rewards).policy
                                  : policy_from_json(read_json_file(policy_path));
      est = simulate_policy(env.mdp, rewards, pi, episodes, seed);
      if (!traces_path.empty())
        for (std::uint64_t e = 0; e < std::min<std::uint64_t>(episodes, max_traces); ++e)
          traces.push_back(sample_episode(env.mdp, rewards, pi, seed, e));
    } else {
      const MarkovPolicy base = policy_path.empty() ? MarkovPolicy::uniform(env.mdp)
                                                    : policy_from_json(read_json_file(policy_path));
      est = simulate_greedy_lookahead(env.mdp, rewards, sim_L, base, episodes, seed,
                                      traces_path.empty() ? nullptr : &traces, max_traces);
    }
    emit(out, to_json(est));
    if (!traces_path.empty()) {
      std::ostringstream s;
      for (const auto& t : traces) s << to_json(t).dump() << "\n";
      write_text(traces_path, s.str(), out);
    }
  });

  // reproduce
  auto* repro = app.add_subcommand("reproduce", "closed-form examples as a CSV report");
  std::string section, repro_out;
  repro->add_option("section", section, "bandit | chain | grid | tree | ergodic | transition | all")
      ->required();
  repro->add_option("--out", repro_out, "output CSV (stdout by default)");
  repro->callback([&] {
    std::vector<ReproRow> rows;
    if (section == "all") {
      for (const auto& s : reproduce_sections()) {
        auto r = reproduce(s);
        rows.insert(rows.end(), r.begin(), r.end());
      }
    } else {
      rows = reproduce(section);
    }
    std::ostringstream s;
    reproduce_table(rows).write(s);
    write_text(repro_out, s.str(), out);
    for (const auto& r : rows)
      if (!r.pass) code = kExitFailure;
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "CR grid over environments, windows and modes");
  std::string sweep_config, sweep_out;
  sweep->add_option("--config", sweep_config, "sweep config JSON")->required();
  sweep->add_option("--out", sweep_out, "output CSV (stdout by default)");
  sweep->callback([&] {
    std::ifstream f(sweep_config);
    if (!f) throw ConfigError(0, "cannot open '" + sweep_config + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    std::ostringstream s;
    run_sweep(parse_sweep_config(buf.str())).write(s);
    write_text(sweep_out, s.str(), out);
  });

  // check
  auto* check = app.add_subcommand("check", "invariant suites");
  std::string level = "fast", check_mdp;
  check->add_option("--level", level, "fast | full")->check(CLI::IsMember({"fast", "full"}));
  check->add_option("--mdp", check_mdp, "also check this MDP or environment file");
  check->callback([&] {
    const CheckReport r = run_check(level, check_mdp);
    const std::size_t shown = std::min<std::size_t>(r.failures.size(), 20);
    for (std::size_t k = 0; k < shown; ++k) err << "FAIL " << r.failures[k] << "\n";
    out << r.checks << " checks, " << r.failures.size() << " failures\n";
    if (!r.failures.empty()) code = kExitFailure;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CapExceeded& e) {
    err << "cap exceeded: " << e.what() << "\n";
    return kExitCap;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DimensionError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitFailure;
  } catch (const ValidationFailure& e) {
    err << "validation failed: " << e.what() << "\n";
    return kExitFailure;
  } catch (const Json::exception& e) {
    err << "invalid JSON: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return code;
}

}  // namespace lookahead::cli
