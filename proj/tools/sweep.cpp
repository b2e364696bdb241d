#include <algorithm>
#include <chrono>
#include <cmath>

#include "commands.hpp"
#include "lookahead/cr_solver.hpp"

namespace lookahead::cli {

namespace {

int line_of(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + int(std::count(text.begin(), text.begin() + long(offset), '\n'));
}

// Offsets of the objects directly inside the "envs" array, found by a scan
// that skips string contents.
std::vector<std::size_t> env_offsets(const std::string& text) {
  std::vector<std::size_t> out;
  const std::size_t key = text.find("\"envs\"");
  if (key == std::string::npos) return out;
  std::size_t i = text.find('[', key);
  if (i == std::string::npos) return out;
  int depth = 0;
  bool in_string = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '[' || c == '{') {
      if (depth == 1 && c == '{') out.push_back(i);
      ++depth;
    } else if (c == ']' || c == '}') {
      if (--depth == 0) break;
    }
  }
  return out;
}

int key_line(const std::string& text, const std::string& key) {
  const std::size_t at = text.find("\"" + key + "\"");
  return at == std::string::npos ? 1 : line_of(text, at);
}

}  // namespace

SweepConfig parse_sweep_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(line_of(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
  }
  if (!j.is_object()) throw ConfigError(1, "config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "envs" && it.key() != "lookaheads" && it.key() != "modes" &&
        it.key() != "rewards" && it.key() != "timing")
      throw ConfigError(key_line(text, it.key()), "unknown key '" + it.key() + "'");

  SweepConfig c;
  if (!j.contains("envs") || !j["envs"].is_array())
    throw ConfigError(key_line(text, "envs"), "'envs' must be an array");
  const auto offsets = env_offsets(text);
  for (std::size_t k = 0; k < j["envs"].size(); ++k) {
    const Json& e = j["envs"][k];
    const int line = k < offsets.size() ? line_of(text, offsets[k]) : key_line(text, "envs");
    if (!e.is_object()) throw ConfigError(line, "env entry must be an object");
    SweepEnv env;
    env.line = line;
    if (e.contains("path")) {
      if (!e["path"].is_string()) throw ConfigError(line, "'path' must be a string");
      env.path = e["path"].get<std::string>();
    } else if (e.contains("kind") && e["kind"].is_string()) {
      env.kind = e["kind"].get<std::string>();
      try {
        env_kind_from_string(env.kind);
      } catch (const DomainError& err) {
        throw ConfigError(line, err.what());
      }
      if (e.contains("params")) {
        if (!e["params"].is_object()) throw ConfigError(line, "'params' must be an object");
        for (auto it = e["params"].begin(); it != e["params"].end(); ++it) {
          if (!it.value().is_number())
            throw ConfigError(line, "parameter '" + it.key() + "' must be a number");
          env.params[it.key()] = it.value().get<double>();
        }
      }
    } else {
      throw ConfigError(line, "env entry needs 'kind' or 'path'");
    }
    c.envs.push_back(std::move(env));
  }
  if (j.contains("lookaheads")) {
    const Json& l = j["lookaheads"];
    const int line = key_line(text, "lookaheads");
    if (l.is_string() && l.get<std::string>() == "all") {
    } else if (l.is_array()) {
      for (const auto& x : l) {
        if (!x.is_number_integer() || x.get<int>() < 0)
          throw ConfigError(line, "lookaheads must be nonnegative integers");
        c.lookaheads.push_back(x.get<int>());
      }
    } else {
      throw ConfigError(line, "'lookaheads' must be an array or \"all\"");
    }
  }
  if (j.contains("modes")) {
    const int line = key_line(text, "modes");
    if (!j["modes"].is_array()) throw ConfigError(line, "'modes' must be an array");
    c.modes.clear();
    for (const auto& m : j["modes"]) {
      const std::string s = m.is_string() ? m.get<std::string>() : "";
      if (s != "fixed" && s != "worst-r" && s != "worst-r-stationary")
        throw ConfigError(line, "unknown mode " + m.dump());
      c.modes.push_back(s);
    }
  }
  if (j.contains("rewards")) {
    const Json& r = j["rewards"];
    if (!r.is_string() || (r != "env" && r != "dense"))
      throw ConfigError(key_line(text, "rewards"), "'rewards' must be \"env\" or \"dense\"");
    c.rewards = r.get<std::string>();
  }
  if (j.contains("timing")) {
    if (!j["timing"].is_boolean()) throw ConfigError(key_line(text, "timing"), "'timing' must be a boolean");
    c.timing = j["timing"].get<bool>();
  }
  return c;
}

CsvTable run_sweep(const SweepConfig& c) {
  CsvTable t;
  t.header = {"env", "S", "A", "H", "L", "mode", "value", "lower_bound", "upper_bound"};
  if (c.timing) t.header.push_back("runtime_ms");
  for (const auto& e : c.envs) {
    Environment env;
    try {
      env = e.path.empty() ? make_environment(e.kind, e.params)
                           : environment_from_json(read_json_file(e.path));
    } catch (const CapExceeded&) {
      throw;
    } catch (const std::exception& err) {
      throw ConfigError(e.line, err.what());
    }
    const TabularMDP& m = env.mdp;
    const int H = m.horizon();
    std::vector<int> Ls = c.lookaheads;
    if (Ls.empty())
      for (int L = 1; L <= H; ++L) Ls.push_back(L);
    for (int L : Ls)
      if (L > H) throw ConfigError(e.line, "lookahead " + std::to_string(L) + " exceeds H");
    const std::string name = e.path.empty() ? e.kind : e.path;
    for (int L : Ls)
      for (const auto& mode : c.modes) {
        const auto start = std::chrono::steady_clock::now();
        CRReport rep;
        if (mode == "fixed") {
          if (c.rewards == "dense") {
            Array3 r({std::size_t(H), std::size_t(m.num_states()), std::size_t(m.num_actions())});
            for (int h = 0; h < H; ++h)
              for (int s = 0; s < m.num_states(); ++s)
                for (int a = 0; a < m.num_actions(); ++a) r(h, s, a) = m.available(h, s, a) ? 1.0 : 0.0;
            rep = cr_fixed(m, RewardSpec::deterministic(std::move(r)), L);
          } else {
            if (!env.rewards) throw ConfigError(e.line, "environment has no rewards for fixed mode");
            rep = cr_fixed(m, *env.rewards, L);
          }
        } else {
          rep = cr_worst_expectations(m, L, mode == "worst-r-stationary");
        }
        double upper = std::numeric_limits<double>::infinity();
        for (const auto& b : rep.upper_bounds) upper = std::min(upper, b.value);
        std::vector<std::string> row{name,
                                     std::to_string(m.num_states()),
                                     std::to_string(m.num_actions()),
                                     std::to_string(H),
                                     std::to_string(L),
                                     mode,
                                     format_number(rep.ratio),
                                     format_number(rep.lower_bound),
                                     format_number(upper)};
        if (c.timing)
          row.push_back(format_number(std::chrono::duration<double, std::milli>(
                                          std::chrono::steady_clock::now() - start)
                                          .count()));
        t.rows.push_back(std::move(row));
      }
  }
  return t;
}

}  // namespace lookahead::cli
