#include "lookahead/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace lookahead {
namespace {

std::size_t dim(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long>() < 1)
    throw DimensionError(std::string("missing or invalid '") + key + "'");
  return j[key].get<std::size_t>();
}

template <typename F>
void expect_array(const Json& j, std::size_t n, const std::string& what, F&& each) {
  if (!j.is_array() || j.size() != n)
    throw DimensionError(what + " must be an array of length " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) each(i, j[i]);
}

Array3 read3(const Json& j, std::size_t H, std::size_t S, std::size_t A, const std::string& what) {
  Array3 out({H, S, A});
  expect_array(j, H, what, [&](std::size_t h, const Json& jh) {
    expect_array(jh, S, what + "[h]", [&](std::size_t s, const Json& js) {
      expect_array(js, A, what + "[h][s]", [&](std::size_t a, const Json& v) {
        out(h, s, a) = v.get<double>();
      });
    });
  });
  return out;
}

Json write3(const Array3& x) {
  Json out = Json::array();
  for (std::size_t h = 0; h < x.extent(0); ++h) {
    Json jh = Json::array();
    for (std::size_t s = 0; s < x.extent(1); ++s) {
      Json js = Json::array();
      for (std::size_t a = 0; a < x.extent(2); ++a) js.push_back(x(h, s, a));
      jh.push_back(std::move(js));
    }
    out.push_back(std::move(jh));
  }
  return out;
}

Json write2(const Array2& x) {
  Json out = Json::array();
  for (std::size_t h = 0; h < x.extent(0); ++h) {
    Json row = Json::array();
    for (std::size_t s = 0; s < x.extent(1); ++s) row.push_back(x(h, s));
    out.push_back(std::move(row));
  }
  return out;
}

Json finite_or_string(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

}  // namespace

Json to_json(const TabularMDP& mdp) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  Json P = Json::array();
  for (int h = 0; h < H; ++h) {
    Json jh = Json::array();
    for (int s = 0; s < S; ++s) {
      Json js = Json::array();
      for (int a = 0; a < A; ++a) {
        const auto row = mdp.next_state_row(h, s, a);
        js.push_back(std::vector<double>(row.begin(), row.end()));
      }
      jh.push_back(std::move(js));
    }
    P.push_back(std::move(jh));
  }
  Json out = {{"S", S}, {"A", A}, {"H", H}, {"mu", mdp.initial()}, {"P", std::move(P)},
              {"stationary", mdp.stationary_kernel()}};
  if (mdp.has_action_mask()) {
    Json m = Json::array();
    for (int h = 0; h < H; ++h) {
      Json jh = Json::array();
      for (int s = 0; s < S; ++s) {
        Json js = Json::array();
        for (int a = 0; a < A; ++a) js.push_back(mdp.available(h, s, a) ? 1 : 0);
        jh.push_back(std::move(js));
      }
      m.push_back(std::move(jh));
    }
    out["available"] = std::move(m);
  }
  return out;
}

TabularMDP mdp_from_json(const Json& j) {
  if (!j.is_object()) throw DimensionError("MDP document must be an object");
  const std::size_t S = dim(j, "S"), A = dim(j, "A"), H = dim(j, "H");
  if (!j.contains("mu") || !j.contains("P")) throw DimensionError("MDP needs 'mu' and 'P'");
  std::vector<double> mu;
  expect_array(j["mu"], S, "mu", [&](std::size_t, const Json& v) { mu.push_back(v.get<double>()); });
  Array4 P({H, S, A, S});
  expect_array(j["P"], H, "P", [&](std::size_t h, const Json& jh) {
    expect_array(jh, S, "P[h]", [&](std::size_t s, const Json& js) {
      expect_array(js, A, "P[h][s]", [&](std::size_t a, const Json& ja) {
        expect_array(ja, S, "P[h][s][a]", [&](std::size_t n, const Json& v) {
          P(h, s, a, n) = v.get<double>();
        });
      });
    });
  });
  ActionMask mask;
  if (j.contains("available")) {
    mask = ActionMask({H, S, A}, 0);
    const Array3 m = read3(j["available"], H, S, A, "available");
    for (std::size_t k = 0; k < m.size(); ++k) mask.flat()[k] = m.flat()[k] != 0.0;
  }
  const bool stationary = j.value("stationary", false);
  return TabularMDP(int(S), int(A), int(H), std::move(P), std::move(mu), stationary, std::move(mask));
}

Json to_json(const RewardSpec& r) {
  Json out = {{"family", to_string(r.family())}, {"r", write3(r.expectation())},
              {"stationary", r.stationary()}};
  if (r.family() == RewardFamily::kLongShot) out["epsilon"] = r.epsilon();
  if (r.family() == RewardFamily::kFiniteSupport) {
    const auto& e = r.finite_entries();
    Json entries = Json::array();
    for (std::size_t h = 0; h < e.extent(0); ++h) {
      Json jh = Json::array();
      for (std::size_t s = 0; s < e.extent(1); ++s) {
        Json js = Json::array();
        for (std::size_t a = 0; a < e.extent(2); ++a) {
          Json vals = Json::array(), probs = Json::array();
          for (const auto& o : e(h, s, a)) {
            vals.push_back(o.value);
            probs.push_back(o.prob);
          }
          js.push_back({{"values", vals}, {"probs", probs}});
        }
        jh.push_back(std::move(js));
      }
      entries.push_back(std::move(jh));
    }
    out["entries"] = std::move(entries);
  }
  return out;
}

RewardSpec rewards_from_json(const Json& j) {
  if (!j.is_object()) throw DimensionError("reward document must be an object");
  const std::string family = j.value("family", "deterministic");
  const bool stationary = j.value("stationary", false);
  if (family != "finite_support" && family != "longshot" && family != "deterministic")
    throw DomainError("unknown reward family '" + family + "'");
  if (family == "finite_support") {
    const Json& e = j.at("entries");
    if (!e.is_array() || e.empty() || !e[0].is_array() || e[0].empty() || !e[0][0].is_array())
      throw DimensionError("entries must be a [h][s][a] array");
    const std::size_t H = e.size(), S = e[0].size(), A = e[0][0].size();
    DenseArray<std::vector<Outcome>, 3> entries({H, S, A});
    expect_array(e, H, "entries", [&](std::size_t h, const Json& jh) {
      expect_array(jh, S, "entries[h]", [&](std::size_t s, const Json& js) {
        expect_array(js, A, "entries[h][s]", [&](std::size_t a, const Json& ja) {
          const auto vals = ja.at("values").get<std::vector<double>>();
          const auto probs = ja.at("probs").get<std::vector<double>>();
          if (vals.size() != probs.size()) throw DimensionError("values and probs differ in length");
          for (std::size_t k = 0; k < vals.size(); ++k) entries(h, s, a).push_back({vals[k], probs[k]});
        });
      });
    });
    return RewardSpec::finite_support(std::move(entries), stationary);
  }
  const Json& r = j.at("r");
  if (!r.is_array() || r.empty() || !r[0].is_array() || r[0].empty() || !r[0][0].is_array())
    throw DimensionError("r must be a [h][s][a] array");
  Array3 x = read3(r, r.size(), r[0].size(), r[0][0].size(), "r");
  if (family == "longshot") return RewardSpec::long_shot(std::move(x), j.at("epsilon").get<double>(), stationary);
  return RewardSpec::deterministic(std::move(x), stationary);
}

Json to_json(const MarkovPolicy& p) {
  if (p.empty()) return nullptr;
  Json out = {{"H", p.horizon()}, {"S", p.num_states()}, {"A", p.num_actions()},
              {"pi", write3(p.probs())}, {"deterministic", p.deterministic()}};
  if (p.deterministic()) {
    Json act = Json::array();
    for (int h = 0; h < p.horizon(); ++h) {
      Json row = Json::array();
      for (int s = 0; s < p.num_states(); ++s) row.push_back(p.action(h, s));
      act.push_back(std::move(row));
    }
    out["actions"] = std::move(act);
  }
  return out;
}

MarkovPolicy policy_from_json(const Json& j) {
  const std::size_t H = dim(j, "H"), S = dim(j, "S"), A = dim(j, "A");
  return MarkovPolicy(read3(j.at("pi"), H, S, A, "pi"));
}

Json to_json(const ReachTable& reach) {
  const int H = reach.horizon(), S = reach.num_states();
  Json u = Json::array();
  for (int h = 0; h < H; ++h) {
    Json jh = Json::array();
    for (int s = 0; s < S; ++s) {
      Json js = Json::array();
      for (int t = 0; t <= h; ++t) {
        Json row = Json::array();
        for (int n = 0; n < S; ++n) row.push_back(reach.conditional(h, s, t, n));
        js.push_back(std::move(row));
      }
      jh.push_back(std::move(js));
    }
    u.push_back(std::move(jh));
  }
  return {{"H", H}, {"S", S}, {"d_star", write2(reach.optimal())}, {"conditional", std::move(u)}};
}

Json to_json(const CRReport& r) {
  Json uppers = Json::array();
  for (const auto& b : r.upper_bounds) uppers.push_back({{"name", b.name}, {"value", finite_or_string(b.value)}});
  return {{"mode", to_string(r.mode)},
          {"L", r.window},
          {"numerator", finite_or_string(r.numerator)},
          {"denominator", finite_or_string(r.denominator)},
          {"ratio", finite_or_string(r.ratio)},
          {"degenerate", r.degenerate},
          {"certified", r.certified},
          {"lower_bound", r.lower_bound},
          {"upper_bounds", std::move(uppers)},
          {"candidates", r.candidates},
          {"minimizer_ties", r.minimizer_ties},
          {"witness_no_lookahead", to_json(r.witness_no_lookahead)},
          {"witness_lookahead_base", to_json(r.witness_lookahead_base)}};
}

Json to_json(const MCEstimate& e) {
  return {{"mean", e.mean}, {"std_error", e.std_error}, {"episodes", e.episodes},
          {"confidence", e.confidence}, {"ci_low", e.ci_low()}, {"ci_high", e.ci_high()}};
}

Json to_json(const EpisodeTrace& t) {
  return {{"seed", t.seed}, {"episode", t.episode}, {"states", t.states},
          {"actions", t.actions}, {"rewards", t.rewards}, {"total", t.total}};
}

Json to_json(const EnvDescriptor& d) {
  Json bounds = Json::array();
  for (const auto& b : d.expected_bounds) bounds.push_back({{"name", b.name}, {"value", finite_or_string(b.value)}});
  return {{"kind", to_string(d.kind)}, {"params", d.params}, {"S", d.S}, {"A", d.A}, {"H", d.H},
          {"expected_bounds", std::move(bounds)}};
}

Json to_json(const Environment& env) {
  return {{"mdp", to_json(env.mdp)},
          {"rewards", env.rewards ? to_json(*env.rewards) : Json(nullptr)},
          {"descriptor", to_json(env.descriptor)}};
}

Environment environment_from_json(const Json& j) {
  Environment env;
  if (j.is_object() && j.contains("mdp")) {
    env.mdp = mdp_from_json(j["mdp"]);
    if (j.contains("rewards") && !j["rewards"].is_null()) env.rewards = rewards_from_json(j["rewards"]);
    if (j.contains("descriptor")) {
      const Json& d = j["descriptor"];
      env.descriptor.kind = env_kind_from_string(d.value("kind", "random"));
      if (d.contains("params")) env.descriptor.params = d["params"].get<std::map<std::string, double>>();
      if (d.contains("expected_bounds"))
        for (const auto& b : d["expected_bounds"])
          if (b["value"].is_number())
            env.descriptor.expected_bounds.push_back({b.value("name", ""), b["value"].get<double>()});
    }
  } else {
    env.mdp = mdp_from_json(j);
  }
  env.descriptor.S = env.mdp.num_states();
  env.descriptor.A = env.mdp.num_actions();
  env.descriptor.H = env.mdp.horizon();
  return env;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return Json::parse(buf.str());
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace lookahead
