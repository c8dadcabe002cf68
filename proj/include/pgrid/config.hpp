// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "finite.hpp"
#include "montecarlo.hpp"
#include "series.hpp"

namespace pgrid {

struct config_error : domain_error {
  using domain_error::domain_error;
};

enum class ScenarioKind { Infinite, FiniteBuilding, SemiInfinite, WindowOffice };

inline const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Infinite: return "infinite";
    case ScenarioKind::FiniteBuilding: return "finite";
    case ScenarioKind::SemiInfinite: return "semi_infinite";
    case ScenarioKind::WindowOffice: return "window";
  }
  return "?";
}

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Infinite;
  BuildingExtents extents;
  OobInterference oob;
  double d = 3.0;            // semi-infinite depth
  double level_base = 0.5;   // window office: l_m = base^m
  double lw = 0.5;
};

struct RunConfig {
  GridParams params = GridParams::uniform(3, 1.0, 0.1, 0.1);
  SeriesControl series;
  SimConfig sim;
  ScenarioConfig scenario;
  Channel channel = Channel::Rayleigh;
  std::vector<double> theta_db{-10, -5, 0, 5, 10, 15, 20};
  std::vector<double> s{0.1, 1.0, 10.0};
  RoomIndex room = RoomIndex::origin(3);
  double nu = 1.0;
  double sigma2 = 0.0;
  std::string output;

  void validate() const {
    try {
      params.validate();
      series.validate();
      sim.validate();
      scenario.extents.validate();
      scenario.oob.validate();
    } catch (const domain_error& e) {
      throw config_error(e.what());
    }
    if (room.dim() != params.dim()) throw config_error("config: room dimension does not match params");
    if (!(nu > 0.0)) throw config_error("config: nu must be > 0");
    if (!(sigma2 >= 0.0)) throw config_error("config: sigma2 must be >= 0");
    for (double x : s)
      if (!(x >= 0.0) || !std::isfinite(x)) throw config_error("config: s values must be finite and >= 0");
    for (double x : theta_db)
      if (!std::isfinite(x)) throw config_error("config: theta_db values must be finite");
    if (scenario.kind != ScenarioKind::Infinite && params.dim() != 3)
      throw config_error("config: building scenarios require n = 3");
    if (!(scenario.d > 0.0)) throw config_error("config: scenario.d must be > 0");
    if (!(scenario.level_base >= 0.0 && scenario.level_base < 1.0))
      throw config_error("config: scenario.level_base must lie in [0,1)");
    if (!(scenario.lw >= 0.0 && scenario.lw <= 1.0)) throw config_error("config: scenario.lw must lie in [0,1]");
  }

  std::vector<double> thetas() const {
    std::vector<double> t;
    for (double x : theta_db) t.push_back(db_to_linear(x));
    return t;
  }

  WindowModel window() const { return WindowModel::geometric(scenario.level_base, scenario.lw); }
};

namespace detail {

using nlohmann::json;

inline void only_keys(const json& j, const char* where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw config_error(std::string("config: ") + where + " must be an object");
  const std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw config_error(std::string("config: unknown key '") + k + "' in " + where);
}

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw config_error(std::string("config: bad value for '") + key + "'");
  }
}

inline std::array<double, 6> six(const json& j, const char* key) {
  const auto v = j.at(key);
  if (!v.is_array() || v.size() != 6) throw config_error(std::string("config: '") + key + "' needs 6 entries");
  std::array<double, 6> out{};
  for (std::size_t i = 0; i < 6; ++i) {
    if (v[i].is_null() || (v[i].is_string() && v[i].get<std::string>() == "inf"))
      out[i] = kInf;
    else if (v[i].is_number())
      out[i] = v[i].get<double>();
    else
      throw config_error(std::string("config: bad entry in '") + key + "'");
  }
  return out;
}

inline json six_json(const std::array<double, 6>& a) {
  json out = json::array();
  for (double x : a) out.push_back(std::isinf(x) ? json("inf") : json(x));
  return out;
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
  using detail::get_as;
  detail::only_keys(j, "config",
                    {"params", "series", "sim", "scenario", "channel", "theta_db", "s", "room", "nu", "sigma2",
                     "output"});
  RunConfig c;
  if (j.contains("params")) {
    const auto& p = j["params"];
    detail::only_keys(p, "params", {"mu", "lambda", "k", "k_db"});
    if (p.contains("k") && p.contains("k_db")) throw config_error("config: give either params.k or params.k_db");
    GridParams g;
    g.mu = get_as<std::vector<double>>(p, "mu");
    g.lambda = get_as<std::vector<double>>(p, "lambda");
    if (p.contains("k_db")) {
      for (const auto& x : p["k_db"]) {
        if (x.is_string() && x.get<std::string>() == "-inf")
          g.k.push_back(0.0);
        else if (x.is_number())
          g.k.push_back(db_to_linear(x.get<double>()));
        else
          throw config_error("config: bad entry in params.k_db");
      }
    } else {
      g.k = get_as<std::vector<double>>(p, "k");
    }
    c.params = g;
    c.room = RoomIndex::origin(g.dim());
  }
  if (j.contains("series")) {
    const auto& s = j["series"];
    detail::only_keys(s, "series", {"radius", "tol", "max_radius"});
    if (s.contains("radius")) c.series.radius = get_as<int>(s, "radius");
    if (s.contains("tol")) c.series.tol = get_as<double>(s, "tol");
    if (s.contains("max_radius")) c.series.max_radius = get_as<int>(s, "max_radius");
  }
  if (j.contains("sim")) {
    const auto& s = j["sim"];
    detail::only_keys(s, "sim",
                      {"samples", "seed", "window_halfwidth", "tail_fraction", "batch_size", "workers", "perspective"});
    if (s.contains("samples")) c.sim.samples = get_as<long>(s, "samples");
    if (s.contains("seed")) c.sim.seed = get_as<std::uint64_t>(s, "seed");
    if (s.contains("window_halfwidth")) c.sim.window_halfwidth = get_as<int>(s, "window_halfwidth");
    if (s.contains("tail_fraction")) c.sim.tail_fraction = get_as<double>(s, "tail_fraction");
    if (s.contains("batch_size")) c.sim.batch_size = get_as<long>(s, "batch_size");
    if (s.contains("workers")) c.sim.workers = get_as<unsigned>(s, "workers");
    if (s.contains("perspective")) {
      const auto v = get_as<std::string>(s, "perspective");
      if (v == "room")
        c.sim.perspective = Perspective::TypicalRoom;
      else if (v == "user")
        c.sim.perspective = Perspective::TypicalUser;
      else
        throw config_error("config: sim.perspective must be 'room' or 'user'");
    }
  }
  if (j.contains("scenario")) {
    const auto& s = j["scenario"];
    detail::only_keys(s, "scenario", {"kind", "extents", "oob", "d", "level_base", "lw", "lw_db"});
    const auto kind = s.contains("kind") ? get_as<std::string>(s, "kind") : "infinite";
    if (kind == "infinite")
      c.scenario.kind = ScenarioKind::Infinite;
    else if (kind == "finite")
      c.scenario.kind = ScenarioKind::FiniteBuilding;
    else if (kind == "semi_infinite")
      c.scenario.kind = ScenarioKind::SemiInfinite;
    else if (kind == "window")
      c.scenario.kind = ScenarioKind::WindowOffice;
    else
      throw config_error("config: unknown scenario.kind '" + kind + "'");
    if (s.contains("extents")) c.scenario.extents.d = detail::six(s, "extents");
    if (s.contains("oob")) c.scenario.oob.power = detail::six(s, "oob");
    if (s.contains("d")) c.scenario.d = get_as<double>(s, "d");
    if (s.contains("level_base")) c.scenario.level_base = get_as<double>(s, "level_base");
    if (s.contains("lw") && s.contains("lw_db")) throw config_error("config: give either scenario.lw or scenario.lw_db");
    if (s.contains("lw")) c.scenario.lw = get_as<double>(s, "lw");
    if (s.contains("lw_db")) c.scenario.lw = db_to_linear(get_as<double>(s, "lw_db"));
  }
  if (j.contains("channel")) {
    const auto v = get_as<std::string>(j, "channel");
    if (v == "rayleigh")
      c.channel = Channel::Rayleigh;
    else if (v == "nofading")
      c.channel = Channel::NoFading;
    else
      throw config_error("config: channel must be 'rayleigh' or 'nofading'");
  }
  if (j.contains("theta_db")) c.theta_db = get_as<std::vector<double>>(j, "theta_db");
  if (j.contains("s")) c.s = get_as<std::vector<double>>(j, "s");
  if (j.contains("room")) c.room = RoomIndex{get_as<std::vector<long>>(j, "room")};
  if (j.contains("nu")) c.nu = get_as<double>(j, "nu");
  if (j.contains("sigma2")) c.sigma2 = get_as<double>(j, "sigma2");
  if (j.contains("output")) c.output = get_as<std::string>(j, "output");
  c.validate();
  return c;
}

// Fully resolved document; parses back to the same config.
inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["params"] = {{"mu", c.params.mu}, {"lambda", c.params.lambda}, {"k", c.params.k}};
  j["series"] = {{"radius", c.series.radius}, {"tol", c.series.tol}, {"max_radius", c.series.max_radius}};
  j["sim"] = {{"samples", c.sim.samples},
              {"seed", c.sim.seed},
              {"window_halfwidth", c.sim.window_halfwidth},
              {"tail_fraction", c.sim.tail_fraction},
              {"batch_size", c.sim.batch_size},
              {"workers", c.sim.workers},
              {"perspective", to_string(c.sim.perspective)}};
  j["scenario"] = {{"kind", to_string(c.scenario.kind)},
                   {"extents", detail::six_json(c.scenario.extents.d)},
                   {"oob", detail::six_json(c.scenario.oob.power)},
                   {"d", c.scenario.d},
                   {"level_base", c.scenario.level_base},
                   {"lw", c.scenario.lw}};
  j["channel"] = to_string(c.channel);
  j["theta_db"] = c.theta_db;
  j["s"] = c.s;
  j["room"] = c.room.idx;
  j["nu"] = c.nu;
  j["sigma2"] = c.sigma2;
  j["output"] = c.output;
  return j;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error(std::string("config: parse error: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace pgrid
