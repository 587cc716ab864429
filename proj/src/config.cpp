#include "rdlab/config.hpp"

#include <json.hpp>

#include "rdlab/errors.hpp"
#include "rdlab/io.hpp"

namespace rdlab {

namespace {

using nlohmann::json;

json model_json(const ModelConfig& m) {
  return json{{"n", m.n}, {"chi", m.chi}, {"lambda", m.lambda}};
}

json sim_json(const SimConfig& c) {
  return json{{"model", model_json(c.model)},
              {"equation", c.equation},
              {"dx", c.dx},
              {"cfl", c.cfl},
              {"window_left", c.window_left},
              {"window_right", c.window_right},
              {"init", c.init},
              {"init_x0", c.init_x0},
              {"init_width", c.init_width},
              {"init_gamma", c.init_gamma},
              {"init_a", c.init_a},
              {"t_end", c.t_end},
              {"snapshot_times", c.snapshot_times},
              {"front_sample_dt", c.front_sample_dt},
              {"front_level", c.front_level}};
}

ConfigEcho finish(json physics, const std::string& subcommand,
                  const CliContext& ctx, bool seed_matters) {
  physics["subcommand"] = subcommand;
  if (seed_matters) physics["seed"] = ctx.seed;
  json echo = physics;
  echo["out"] = ctx.out;
  echo["workers"] = ctx.workers;
  if (!seed_matters) echo["seed"] = ctx.seed;
  return ConfigEcho{echo.dump(), physics.dump()};
}

void append_toml_value(std::string& out, const json& v,
                       const std::string& key) {
  if (v.is_string()) {
    out += '"';
    for (char ch : v.get<std::string>()) {
      if (ch == '"' || ch == '\\') out += '\\';
      out += ch;
    }
    out += '"';
  } else if (v.is_boolean()) {
    out += v.get<bool>() ? "true" : "false";
  } else if (v.is_number()) {
    out += v.dump();
  } else if (v.is_array()) {
    out += '[';
    bool first = true;
    for (const json& e : v) {
      if (!first) out += ", ";
      first = false;
      if (e.is_object() || e.is_array())
        throw ConfigError("json config: nested arrays/objects under '" + key +
                          "' have no TOML mirror");
      append_toml_value(out, e, key);
    }
    out += ']';
  } else {
    throw ConfigError("json config: unsupported value type for '" + key + "'");
  }
}

}  // namespace

NonlinearityModel build_model(const ModelConfig& m) {
  return build_power_family(m.n, m.chi, m.lambda);
}

Equation parse_equation(const std::string& name) {
  if (name == "rde") return Equation::RDE;
  if (name == "rcl") return Equation::RCL;
  throw ConfigError("unknown equation '" + name + "' (rde | rcl)");
}

InitialSpec parse_initial(const SimConfig& cfg) {
  InitialSpec init;
  if (cfg.init == "sharp-step") {
    init.kind = InitialSpec::Kind::SharpStep;
  } else if (cfg.init == "steep-step") {
    init.kind = InitialSpec::Kind::SteepStep;
  } else if (cfg.init == "scaled-wave") {
    init.kind = InitialSpec::Kind::ScaledWave;
  } else if (cfg.init == "exact-wave") {
    init.kind = InitialSpec::Kind::ExactWave;
  } else {
    throw ConfigError("unknown initial data '" + cfg.init +
                      "' (sharp-step | steep-step | scaled-wave | exact-wave)");
  }
  init.x0 = cfg.init_x0;
  init.width = cfg.init_width;
  init.gamma = cfg.init_gamma;
  init.a = cfg.init_a;
  return init;
}

RunConfig to_run_config(const SimConfig& cfg) {
  RunConfig rc;
  rc.equation = parse_equation(cfg.equation);
  rc.dx = cfg.dx;
  rc.cfl = cfg.cfl;
  rc.window = WindowSpec{cfg.window_left, cfg.window_right};
  rc.init = parse_initial(cfg);
  rc.t_end = cfg.t_end;
  rc.snapshot_times = cfg.snapshot_times;
  rc.front_sample_dt = cfg.front_sample_dt;
  rc.front_level = cfg.front_level;
  return rc;
}

ConfigEcho echo_config(const SpeedConfig& cfg, const CliContext& ctx) {
  return finish(json{{"n", cfg.n}, {"lambda", cfg.lambda}, {"chis", cfg.chis}},
                "speed", ctx, false);
}

ConfigEcho echo_config(const WaveConfig& cfg, const CliContext& ctx) {
  return finish(json{{"model", model_json(cfg.model)},
                     {"c", cfg.c},
                     {"left", cfg.left},
                     {"right", cfg.right},
                     {"dx", cfg.dx}},
                "wave", ctx, false);
}

ConfigEcho echo_config(const SimConfig& cfg, const CliContext& ctx,
                       const std::string& subcommand) {
  return finish(sim_json(cfg), subcommand, ctx, false);
}

ConfigEcho echo_config(const FrontFitConfig& cfg, const CliContext& ctx) {
  return finish(json{{"traj", cfg.traj},
                     {"window_lo", cfg.window_lo},
                     {"window_hi", cfg.window_hi}},
                "front-fit", ctx, false);
}

ConfigEcho echo_config(const VotingConfig& cfg, const CliContext& ctx) {
  return finish(json{{"n", cfg.n},
                     {"gamma", cfg.gamma},
                     {"beta", cfg.beta},
                     {"t", cfg.t},
                     {"xs", cfg.xs},
                     {"n_paths", cfg.n_paths},
                     {"g_step_x0", cfg.g_step_x0},
                     {"compare", cfg.compare},
                     {"pde_dx", cfg.pde_dx}},
                "voting-mc", ctx, true);
}

ConfigEcho echo_config(const SweepConfig& cfg, const CliContext& ctx) {
  json j = sim_json(cfg.base);
  j["chis"] = cfg.chis;
  j["fit_lo"] = cfg.fit_lo;
  j["fit_hi"] = cfg.fit_hi;
  return finish(std::move(j), "sweep", ctx, false);
}

std::string config_hash(const std::string& hash_source) {
  return "fnv64:" + hex64(fnv1a64(hash_source));
}

std::string json_config_to_toml(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed json config: ") + e.what());
  }
  if (!doc.is_object())
    throw ConfigError("json config: top level must be an object");

  std::string out;
  // Top-level scalars first (TOML forbids bare keys after a section).
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object()) continue;
    out += key;
    out += " = ";
    append_toml_value(out, value, key);
    out += '\n';
  }
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_object()) continue;
    out += '[';
    out += key;
    out += "]\n";
    for (const auto& [k2, v2] : value.items()) {
      if (v2.is_object())
        throw ConfigError("json config: section '" + key + "." + k2 +
                          "' nests deeper than one level");
      out += k2;
      out += " = ";
      append_toml_value(out, v2, key + "." + k2);
      out += '\n';
    }
  }
  return out;
}

}  // namespace rdlab
