#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "daa/errors.hpp"
#include "daa/harness.hpp"

namespace daa {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

ObjectiveSpec objective_from_json(const json& j) {
  ObjectiveSpec spec;
  if (j.is_string()) {
    spec.kind = parse_objective_kind(j.get<std::string>());
    return spec;
  }
  if (!j.is_object()) throw ConfigError("objectives: entries must be names or objects");
  reject_unknown(j, {"kind", "beta", "gamma", "lambda", "normalize"}, "objective");
  spec.kind = parse_objective_kind(j.at("kind").get<std::string>());
  spec.beta = j.value("beta", spec.beta);
  spec.gamma = j.value("gamma", spec.gamma);
  spec.lambda = j.value("lambda", spec.lambda);
  if (j.contains("normalize")) spec.normalize = j.at("normalize").get<bool>();
  return spec;
}

json objective_to_json(const ObjectiveSpec& o) {
  json j{{"kind", std::string(to_string(o.kind))}, {"beta", o.beta}};
  if (o.kind == ObjectiveKind::SimPO) j["gamma"] = o.gamma;
  if (is_single_stage(o.kind)) j["lambda"] = o.lambda;
  if (o.normalize) j["normalize"] = *o.normalize;
  return j;
}

}  // namespace

SweepConfig SweepConfig::from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(root,
                 {"objectives", "hidden_sizes", "bias_strengths", "lr_grid", "n_seeds",
                  "n_pilot_seeds", "epochs", "data", "out_dir"},
                 "config");
  SweepConfig cfg;
  try {
    if (root.contains("objectives")) {
      cfg.objectives.clear();
      for (const auto& o : root.at("objectives")) cfg.objectives.push_back(objective_from_json(o));
    }
    if (root.contains("hidden_sizes")) {
      cfg.hidden_sizes = root.at("hidden_sizes").get<std::vector<std::size_t>>();
    }
    if (root.contains("bias_strengths")) {
      cfg.bias_strengths = root.at("bias_strengths").get<std::vector<double>>();
    }
    if (root.contains("lr_grid")) cfg.lr_grid = root.at("lr_grid").get<std::vector<double>>();
    if (root.contains("n_seeds")) cfg.n_seeds = root.at("n_seeds").get<std::size_t>();
    if (root.contains("n_pilot_seeds")) {
      cfg.n_pilot_seeds = root.at("n_pilot_seeds").get<std::size_t>();
    }
    if (root.contains("epochs")) cfg.epochs = root.at("epochs").get<int>();
    if (root.contains("out_dir")) cfg.out_dir = root.at("out_dir").get<std::string>();
    if (root.contains("data")) {
      const json& d = root.at("data");
      if (!d.is_object()) throw ConfigError("data must be an object");
      if (d.contains("bias_strength")) {
        throw ConfigError("data.bias_strength is set per cell; use bias_strengths");
      }
      reject_unknown(d, {"n_samples", "bias_threshold", "bt_temperature", "split_fraction", "seed"},
                     "data");
      cfg.data.n_samples = d.value("n_samples", cfg.data.n_samples);
      cfg.data.bias_threshold = d.value("bias_threshold", cfg.data.bias_threshold);
      cfg.data.bt_temperature = d.value("bt_temperature", cfg.data.bt_temperature);
      cfg.data.split_fraction = d.value("split_fraction", cfg.data.split_fraction);
      cfg.data.seed = d.value("seed", cfg.data.seed);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config has a value of the wrong type: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

SweepConfig SweepConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string SweepConfig::to_json() const {
  json objs = json::array();
  for (const auto& o : objectives) objs.push_back(objective_to_json(o));
  json j{
      {"objectives", objs},
      {"hidden_sizes", hidden_sizes},
      {"bias_strengths", bias_strengths},
      {"lr_grid", lr_grid},
      {"n_seeds", n_seeds},
      {"n_pilot_seeds", n_pilot_seeds},
      {"epochs", epochs},
      {"data",
       {{"n_samples", data.n_samples},
        {"bias_threshold", data.bias_threshold},
        {"bt_temperature", data.bt_temperature},
        {"split_fraction", data.split_fraction},
        {"seed", data.seed}}},
      {"out_dir", out_dir},
  };
  return j.dump(2);
}

}  // namespace daa
