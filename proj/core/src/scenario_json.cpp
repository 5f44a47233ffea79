#include <set>
#include <string>

#include <json.hpp>

#include "supportgraph/cells.hpp"
#include "supportgraph/errors.hpp"

namespace supportgraph {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownFields = {
    "type",       "n",     "shells",         "cell_radius", "domain_radius",
    "min_dist",   "sigma", "spacing",        "packing_fraction",
    "gamma_parallel", "gamma_perp", "gamma_med", "seed", "force_model"};

double number(const json& j, const char* field) {
  if (!j.is_number()) throw InputError(std::string("scenario: '") + field + "' must be a number");
  return j.get<double>();
}

std::size_t count(const json& j, const char* field) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw InputError(std::string("scenario: '") + field + "' must be a non-negative integer");
  return j.get<std::size_t>();
}

}  // namespace

ScenarioSpec parse_scenario_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("scenario: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("scenario: top level must be an object");
  for (const auto& [key, value] : doc.items())
    if (!kKnownFields.contains(key)) throw InputError("scenario: unknown field '" + key + "'");

  ScenarioSpec s;
  if (doc.contains("type")) {
    const auto& t = doc["type"];
    if (t == "random-sphere") s.type = ScenarioType::RandomSphere;
    else if (t == "hex-lattice") s.type = ScenarioType::HexLattice;
    else throw InputError("scenario: 'type' must be random-sphere or hex-lattice");
  }
  if (doc.contains("n")) s.n = count(doc["n"], "n");
  if (doc.contains("shells")) s.shells = count(doc["shells"], "shells");
  if (doc.contains("cell_radius")) s.cell_radius = number(doc["cell_radius"], "cell_radius");
  if (doc.contains("domain_radius")) s.domain_radius = number(doc["domain_radius"], "domain_radius");
  if (doc.contains("min_dist")) s.min_dist = number(doc["min_dist"], "min_dist");
  if (doc.contains("spacing")) s.spacing = number(doc["spacing"], "spacing");
  if (doc.contains("packing_fraction"))
    s.packing_fraction = number(doc["packing_fraction"], "packing_fraction");
  if (doc.contains("sigma")) s.sigma = number(doc["sigma"], "sigma");
  if (doc.contains("gamma_parallel"))
    s.friction.gamma_parallel = number(doc["gamma_parallel"], "gamma_parallel");
  if (doc.contains("gamma_perp")) s.friction.gamma_perp = number(doc["gamma_perp"], "gamma_perp");
  if (doc.contains("gamma_med")) s.friction.gamma_med = number(doc["gamma_med"], "gamma_med");
  if (doc.contains("seed")) {
    const auto& seed = doc["seed"];
    if (!seed.is_number_unsigned()) throw InputError("scenario: 'seed' must be a non-negative integer");
    s.seed = seed.get<std::uint64_t>();
  }
  if (doc.contains("force_model")) {
    if (!doc["force_model"].is_string()) throw InputError("scenario: 'force_model' must be a string");
    s.force_model = parse_force_model(doc["force_model"].get<std::string>());
  }

  s.friction.validate();
  if (!(s.cell_radius > 0.0)) throw InputError("scenario: 'cell_radius' must be positive");
  if (s.sigma < 0.0) throw InputError("scenario: 'sigma' must be >= 0");
  if (s.type == ScenarioType::RandomSphere && s.n == 0) throw InputError("scenario: 'n' must be >= 1");
  if (s.type == ScenarioType::HexLattice && s.shells == 0)
    throw InputError("scenario: 'shells' must be >= 1");
  return s;
}

std::string scenario_to_json(const ScenarioSpec& s) {
  json j;
  if (s.type == ScenarioType::RandomSphere) {
    j["type"] = "random-sphere";
    j["n"] = s.n;
    j["domain_radius"] = s.resolved_domain_radius();
    j["min_dist"] = s.resolved_min_dist();
  } else {
    j["type"] = "hex-lattice";
    j["shells"] = s.shells;
    j["sigma"] = s.sigma;
    j["spacing"] = s.resolved_spacing();
  }
  j["cell_radius"] = s.cell_radius;
  j["gamma_parallel"] = s.friction.gamma_parallel;
  j["gamma_perp"] = s.friction.gamma_perp;
  j["gamma_med"] = s.friction.gamma_med;
  j["seed"] = s.seed;
  j["force_model"] = to_string(s.force_model);
  return j.dump(2);
}

}  // namespace supportgraph
