#include "lisense/scenario_io.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "lisense/random.hpp"

namespace lisense {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw ScenarioFormatError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) throw ScenarioFormatError(where + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
T required(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ScenarioFormatError(where + ": missing key '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ScenarioFormatError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
T optional_value(const json& obj, const char* key, T fallback, const std::string& where) {
  return obj.contains(key) ? required<T>(obj, key, where) : fallback;
}

std::vector<double> fixed_array(const json& obj, const char* key, std::size_t n,
                                const std::string& where) {
  auto v = required<std::vector<double>>(obj, key, where);
  if (v.size() != n) {
    throw ScenarioFormatError(where + "." + key + ": expected " + std::to_string(n) + " numbers");
  }
  return v;
}

}  // namespace

ScenarioConfig scenario_from_json(const json& doc) {
  reject_unknown(doc,
                 {"room", "lis", "emitters", "scatterers", "humans", "snr_db", "averaging_count",
                  "rng_seed", "noiseless"},
                 "scenario");
  ScenarioConfig cfg;

  const json& room = doc.contains("room") ? doc.at("room") : json();
  if (room.is_null()) throw ScenarioFormatError("scenario: missing key 'room'");
  reject_unknown(room, {"length_x", "length_y", "height"}, "room");
  cfg.room.length_x = required<double>(room, "length_x", "room");
  cfg.room.length_y = required<double>(room, "length_y", "room");
  cfg.room.height = required<double>(room, "height", "room");

  const json& lis = doc.contains("lis") ? doc.at("lis") : json();
  if (lis.is_null()) throw ScenarioFormatError("scenario: missing key 'lis'");
  reject_unknown(lis,
                 {"elements_x", "elements_y", "spacing", "carrier_frequency", "origin_x",
                  "origin_y"},
                 "lis");
  cfg.lis.elements_x = required<int>(lis, "elements_x", "lis");
  cfg.lis.elements_y = required<int>(lis, "elements_y", "lis");
  cfg.lis.carrier_frequency = required<double>(lis, "carrier_frequency", "lis");
  cfg.lis.spacing = optional_value<double>(
      lis, "spacing",
      cfg.lis.carrier_frequency > 0.0 ? half_wavelength(cfg.lis.carrier_frequency) : 0.0, "lis");
  if (lis.contains("origin_x") != lis.contains("origin_y")) {
    throw ScenarioFormatError("lis: origin_x and origin_y must be given together");
  }
  if (lis.contains("origin_x")) {
    cfg.lis.origin_x = required<double>(lis, "origin_x", "lis");
    cfg.lis.origin_y = required<double>(lis, "origin_y", "lis");
  } else {
    center_array(cfg.lis, cfg.room);
  }

  for (const json& e : optional_value<json>(doc, "emitters", json::array(), "scenario")) {
    reject_unknown(e, {"position", "tx_power_dbm", "symbol_phase"}, "emitter");
    const auto p = fixed_array(e, "position", 3, "emitter");
    Emitter em;
    em.position = {p[0], p[1], p[2]};
    em.tx_power_dbm = optional_value<double>(e, "tx_power_dbm", em.tx_power_dbm, "emitter");
    em.symbol_phase = optional_value<double>(e, "symbol_phase", em.symbol_phase, "emitter");
    cfg.emitters.push_back(em);
  }
  for (const json& s : optional_value<json>(doc, "scatterers", json::array(), "scenario")) {
    reject_unknown(s, {"center", "radius", "height", "reflection_coeff"}, "scatterer");
    const auto c = fixed_array(s, "center", 2, "scatterer");
    Scatterer sc;
    sc.center = {c[0], c[1]};
    sc.radius = optional_value<double>(s, "radius", sc.radius, "scatterer");
    sc.height = optional_value<double>(s, "height", sc.height, "scatterer");
    sc.reflection_coeff =
        optional_value<double>(s, "reflection_coeff", sc.reflection_coeff, "scatterer");
    cfg.scatterers.push_back(sc);
  }
  for (const json& h : optional_value<json>(doc, "humans", json::array(), "scenario")) {
    reject_unknown(h, {"center", "extent_x", "extent_y", "height", "reflection_coeff"}, "human");
    const auto c = fixed_array(h, "center", 2, "human");
    Human hu;
    hu.center = {c[0], c[1]};
    hu.extent_x = optional_value<double>(h, "extent_x", hu.extent_x, "human");
    hu.extent_y = optional_value<double>(h, "extent_y", hu.extent_y, "human");
    hu.height = optional_value<double>(h, "height", hu.height, "human");
    hu.reflection_coeff = optional_value<double>(h, "reflection_coeff", hu.reflection_coeff, "human");
    cfg.humans.push_back(hu);
  }
  cfg.snr_db = optional_value<double>(doc, "snr_db", cfg.snr_db, "scenario");
  cfg.averaging_count = optional_value<int>(doc, "averaging_count", cfg.averaging_count, "scenario");
  cfg.rng_seed = optional_value<std::uint64_t>(doc, "rng_seed", cfg.rng_seed, "scenario");
  cfg.noiseless = optional_value<bool>(doc, "noiseless", cfg.noiseless, "scenario");
  return cfg;
}

json scenario_to_json(const ScenarioConfig& cfg) {
  json doc;
  doc["room"] = {{"length_x", cfg.room.length_x},
                 {"length_y", cfg.room.length_y},
                 {"height", cfg.room.height}};
  doc["lis"] = {{"elements_x", cfg.lis.elements_x},
                {"elements_y", cfg.lis.elements_y},
                {"spacing", cfg.lis.spacing},
                {"carrier_frequency", cfg.lis.carrier_frequency},
                {"origin_x", cfg.lis.origin_x},
                {"origin_y", cfg.lis.origin_y}};
  doc["emitters"] = json::array();
  for (const Emitter& e : cfg.emitters) {
    doc["emitters"].push_back({{"position", {e.position.x, e.position.y, e.position.z}},
                               {"tx_power_dbm", e.tx_power_dbm},
                               {"symbol_phase", e.symbol_phase}});
  }
  doc["scatterers"] = json::array();
  for (const Scatterer& s : cfg.scatterers) {
    doc["scatterers"].push_back({{"center", {s.center.x, s.center.y}},
                                 {"radius", s.radius},
                                 {"height", s.height},
                                 {"reflection_coeff", s.reflection_coeff}});
  }
  doc["humans"] = json::array();
  for (const Human& h : cfg.humans) {
    doc["humans"].push_back({{"center", {h.center.x, h.center.y}},
                             {"extent_x", h.extent_x},
                             {"extent_y", h.extent_y},
                             {"height", h.height},
                             {"reflection_coeff", h.reflection_coeff}});
  }
  doc["snr_db"] = cfg.snr_db;
  doc["averaging_count"] = cfg.averaging_count;
  doc["rng_seed"] = cfg.rng_seed;
  doc["noiseless"] = cfg.noiseless;
  return doc;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioFormatError("cannot open scenario file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ScenarioFormatError(path.string() + ": " + e.what());
  }
  return scenario_from_json(doc);
}

std::string canonical_scenario(const ScenarioConfig& cfg) {
  return scenario_to_json(cfg).dump(2) + "\n";
}

std::string scenario_hash(const ScenarioConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_scenario(cfg))));
  return buf;
}

}  // namespace lisense
