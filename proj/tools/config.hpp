#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace cli {

using json = nlohmann::json;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Kind { number, integer, string, boolean, numbers, triples };

struct Field {
  std::string name;
  Kind kind;
  json fallback;
};

using Schema = std::vector<Field>;

// keys that do not change the numbers in the data rows
inline const std::set<std::string> kRunOnlyKeys{"threads", "output", "check"};

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::number: return "a number";
    case Kind::integer: return "a non-negative integer";
    case Kind::string: return "a string";
    case Kind::boolean: return "true or false";
    case Kind::numbers: return "an array of numbers";
    case Kind::triples: return "an array of [r1, r2, r3] arrays";
  }
  return "?";
}

inline bool has_kind(const json& v, Kind k) {
  switch (k) {
    case Kind::number: return v.is_number();
    case Kind::integer: return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    case Kind::string: return v.is_string();
    case Kind::boolean: return v.is_boolean();
    case Kind::numbers:
      if (!v.is_array()) return false;
      for (const auto& x : v) {
        if (!x.is_number()) return false;
      }
      return true;
    case Kind::triples:
      if (!v.is_array()) return false;
      for (const auto& t : v) {
        if (!t.is_array() || t.size() != 3) return false;
        for (const auto& x : t) {
          if (!x.is_number()) return false;
        }
      }
      return true;
  }
  return false;
}

inline json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file '" + path + "'");
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
}

/// Rejects unknown keys and wrong types, fills in defaults. Null values also take the default.
inline json apply_schema(const Schema& schema, const json& given, const std::string& command) {
  json out = json::object();
  std::map<std::string, const Field*> by_name;
  for (const auto& f : schema) by_name[f.name] = &f;
  for (const auto& [k, v] : given.items()) {
    if (!by_name.count(k)) throw ValidationError(command + ": unknown config key '" + k + "'");
  }
  for (const auto& f : schema) {
    const json v = given.contains(f.name) && !given.at(f.name).is_null() ? given.at(f.name) : f.fallback;
    if (v.is_null()) {
      out[f.name] = nullptr;
      continue;
    }
    if (!has_kind(v, f.kind)) throw ValidationError(command + ": '" + f.name + "' must be " + kind_name(f.kind));
    out[f.name] = v;
  }
  return out;
}

inline std::string config_hash(const json& cfg) {
  json h = json::object();
  for (const auto& [k, v] : cfg.items()) {
    if (!kRunOnlyKeys.count(k)) h[k] = v;
  }
  const std::string text = h.dump();
  std::uint64_t x = 1469598103934665603ull;
  for (unsigned char c : text) {
    x ^= c;
    x *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace cli
