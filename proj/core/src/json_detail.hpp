#pragma once

// Internal JSON helpers shared by the .cpp files. vendor/json.hpp stays out
// of the installed public headers.

#include <nlohmann/json.hpp>

#include "hypertune/error.hpp"
#include "hypertune/space.hpp"

namespace hypertune::detail {

using ordered_json = nlohmann::ordered_json;

inline ordered_json param_value_to_json(const ParamValue& v) {
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
  return std::get<std::string>(v);
}

inline ParamValue param_value_from_json(const ordered_json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  throw Error("parameter value must be a number or string, got: " + j.dump());
}

inline ordered_json configuration_to_json(const Configuration& c) {
  ordered_json out = ordered_json::object();
  for (const auto& [name, value] : c.values) {
    out[name] = param_value_to_json(value);
  }
  return out;
}

inline Configuration configuration_from_json(const ordered_json& j) {
  if (!j.is_object()) throw Error("configuration JSON must be an object");
  Configuration c;
  for (const auto& [key, value] : j.items()) {
    c.values[key] = param_value_from_json(value);
  }
  return c;
}

inline ordered_json parse_json(const std::string& text,
                               const std::string& what) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error("invalid JSON for " + what);
  return j;
}

}  // namespace hypertune::detail
