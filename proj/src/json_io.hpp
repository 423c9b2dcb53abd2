#pragma once

// nlohmann/json conversions shared by the trace and scenario code.

#include <json.hpp>

#include "tenderbake/config.hpp"
#include "tenderbake/encoding.hpp"
#include "tenderbake/errors.hpp"

namespace tenderbake::json_io {

using json = nlohmann::json;

json config_to_json(const SimConfig& cfg);
SimConfig config_from_json(const json& j);

std::string hex_of(const Bytes& b);

template <typename T>
T field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw DecodeError(std::string("missing field '") + key + "'");
  try {
    return it->template get<T>();
  } catch (const json::exception& e) {
    throw DecodeError(std::string("bad field '") + key + "': " + e.what());
  }
}

}  // namespace tenderbake::json_io
