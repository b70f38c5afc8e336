#pragma once

// Internal JSON helpers shared by the parsing and persistence code.
// nlohmann::json stays out of the public headers.

#include <string>

#include <json.hpp>

#include "casegraph/errors.hpp"
#include "casegraph/graph.hpp"

namespace casegraph::detail {

using json = nlohmann::json;

// locus is prepended to error messages, e.g. "line 12: field question".
AttributedGraph graph_from_json(const json& record, const std::string& locus);
json graph_to_json(const AttributedGraph& g);

inline json parse_json(std::string_view text, const std::string& locus) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw ParseError(locus + ": invalid JSON");
  }
  return j;
}

inline const json& require_field(const json& obj, const char* name,
                                 const std::string& locus) {
  if (!obj.is_object()) {
    throw ParseError(locus + ": expected an object");
  }
  auto it = obj.find(name);
  if (it == obj.end()) {
    throw ParseError(locus + ": missing field '" + name + "'");
  }
  return *it;
}

inline std::string require_string(const json& obj, const char* name,
                                  const std::string& locus) {
  const json& v = require_field(obj, name, locus);
  if (!v.is_string()) {
    throw ParseError(locus + ": field '" + name + "' must be a string");
  }
  return v.get<std::string>();
}

}  // namespace casegraph::detail
