#include "mstream/json.hpp"

#include <cstdio>

namespace mstream {

std::string json_quote(std::string_view s) {
  std::string r = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        r += "\\\"";
        break;
      case '\\':
        r += "\\\\";
        break;
      case '\n':
        r += "\\n";
        break;
      case '\t':
        r += "\\t";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(static_cast<unsigned char>(c)));
          r += buf;
        } else {
          r += c;
        }
    }
  }
  return r + "\"";
}

std::string to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Unit:
      return "null";
    case Value::Kind::Int:
      return v.as_int().str();
    case Value::Kind::Set: {
      std::string r = "[";
      bool first = true;
      for (auto e : v.as_set()) {
        if (!first) r += ",";
        first = false;
        r += std::to_string(e);
      }
      return r + "]";
    }
    case Value::Kind::Tuple: {
      std::string r = "[";
      bool first = true;
      for (const auto& e : v.as_tuple()) {
        if (!first) r += ",";
        first = false;
        r += to_json(e);
      }
      return r + "]";
    }
  }
  return "null";
}

std::string to_json(const std::vector<Value>& wires) { return to_json(pack(wires)); }

std::string to_json(const Dist& d) {
  std::string r = "[";
  bool first = true;
  for (const auto& [v, p] : d) {
    if (!first) r += ",";
    first = false;
    r += "{\"value\":" + to_json(v) + ",\"p\":" + json_quote(p.str()) + "}";
  }
  return r + "]";
}

}  // namespace mstream
