#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "qcayley/circuits.hpp"
#include "qcayley/types.hpp"

namespace qcayley {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Schema: {"n": int, "slots": [[q1,q2],...], "gates": [[[re,im], ... 16 row-major], ...]}.
// Written by hand so floats carry 17 significant digits and round-trip exactly.
inline std::string circuit_to_json(const Circuit& c) {
  std::string out;
  out += "{\"n\": " + std::to_string(c.arch.n) + ", \"slots\": [";
  for (std::size_t k = 0; k < c.arch.slots.size(); ++k) {
    if (k) out += ", ";
    out += "[" + std::to_string(c.arch.slots[k].first) + ", " +
           std::to_string(c.arch.slots[k].second) + "]";
  }
  out += "], \"gates\": [";
  for (std::size_t k = 0; k < c.gates.size(); ++k) {
    if (k) out += ", ";
    out += "[";
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        if (i || j) out += ", ";
        const Complex z = c.gates[k](i, j);
        out += "[" + format_double(z.real()) + ", " + format_double(z.imag()) + "]";
      }
    out += "]";
  }
  out += "]}";
  return out;
}

inline Circuit circuit_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("circuit json: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("circuit json: top level must be an object");
  for (const char* field : {"n", "slots", "gates"})
    if (!doc.contains(field))
      throw ParseError(std::string("circuit json: missing field \"") + field + "\"");
  if (!doc["n"].is_number_integer()) throw ParseError("circuit json: \"n\" must be an integer");
  if (!doc["slots"].is_array()) throw ParseError("circuit json: \"slots\" must be an array");
  if (!doc["gates"].is_array()) throw ParseError("circuit json: \"gates\" must be an array");

  Circuit c;
  c.arch.n = doc["n"].get<int>();
  for (std::size_t k = 0; k < doc["slots"].size(); ++k) {
    const auto& s = doc["slots"][k];
    if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() || !s[1].is_number_integer())
      throw ParseError("circuit json: slots[" + std::to_string(k) + "] must be [q1, q2]");
    c.arch.slots.emplace_back(s[0].get<int>(), s[1].get<int>());
  }
  if (doc["gates"].size() != c.arch.slots.size())
    throw ParseError("circuit json: gates length " + std::to_string(doc["gates"].size()) +
                     " does not match slots length " + std::to_string(c.arch.slots.size()));
  for (std::size_t k = 0; k < doc["gates"].size(); ++k) {
    const auto& g = doc["gates"][k];
    if (!g.is_array() || g.size() != 16)
      throw ParseError("circuit json: gates[" + std::to_string(k) +
                       "] must hold 16 row-major entries");
    Mat4 gate;
    for (std::size_t e = 0; e < 16; ++e) {
      const auto& entry = g[e];
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number())
        throw ParseError("circuit json: gates[" + std::to_string(k) + "][" + std::to_string(e) +
                         "] must be [re, im]");
      gate(static_cast<Eigen::Index>(e / 4), static_cast<Eigen::Index>(e % 4)) =
          Complex(entry[0].get<double>(), entry[1].get<double>());
    }
    if (!is_unitary(gate))
      throw ParseError("circuit json: gates[" + std::to_string(k) + "] is not unitary to 1e-10");
    c.gates.push_back(gate);
  }
  try {
    validate_arch(c.arch);
  } catch (const BadShape& e) {
    throw ParseError(std::string("circuit json: ") + e.what());
  }
  return c;
}

}  // namespace qcayley
