#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsgrove/errors.hpp"
#include "rsgrove/geometry.hpp"

namespace rsgrove::detail {

using nlohmann::json;

inline json envelope_json(const Envelope& e) {
  if (e.is_empty()) return json{{"lo", nullptr}, {"hi", nullptr}};
  return json{{"lo", std::vector<double>(e.lo().begin(), e.lo().end())},
              {"hi", std::vector<double>(e.hi().begin(), e.hi().end())}};
}

inline Envelope envelope_from(const json& j, std::size_t dim = 0) {
  if (j.at("lo").is_null()) return Envelope::empty(dim);
  return Envelope(j.at("lo").get<std::vector<double>>(),
                  j.at("hi").get<std::vector<double>>());
}

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("'" + path + "': " + e.what());
  }
}

inline void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DataError("write failed for '" + path + "'");
}

inline void write_json(const json& j, const std::string& path) {
  write_text(j.dump(1) + '\n', path);
}

}  // namespace rsgrove::detail
