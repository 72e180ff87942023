#pragma once

// Internal JSON helpers shared by the persistence and runner translation
// units. Not installed.

#include <fstream>
#include <string>

#include <json.hpp>

#include "anderson/errors.hpp"
#include "anderson/lattice.hpp"
#include "anderson/scaling.hpp"

namespace anderson::detail {

using ordered_json = nlohmann::ordered_json;

inline ordered_json coord_json(const Coord& c) {
  return ordered_json::array({c[0], c[1], c[2]});
}

inline Coord coord_from_json(const ordered_json& j) {
  return Coord{j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>()};
}

inline ordered_json fit_record_json(double c, std::uint64_t seed,
                                    const RescaleFit& fit) {
  ordered_json j;
  j["c"] = c;
  j["seed"] = seed;
  j["crop"] = fit.crop;
  j["a"] = fit.a;
  j["slope"] = fit.slope;
  j["y"] = fit.y;
  j["L"] = fit.L;
  j["residual"] = fit.residual;
  j["usable"] = fit.usable;
  j["concave_at_floor"] = fit.concave_at_floor;
  return j;
}

inline RescaleFit fit_from_json(const ordered_json& j) {
  RescaleFit fit;
  fit.crop = j.at("crop").get<int>();
  fit.a = j.at("a").get<double>();
  fit.slope = j.at("slope").get<double>();
  fit.y = j.at("y").get<double>();
  fit.L = j.at("L").get<double>();
  fit.residual = j.at("residual").get<double>();
  fit.usable = j.at("usable").get<bool>();
  fit.concave_at_floor = j.at("concave_at_floor").get<bool>();
  return fit;
}

inline void write_json_file(const std::string& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw SchemaError("short write to '" + path + "'");
}

inline ordered_json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "' for reading");
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw SchemaError("malformed JSON in '" + path + "': " + e.what());
  }
  return j;
}

} // namespace anderson::detail
