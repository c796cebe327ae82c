#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include <ebtkit/builtins.hpp>
#include <ebtkit/channels.hpp>

namespace ebtkit {

using Json = nlohmann::ordered_json;

inline constexpr int kSpecVersion = 1;

namespace detail {

inline const Json& field(const Json& j, const char* key,
                         const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    fail(errc::parse_error, where + ": missing field '" + key + "'");
  return j.at(key);
}

inline Complex complex_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(errc::parse_error, where + ": complex scalar must be [re, im]");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline Json complex_to_json(Complex z) {
  return Json::array({z.real(), z.imag()});
}

inline ComplexMatrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    fail(errc::parse_error, where + ": matrix must be a nonempty array of rows");
  const Json& first = j[0];
  if (!first.is_array() || first.empty())
    fail(errc::parse_error, where + ": matrix rows must be nonempty arrays");
  ComplexMatrix m(Index(j.size()), Index(first.size()));
  for (size_t r = 0; r < j.size(); ++r) {
    const Json& row = j[r];
    if (!row.is_array() || row.size() != first.size())
      fail(errc::parse_error, where + ": ragged matrix rows");
    for (size_t c = 0; c < row.size(); ++c)
      m(Index(r), Index(c)) = complex_from_json(
          row[c], where + "[" + std::to_string(r) + "][" + std::to_string(c) +
                      "]");
  }
  return m;
}

inline Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexVector vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    fail(errc::parse_error, where + ": vector must be a nonempty array");
  ComplexVector v(Index(j.size()));
  for (size_t k = 0; k < j.size(); ++k)
    v(Index(k)) =
        complex_from_json(j[k], where + "[" + std::to_string(k) + "]");
  return v;
}

inline void check_version(const Json& j, const std::string& where) {
  const Json& v = field(j, "ebtkit-spec", where);
  if (!v.is_number_integer() || v.get<int>() != kSpecVersion)
    fail(errc::parse_error,
         where + ": unsupported ebtkit-spec version (expected " +
             std::to_string(kSpecVersion) + ")");
}

inline Index index_field(const Json& j, const char* key,
                         const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    fail(errc::parse_error,
         where + ": field '" + std::string(key) + "' must be a positive integer");
  return Index(v.get<long long>());
}

}  // namespace detail

// Parses a channel description. Structural problems (bad JSON, wrong shapes,
// unknown types) raise parse_error; semantic validation failures keep the
// code of the violated channel invariant.
inline Channel channel_from_json(const Json& j) {
  detail::check_version(j, "channel");
  const Json& tj = detail::field(j, "type", "channel");
  if (!tj.is_string()) fail(errc::parse_error, "channel: 'type' must be a string");
  std::string type = tj.get<std::string>();

  if (type == "kraus") {
    const Json& ops = detail::field(j, "operators", "kraus");
    if (!ops.is_array() || ops.empty())
      fail(errc::parse_error, "kraus: 'operators' must be a nonempty array");
    std::vector<ComplexMatrix> mats;
    for (size_t k = 0; k < ops.size(); ++k)
      mats.push_back(detail::matrix_from_json(
          ops[k], "kraus.operators[" + std::to_string(k) + "]"));
    return Channel(KrausChannel(std::move(mats)));
  }
  if (type == "holevo") {
    const Json& pairs = detail::field(j, "pairs", "holevo");
    if (!pairs.is_array() || pairs.empty())
      fail(errc::parse_error, "holevo: 'pairs' must be a nonempty array");
    std::vector<HolevoPair> out;
    for (size_t k = 0; k < pairs.size(); ++k) {
      std::string where = "holevo.pairs[" + std::to_string(k) + "]";
      const Json& p = pairs[k];
      ComplexMatrix state =
          detail::matrix_from_json(detail::field(p, "state", where), where + ".state");
      ComplexMatrix effect = detail::matrix_from_json(
          detail::field(p, "effect", where), where + ".effect");
      out.push_back({DensityMatrix(std::move(state)), std::move(effect)});
    }
    return Channel(HolevoChannel(std::move(out)));
  }
  if (type == "choi") {
    ComplexMatrix m = detail::matrix_from_json(
        detail::field(j, "matrix", "choi"), "choi.matrix");
    Index din = detail::index_field(j, "dim_in", "choi");
    Index dout = detail::index_field(j, "dim_out", "choi");
    return Channel(ChoiMatrix(std::move(m), din, dout));
  }
  if (type == "cq") {
    const Json& sj = detail::field(j, "states", "cq");
    if (!sj.is_array() || sj.empty())
      fail(errc::parse_error, "cq: 'states' must be a nonempty array");
    std::vector<DensityMatrix> states;
    for (size_t k = 0; k < sj.size(); ++k)
      states.push_back(DensityMatrix(detail::matrix_from_json(
          sj[k], "cq.states[" + std::to_string(k) + "]")));
    if (j.contains("basis")) {
      const Json& bj = j.at("basis");
      if (!bj.is_array())
        fail(errc::parse_error, "cq: 'basis' must be an array of vectors");
      std::vector<ComplexVector> basis;
      for (size_t k = 0; k < bj.size(); ++k)
        basis.push_back(detail::vector_from_json(
            bj[k], "cq.basis[" + std::to_string(k) + "]"));
      return Channel(cq_channel(states, basis));
    }
    return Channel(cq_channel(states));
  }
  if (type == "qc") {
    const Json& ej = detail::field(j, "effects", "qc");
    if (!ej.is_array() || ej.empty())
      fail(errc::parse_error, "qc: 'effects' must be a nonempty array");
    std::vector<ComplexMatrix> effects;
    for (size_t k = 0; k < ej.size(); ++k)
      effects.push_back(detail::matrix_from_json(
          ej[k], "qc.effects[" + std::to_string(k) + "]"));
    Povm povm = validate_povm(effects);
    if (j.contains("basis")) {
      const Json& bj = j.at("basis");
      if (!bj.is_array())
        fail(errc::parse_error, "qc: 'basis' must be an array of vectors");
      std::vector<ComplexVector> basis;
      for (size_t k = 0; k < bj.size(); ++k)
        basis.push_back(detail::vector_from_json(
            bj[k], "qc.basis[" + std::to_string(k) + "]"));
      return Channel(qc_channel(povm, basis));
    }
    return Channel(qc_channel(povm));
  }
  if (type == "point") {
    ComplexMatrix state = detail::matrix_from_json(
        detail::field(j, "state", "point"), "point.state");
    Index din = 0;
    if (j.contains("dim_in")) din = detail::index_field(j, "dim_in", "point");
    return Channel(point_channel(DensityMatrix(std::move(state)), din));
  }
  if (type == "builtin") {
    const Json& nj = detail::field(j, "name", "builtin");
    if (!nj.is_string()) fail(errc::parse_error, "builtin: 'name' must be a string");
    return builtin_channel(nj.get<std::string>());
  }
  fail(errc::parse_error, "channel: unknown type '" + type + "'");
}

// Canonical serialization: kraus, holevo, and choi forms keep their variant;
// shorthand inputs (cq, qc, point, builtin) normalize to one of these.
inline Json channel_to_json(const Channel& channel) {
  Json j;
  j["ebtkit-spec"] = kSpecVersion;
  if (const auto* k = std::get_if<KrausChannel>(&channel)) {
    j["type"] = "kraus";
    Json ops = Json::array();
    for (const ComplexMatrix& a : k->operators())
      ops.push_back(detail::matrix_to_json(a));
    j["operators"] = std::move(ops);
    return j;
  }
  if (const auto* h = std::get_if<HolevoChannel>(&channel)) {
    j["type"] = "holevo";
    Json pairs = Json::array();
    for (const HolevoPair& p : h->pairs()) {
      Json pj;
      pj["state"] = detail::matrix_to_json(p.state.matrix());
      pj["effect"] = detail::matrix_to_json(p.effect);
      pairs.push_back(std::move(pj));
    }
    j["pairs"] = std::move(pairs);
    return j;
  }
  const ChoiMatrix& c = std::get<ChoiMatrix>(channel);
  j["type"] = "choi";
  j["dim_in"] = c.dims().dim_a;
  j["dim_out"] = c.dims().dim_b;
  j["matrix"] = detail::matrix_to_json(c.matrix());
  return j;
}

namespace detail {

inline Json parse_text(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(errc::parse_error, where + ": " + e.what());
  }
}

}  // namespace detail

inline Channel parse_channel(const std::string& text) {
  return channel_from_json(detail::parse_text(text, "channel"));
}

inline std::string serialize_channel(const Channel& channel) {
  return channel_to_json(channel).dump(2) + "\n";
}

inline Json state_to_json(const DensityMatrix& rho) {
  Json j;
  j["ebtkit-spec"] = kSpecVersion;
  j["type"] = "state";
  j["matrix"] = detail::matrix_to_json(rho.matrix());
  return j;
}

inline DensityMatrix state_from_json(const Json& j) {
  detail::check_version(j, "state");
  const Json& tj = detail::field(j, "type", "state");
  if (!tj.is_string() || tj.get<std::string>() != "state")
    fail(errc::parse_error, "state: 'type' must be \"state\"");
  return DensityMatrix(detail::matrix_from_json(
      detail::field(j, "matrix", "state"), "state.matrix"));
}

inline DensityMatrix parse_state(const std::string& text) {
  return state_from_json(detail::parse_text(text, "state"));
}

inline std::string serialize_state(const DensityMatrix& rho) {
  return state_to_json(rho).dump(2) + "\n";
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::parse_error, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Channel load_channel(const std::string& path) {
  return parse_channel(read_file(path));
}

inline DensityMatrix load_state(const std::string& path) {
  return parse_state(read_file(path));
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::invalid_argument, "cannot write '" + path + "'");
  out << text;
}

}  // namespace ebtkit
