#pragma once

#include <string>
#include <vector>

#include <ebtkit/channels.hpp>
#include <ebtkit/extremality.hpp>

namespace ebtkit {

struct BuiltinInfo {
  std::string name;
  std::string summary;
};

inline const std::vector<BuiltinInfo>& builtin_catalog() {
  static const std::vector<BuiltinInfo> entries = {
      {"identity:d", "identity channel on a d-dimensional system"},
      {"depolarizing:d:lambda",
       "keeps the input with weight lambda, otherwise outputs I/d"},
      {"point:d", "constant channel preparing the maximally mixed state"},
      {"dephasing:d", "zeroes off-diagonal entries in the register basis"},
      {"tetrahedron",
       "qutrit measure-and-prepare channel built from four tetrahedral "
       "vertex projectors"},
      {"trine4",
       "four-outcome measurement channel whose first three effects form a "
       "scaled trine"},
  };
  return entries;
}

namespace detail {

inline std::vector<std::string> split_colon(const std::string& s) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(':', start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline Index parse_dim(const std::string& s, const std::string& name) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    fail(errc::parse_error, "builtin " + name + ": bad dimension '" + s + "'");
  Index d = Index(std::stoll(s));
  if (d < 1) fail(errc::invalid_argument, "builtin " + name + ": dimension < 1");
  return d;
}

inline double parse_real(const std::string& s, const std::string& name) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (...) {
    fail(errc::parse_error, "builtin " + name + ": bad number '" + s + "'");
  }
  if (pos != s.size())
    fail(errc::parse_error, "builtin " + name + ": bad number '" + s + "'");
  return v;
}

inline void expect_arity(const std::vector<std::string>& parts, size_t n) {
  if (parts.size() != n)
    fail(errc::parse_error, "builtin " + parts[0] + ": expected " +
                                std::to_string(n - 1) + " parameter(s)");
}

}  // namespace detail

// Resolves "name[:arg...]" strings such as "depolarizing:2:0.25".
inline Channel builtin_channel(const std::string& spec) {
  std::vector<std::string> parts = detail::split_colon(spec);
  const std::string& name = parts[0];
  if (name == "identity") {
    detail::expect_arity(parts, 2);
    Index d = detail::parse_dim(parts[1], name);
    return Channel(KrausChannel({ComplexMatrix::Identity(d, d)}));
  }
  if (name == "depolarizing") {
    detail::expect_arity(parts, 3);
    Index d = detail::parse_dim(parts[1], name);
    double lambda = detail::parse_real(parts[2], name);
    if (d < 2) fail(errc::invalid_argument, "depolarizing: dimension < 2");
    if (lambda < 0.0 || lambda > 1.0)
      fail(errc::invalid_argument, "depolarizing: lambda outside [0,1]");
    ComplexVector beta = maximally_entangled(d).vector();
    ComplexMatrix choi =
        lambda * (beta * beta.adjoint()) +
        (1.0 - lambda) * ComplexMatrix::Identity(d * d, d * d) /
            double(d * d);
    return Channel(ChoiMatrix(std::move(choi), d, d));
  }
  if (name == "point") {
    detail::expect_arity(parts, 2);
    Index d = detail::parse_dim(parts[1], name);
    return Channel(point_channel(
        DensityMatrix((ComplexMatrix::Identity(d, d) / double(d)).eval())));
  }
  if (name == "dephasing") {
    detail::expect_arity(parts, 2);
    Index d = detail::parse_dim(parts[1], name);
    if (d < 2) fail(errc::invalid_argument, "dephasing: dimension < 2");
    std::vector<DensityMatrix> states;
    for (Index j = 0; j < d; ++j)
      states.push_back(
          DensityMatrix::from_pure(PureState(ComplexVector::Unit(d, j).eval())));
    return Channel(cq_channel(states));
  }
  if (name == "tetrahedron") {
    detail::expect_arity(parts, 1);
    return Channel(tetrahedron_channel());
  }
  if (name == "trine4") {
    detail::expect_arity(parts, 1);
    return Channel(trine_block_channel());
  }
  fail(errc::parse_error, "unknown builtin '" + name + "'");
}

}  // namespace ebtkit
