/**
 * Copyright 2026, the ebtkit developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE.txt file in the root directory of this source tree.
 */

#ifndef EBTKIT_COMMON_HPP
#define EBTKIT_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ebtkit {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Failure categories. The CLI maps parse_error to exit code 2, input
// validation failures to 3, and internal tolerance failures to 4.
enum class errc {
  shape_mismatch,
  invalid_argument,
  not_hermitian,
  not_psd,
  not_normalized,
  incomplete_sum,
  non_orthonormal_basis,
  incomplete_projectors,
  rank_too_high,
  not_trace_preserving,
  marginal_not_maximally_mixed,
  precondition_rank_mismatch,
  merge_stall,
  not_ebt_input,
  unsupported_dimension,
  parse_error,
  tolerance_failure,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw Error(code, what);
}

namespace tol {

// Absolute slack on eigenvalues when testing positive semidefiniteness.
inline constexpr double kPsd = 1e-10;
// Slack on completeness sums (POVM sum, Kraus sum) deciding the TP flag.
inline constexpr double kTracePreserving = 1e-9;
// Operators below this Frobenius norm are dropped from Kraus expansions.
inline constexpr double kKrausPrune = 1e-12;
// Certificates must reproduce the channel's Choi matrix this closely.
inline constexpr double kCertificate = 1e-8;

// Hermiticity slack scales with the matrix magnitude.
inline double hermitian(const ComplexMatrix& m) {
  return 1e-10 * (1.0 + m.norm());
}

}  // namespace tol

inline bool is_hermitian_within(const ComplexMatrix& m, double t) {
  return m.rows() == m.cols() && (m - m.adjoint()).norm() <= t;
}

inline void require_square(const ComplexMatrix& m, const char* who) {
  if (m.rows() != m.cols())
    fail(errc::shape_mismatch, std::string(who) + ": matrix must be square, got " +
                                   std::to_string(m.rows()) + "x" +
                                   std::to_string(m.cols()));
}

inline void require_hermitian(const ComplexMatrix& m, const char* who) {
  require_square(m, who);
  if (!is_hermitian_within(m, tol::hermitian(m)))
    fail(errc::not_hermitian, std::string(who) + ": matrix is not hermitian");
}

}  // namespace ebtkit

#endif
