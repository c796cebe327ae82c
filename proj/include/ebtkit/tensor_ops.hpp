/**
 * Copyright 2026, the ebtkit developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE.txt file in the root directory of this source tree.
 */

#ifndef EBTKIT_TENSOR_OPS_HPP
#define EBTKIT_TENSOR_OPS_HPP

#include <cmath>
#include <limits>

#include <ebtkit/common.hpp>

namespace ebtkit {

// Dimensions of a bipartite space. Composite index convention throughout:
// (i_a, i_b) -> i_a * dim_b + i_b, first factor slow.
struct BipartiteDims {
  Index dim_a = 0;
  Index dim_b = 0;

  Index total() const { return dim_a * dim_b; }
};

enum class Factor { first, second };

namespace detail {

inline void check_bipartite(const ComplexMatrix& m, const BipartiteDims& dims,
                            const char* who) {
  if (dims.dim_a < 1 || dims.dim_b < 1)
    fail(errc::invalid_argument, std::string(who) + ": dimensions must be >= 1");
  if (m.rows() != m.cols() || m.rows() != dims.total())
    fail(errc::shape_mismatch,
         std::string(who) + ": matrix side " + std::to_string(m.rows()) +
             " does not equal dim_a*dim_b = " + std::to_string(dims.total()));
}

}  // namespace detail

// Kronecker product, (a (x) b)[(ia,ib),(ja,jb)] = a(ia,ja) * b(ib,jb).
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

// Trace over one tensor factor of a square matrix on dim_a (x) dim_b.
inline ComplexMatrix partial_trace(const ComplexMatrix& m,
                                   const BipartiteDims& dims, Factor traced) {
  detail::check_bipartite(m, dims, "partial_trace");
  const Index da = dims.dim_a, db = dims.dim_b;
  if (traced == Factor::second) {
    ComplexMatrix out = ComplexMatrix::Zero(da, da);
    for (Index i = 0; i < da; ++i)
      for (Index j = 0; j < da; ++j)
        for (Index k = 0; k < db; ++k) out(i, j) += m(i * db + k, j * db + k);
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (Index k = 0; k < db; ++k)
    for (Index l = 0; l < db; ++l)
      for (Index i = 0; i < da; ++i) out(k, l) += m(i * db + k, i * db + l);
  return out;
}

// Transpose of one tensor factor; the other factor's indices are untouched.
inline ComplexMatrix partial_transpose(const ComplexMatrix& m,
                                       const BipartiteDims& dims,
                                       Factor transposed) {
  detail::check_bipartite(m, dims, "partial_transpose");
  const Index da = dims.dim_a, db = dims.dim_b;
  ComplexMatrix out(m.rows(), m.cols());
  for (Index i = 0; i < da; ++i)
    for (Index j = 0; j < da; ++j)
      for (Index k = 0; k < db; ++k)
        for (Index l = 0; l < db; ++l) {
          if (transposed == Factor::second)
            out(i * db + k, j * db + l) = m(i * db + l, j * db + k);
          else
            out(i * db + k, j * db + l) = m(j * db + k, i * db + l);
        }
  return out;
}

struct EigResult {
  RealVector eigenvalues;    // ascending
  ComplexMatrix eigenvectors;  // columns, unit norm, phase-fixed
};

// Eigendecomposition of a hermitian matrix. Each eigenvector's first
// component of non-negligible magnitude is made real positive so results
// are reproducible across runs.
inline EigResult hermitian_eig(const ComplexMatrix& m) {
  require_hermitian(m, "hermitian_eig");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
      ((m + m.adjoint()) / 2.0).eval());
  if (solver.info() != Eigen::Success)
    fail(errc::tolerance_failure, "hermitian_eig: solver did not converge");
  EigResult out{solver.eigenvalues(), solver.eigenvectors()};
  for (Index c = 0; c < out.eigenvectors.cols(); ++c) {
    for (Index r = 0; r < out.eigenvectors.rows(); ++r) {
      Complex v = out.eigenvectors(r, c);
      if (std::abs(v) > 1e-8) {
        out.eigenvectors.col(c) *= std::conj(v) / std::abs(v);
        break;
      }
    }
  }
  double residual = (m * out.eigenvectors -
                     out.eigenvectors * out.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>())
                        .norm();
  if (residual > 1e-10 * (1.0 + m.norm()))
    fail(errc::tolerance_failure, "hermitian_eig: residual too large");
  return out;
}

// Number of singular values above tolerance. A negative tolerance selects
// the default max(rows, cols) * eps * sigma_max.
inline Index numerical_rank(const ComplexMatrix& m, double tolerance = -1.0) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& sv = svd.singularValues();
  if (tolerance < 0.0)
    tolerance = double(std::max(m.rows(), m.cols())) *
                std::numeric_limits<double>::epsilon() * sv(0);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tolerance) ++rank;
  return rank;
}

// Positive semidefiniteness within an absolute eigenvalue slack.
inline bool is_psd(const ComplexMatrix& m, double t = tol::kPsd) {
  require_hermitian(m, "is_psd");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
      ((m + m.adjoint()) / 2.0).eval(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -t;
}

// Hilbert-Schmidt inner product Tr(a^dagger b), conjugate linear in a.
inline Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(errc::shape_mismatch, "hs_inner: operands must have equal shape");
  return a.conjugate().cwiseProduct(b).sum();
}

}  // namespace ebtkit

#endif
