/**
 * Copyright 2026, the ebtkit developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE.txt file in the root directory of this source tree.
 */

#ifndef EBTKIT_STATES_HPP
#define EBTKIT_STATES_HPP

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <ebtkit/tensor_ops.hpp>

namespace ebtkit {

class PureState {
 public:
  explicit PureState(ComplexVector v) : vec_(std::move(v)) {
    if (vec_.size() < 1)
      fail(errc::invalid_argument, "PureState: empty vector");
    if (std::abs(vec_.norm() - 1.0) > 1e-12)
      fail(errc::not_normalized, "PureState: vector norm deviates from 1 by " +
                                     std::to_string(std::abs(vec_.norm() - 1.0)));
  }

  Index dim() const { return vec_.size(); }
  const ComplexVector& vector() const { return vec_; }
  ComplexMatrix projector() const { return vec_ * vec_.adjoint(); }

 private:
  ComplexVector vec_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {
    require_hermitian(mat_, "DensityMatrix");
    if (std::abs(mat_.trace().real() - 1.0) > 1e-10 ||
        std::abs(mat_.trace().imag()) > 1e-10)
      fail(errc::not_normalized, "DensityMatrix: trace deviates from 1");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
        ((mat_ + mat_.adjoint()) / 2.0).eval(), Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -tol::kPsd)
      fail(errc::not_psd, "DensityMatrix: minimum eigenvalue " +
                              std::to_string(solver.eigenvalues().minCoeff()));
  }

  static DensityMatrix from_pure(const PureState& psi) {
    return DensityMatrix(psi.projector());
  }

  Index dim() const { return mat_.rows(); }
  const ComplexMatrix& matrix() const { return mat_; }

 private:
  ComplexMatrix mat_;
};

class Povm {
 public:
  // Validation lives in validate_povm; every Povm goes through it.
  explicit Povm(std::vector<ComplexMatrix> elements)
      : elements_(std::move(elements)) {
    if (elements_.empty())
      fail(errc::invalid_argument, "Povm: no elements");
    const Index d = elements_[0].rows();
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (size_t k = 0; k < elements_.size(); ++k) {
      const ComplexMatrix& f = elements_[k];
      if (f.rows() != d || f.cols() != d)
        fail(errc::shape_mismatch,
             "Povm: element " + std::to_string(k) + " has mismatched shape");
      if (f.norm() <= 1e-12)
        fail(errc::invalid_argument,
             "Povm: element " + std::to_string(k) + " is zero");
      require_hermitian(f, "Povm");
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
          ((f + f.adjoint()) / 2.0).eval(), Eigen::EigenvaluesOnly);
      if (solver.eigenvalues().minCoeff() < -tol::kPsd)
        fail(errc::not_psd, "Povm: element " + std::to_string(k) +
                                " has eigenvalue " +
                                std::to_string(solver.eigenvalues().minCoeff()));
      sum += f;
    }
    double residual = (sum - ComplexMatrix::Identity(d, d)).norm();
    if (residual > 1e-10)
      fail(errc::incomplete_sum,
           "Povm: completeness residual " + std::to_string(residual));
  }

  Index dim() const { return elements_[0].rows(); }
  size_t size() const { return elements_.size(); }
  const std::vector<ComplexMatrix>& elements() const { return elements_; }
  const ComplexMatrix& element(size_t k) const { return elements_.at(k); }

 private:
  std::vector<ComplexMatrix> elements_;
};

inline Povm validate_povm(std::vector<ComplexMatrix> elements) {
  return Povm(std::move(elements));
}

// d^{-1/2} sum_j |j>|j> on the doubled space.
inline PureState maximally_entangled(Index d) {
  if (d < 2) fail(errc::invalid_argument, "maximally_entangled: need d >= 2");
  ComplexVector v = ComplexVector::Zero(d * d);
  for (Index j = 0; j < d; ++j) v(j * d + j) = 1.0 / std::sqrt(double(d));
  return PureState(v);
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim())
    fail(errc::shape_mismatch, "trace_distance: dimension mismatch");
  EigResult eig = hermitian_eig((a.matrix() - b.matrix()).eval());
  return 0.5 * eig.eigenvalues.cwiseAbs().sum();
}

namespace detail {

// Gaussian sampler on raw mt19937_64 output. Keeps sampled streams
// bit-identical across standard library implementations.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double uniform() {  // [0, 1)
    return double(rng_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  ComplexMatrix matrix(Index rows, Index cols) {
    ComplexMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = Complex(normal(), normal());
    return m;
  }

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace detail

inline DensityMatrix random_density(Index d, Index rank, std::uint64_t seed) {
  if (d < 1 || rank < 1 || rank > d)
    fail(errc::invalid_argument, "random_density: need 1 <= rank <= d");
  detail::GaussianStream g(seed);
  ComplexMatrix factor = g.matrix(d, rank);
  ComplexMatrix m = factor * factor.adjoint();
  return DensityMatrix(m / m.trace().real());
}

inline PureState random_pure(Index d, std::uint64_t seed) {
  detail::GaussianStream g(seed);
  ComplexVector v = g.matrix(d, 1).col(0);
  return PureState(v / v.norm());
}

// Haar distributed via QR of a Gaussian matrix with phase-fixed diagonal.
inline ComplexMatrix random_unitary(Index d, std::uint64_t seed) {
  detail::GaussianStream g(seed);
  Eigen::HouseholderQR<ComplexMatrix> qr(g.matrix(d, d));
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < d; ++i) {
    Complex rii = r(i, i);
    q.col(i) *= (std::abs(rii) > 0) ? rii / std::abs(rii) : 1.0;
  }
  return q;
}

// n random positive operators renormalized into a POVM by symmetric
// conjugation with the inverse square root of their sum.
inline Povm random_povm(Index d, Index n, std::uint64_t seed) {
  if (d < 1 || n < 2)
    fail(errc::invalid_argument, "random_povm: need d >= 1, n >= 2");
  detail::GaussianStream g(seed);
  std::vector<ComplexMatrix> raw;
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (Index k = 0; k < n; ++k) {
    ComplexMatrix f = g.matrix(d, d);
    raw.push_back((f * f.adjoint()).eval());
    sum += raw.back();
  }
  EigResult eig = hermitian_eig(sum);
  ComplexMatrix inv_sqrt = ComplexMatrix::Zero(d, d);
  for (Index i = 0; i < d; ++i)
    inv_sqrt += eig.eigenvectors.col(i) * eig.eigenvectors.col(i).adjoint() /
                std::sqrt(eig.eigenvalues(i));
  std::vector<ComplexMatrix> elements;
  for (auto& f : raw) {
    ComplexMatrix e = inv_sqrt * f * inv_sqrt;
    elements.push_back(((e + e.adjoint()) / 2.0).eval());
  }
  return Povm(std::move(elements));
}

}  // namespace ebtkit

#endif
