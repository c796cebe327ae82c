/**
 * Copyright 2026, the ebtkit developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE.txt file in the root directory of this source tree.
 */

#ifndef EBTKIT_SEPARABLE_DECOMPOSITION_HPP
#define EBTKIT_SEPARABLE_DECOMPOSITION_HPP

#include <utility>
#include <vector>

#include <ebtkit/tensor_ops.hpp>

namespace ebtkit {

// One pure product term: weight * |left><left| (x) |right><right|.
struct SeparableTerm {
  double weight;
  ComplexVector left;
  ComplexVector right;
};

// Convex combination of pure product states on dim_a (x) dim_b. Weights are
// positive and sum to 1 within 1e-10; both factors are unit vectors.
// `residual` is set by producers to the Frobenius distance between the
// reconstruction and the matrix the decomposition was extracted from.
class SeparableDecomposition {
 public:
  SeparableDecomposition(BipartiteDims dims, std::vector<SeparableTerm> terms)
      : dims_(dims), terms_(std::move(terms)) {
    if (terms_.empty())
      fail(errc::invalid_argument, "SeparableDecomposition: no terms");
    double sum = 0.0;
    for (size_t n = 0; n < terms_.size(); ++n) {
      const SeparableTerm& t = terms_[n];
      if (t.weight <= 0.0)
        fail(errc::invalid_argument,
             "SeparableDecomposition: term " + std::to_string(n) +
                 " has non-positive weight");
      if (t.left.size() != dims_.dim_a || t.right.size() != dims_.dim_b)
        fail(errc::shape_mismatch,
             "SeparableDecomposition: term " + std::to_string(n) +
                 " has mismatched factor dimensions");
      if (std::abs(t.left.norm() - 1.0) > 1e-10 ||
          std::abs(t.right.norm() - 1.0) > 1e-10)
        fail(errc::not_normalized,
             "SeparableDecomposition: term " + std::to_string(n) +
                 " has a non-unit factor");
      sum += t.weight;
    }
    if (std::abs(sum - 1.0) > 1e-10)
      fail(errc::not_normalized,
           "SeparableDecomposition: weights sum to " + std::to_string(sum));
  }

  const BipartiteDims& dims() const { return dims_; }
  const std::vector<SeparableTerm>& terms() const { return terms_; }
  size_t size() const { return terms_.size(); }

  ComplexMatrix reconstruct() const {
    ComplexMatrix out = ComplexMatrix::Zero(dims_.total(), dims_.total());
    for (const SeparableTerm& t : terms_) {
      ComplexVector prod = kron(t.left, t.right);
      out += t.weight * (prod * prod.adjoint());
    }
    return out;
  }

  double residual_against(const ComplexMatrix& target) const {
    return (reconstruct() - target).norm();
  }

  double residual = 0.0;

 private:
  BipartiteDims dims_;
  std::vector<SeparableTerm> terms_;
};

}  // namespace ebtkit

#endif
