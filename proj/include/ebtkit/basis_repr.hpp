#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include <ebtkit/channels.hpp>

namespace ebtkit {

// Orthonormal hermitian operator basis {G_0, ..., G_{d^2-1}} under the
// Hilbert-Schmidt inner product, with G_0 = I/sqrt(d) and all other
// elements traceless.
class OperatorBasis {
 public:
  explicit OperatorBasis(std::vector<ComplexMatrix> elements)
      : elements_(std::move(elements)) {
    if (elements_.empty()) fail(errc::invalid_argument, "empty operator basis");
    dim_ = elements_[0].rows();
    if (Index(elements_.size()) != dim_ * dim_)
      fail(errc::non_orthonormal_basis,
           "operator basis must have dim^2 elements");
    ComplexMatrix id = ComplexMatrix::Identity(dim_, dim_);
    if ((elements_[0] - id / std::sqrt(double(dim_))).norm() > 1e-12)
      fail(errc::non_orthonormal_basis, "first element must be I/sqrt(d)");
    for (size_t j = 0; j < elements_.size(); ++j) {
      const ComplexMatrix& g = elements_[j];
      if (g.rows() != dim_ || g.cols() != dim_)
        fail(errc::shape_mismatch, "basis elements must share one dimension");
      if ((g - g.adjoint()).norm() > 1e-12)
        fail(errc::not_hermitian, "basis elements must be hermitian");
      if (j > 0 && std::abs(g.trace()) > 1e-12)
        fail(errc::non_orthonormal_basis, "elements past G_0 must be traceless");
      for (size_t k = 0; k <= j; ++k) {
        Complex overlap = hs_inner(elements_[k], g);
        double target = (j == k) ? 1.0 : 0.0;
        if (std::abs(overlap - Complex(target)) > 1e-12)
          fail(errc::non_orthonormal_basis, "basis fails orthonormality");
      }
    }
  }

  Index dim() const { return dim_; }
  size_t size() const { return elements_.size(); }
  const ComplexMatrix& element(size_t j) const { return elements_.at(j); }
  const std::vector<ComplexMatrix>& elements() const { return elements_; }

 private:
  std::vector<ComplexMatrix> elements_;
  Index dim_ = 0;
};

// Generalized Gell-Mann basis: identity first, then symmetric and
// antisymmetric off-diagonal pairs in lexicographic order, then the
// diagonal ladder operators.
inline OperatorBasis gell_mann_basis(Index d) {
  if (d < 2) fail(errc::invalid_argument, "basis needs dimension at least 2");
  std::vector<ComplexMatrix> out;
  out.reserve(size_t(d * d));
  out.push_back(ComplexMatrix::Identity(d, d) / std::sqrt(double(d)));
  const double h = 1.0 / std::sqrt(2.0);
  for (Index j = 0; j < d; ++j)
    for (Index k = j + 1; k < d; ++k) {
      ComplexMatrix sym = ComplexMatrix::Zero(d, d);
      sym(j, k) = h;
      sym(k, j) = h;
      out.push_back(sym);
    }
  for (Index j = 0; j < d; ++j)
    for (Index k = j + 1; k < d; ++k) {
      ComplexMatrix anti = ComplexMatrix::Zero(d, d);
      anti(k, j) = Complex(0.0, h);
      anti(j, k) = Complex(0.0, -h);
      out.push_back(anti);
    }
  for (Index l = 1; l < d; ++l) {
    ComplexMatrix diag = ComplexMatrix::Zero(d, d);
    for (Index j = 0; j < l; ++j) diag(j, j) = 1.0;
    diag(l, l) = -double(l);
    diag /= std::sqrt(double(l) * double(l + 1));
    out.push_back(diag);
  }
  return OperatorBasis(std::move(out));
}

// Coordinates w_j = Tr(G_j rho). Real because rho and G_j are hermitian.
inline RealVector bloch_vector(const DensityMatrix& rho,
                               const OperatorBasis& basis) {
  if (rho.dim() != basis.dim())
    fail(errc::shape_mismatch, "state dimension does not match basis");
  RealVector w(Index(basis.size()));
  for (size_t j = 0; j < basis.size(); ++j) {
    Complex c = hs_inner(basis.element(j), rho.matrix());
    w(Index(j)) = c.real();
  }
  return w;
}

// Real matrix of the channel in operator-basis coordinates:
// t_jk = Tr(G_j Phi(G_k)), so bloch(Phi(rho)) = t * bloch(rho).
struct TransferMatrix {
  Index dim;
  RealMatrix t;
  OperatorBasis basis;
};

inline TransferMatrix transfer_matrix(const Channel& channel,
                                      const OperatorBasis& basis) {
  Index din = dim_in(channel);
  Index dout = dim_out(channel);
  if (din != dout)
    fail(errc::invalid_argument,
         "transfer matrix needs equal input and output dimensions");
  if (din != basis.dim())
    fail(errc::shape_mismatch, "channel dimension does not match basis");
  const Index n = Index(basis.size());
  RealMatrix t(n, n);
  for (Index k = 0; k < n; ++k) {
    ComplexMatrix image = apply_to_matrix(channel, basis.element(size_t(k)));
    for (Index j = 0; j < n; ++j) {
      Complex c = hs_inner(basis.element(size_t(j)), image);
      if (std::abs(c.imag()) > 1e-10)
        fail(errc::not_hermitian,
             "channel does not preserve hermiticity in this basis");
      t(j, k) = c.real();
    }
  }
  return TransferMatrix{din, std::move(t), basis};
}

// Coordinate factors of a measure-and-prepare channel: column k of w holds
// the coordinates of the prepared state R_k, column k of u those of the
// effect F_k. Entrywise t_jn = sum_k w(j,k) u(n,k), i.e. t = w * u^T.
struct WuFactors {
  RealMatrix w;
  RealMatrix u;
};

inline WuFactors wu_factorization(const HolevoChannel& channel,
                                  const OperatorBasis& basis) {
  if (channel.dim_in() != basis.dim() || channel.dim_out() != basis.dim())
    fail(errc::shape_mismatch, "channel dimension does not match basis");
  const Index n = Index(basis.size());
  const Index terms = Index(channel.pairs().size());
  RealMatrix w(n, terms);
  RealMatrix u(n, terms);
  for (Index k = 0; k < terms; ++k) {
    const HolevoPair& pair = channel.pairs()[size_t(k)];
    for (Index j = 0; j < n; ++j) {
      w(j, k) = hs_inner(basis.element(size_t(j)), pair.state.matrix()).real();
      u(j, k) = hs_inner(basis.element(size_t(j)), pair.effect).real();
    }
  }
  return WuFactors{std::move(w), std::move(u)};
}

struct DiagNecessaryResult {
  bool satisfied;
  double diagonal_sum;
};

// Qubit-only necessary condition on the traceless diagonal of the transfer
// matrix: |t_11| + |t_22| + |t_33| <= 1 for any measure-and-prepare channel.
inline DiagNecessaryResult ebt_diag_necessary(const TransferMatrix& transfer) {
  if (transfer.dim != 2)
    fail(errc::unsupported_dimension,
         "diagonal-sum condition is defined for qubit channels");
  double sum = std::abs(transfer.t(1, 1)) + std::abs(transfer.t(2, 2)) +
               std::abs(transfer.t(3, 3));
  return DiagNecessaryResult{sum <= 1.0 + 1e-10, sum};
}

}  // namespace ebtkit
