/**
 * Copyright 2026, the ebtkit developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE.txt file in the root directory of this source tree.
 */

#ifndef EBTKIT_EBT_ANALYSIS_HPP
#define EBTKIT_EBT_ANALYSIS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <ebtkit/channels.hpp>

namespace ebtkit {

//------------------------------------------------------------------------
// Necessary tests
//------------------------------------------------------------------------

struct PptResult {
  bool ppt;
  double min_eigenvalue;
};

// Partial transpose of the output factor; the channel can only break
// entanglement if the result stays positive.
inline PptResult is_ppt(const ChoiMatrix& choi) {
  ComplexMatrix pt =
      partial_transpose(choi.matrix(), choi.dims(), Factor::second);
  EigResult eig = hermitian_eig(pt);
  double mn = eig.eigenvalues(0);
  return PptResult{mn >= -tol::kPsd, mn};
}

struct NotEbtWitness {
  std::string test;
  double value;
  double bound;
};

// Spectral necessary conditions: a separable state on d (x) d needs at least
// d product terms (rank >= d), and its maximal eigenvalue cannot exceed the
// maximal eigenvalue of either marginal.
inline std::optional<NotEbtWitness> kraus_count_test(const ChoiMatrix& choi) {
  if (choi.dim_in() != choi.dim_out())
    fail(errc::invalid_argument, "kraus_count_test: square channels only");
  const Index d = choi.dim_in();
  const Index rank = numerical_rank(choi.matrix());
  if (rank < d)
    return NotEbtWitness{"kraus-count", double(rank), double(d)};

  EigResult eig = hermitian_eig(choi.matrix());
  double lmax = eig.eigenvalues(eig.eigenvalues.size() - 1);
  auto marginal_max = [&](Factor f) {
    ComplexMatrix m = partial_trace(choi.matrix(), choi.dims(), f);
    EigResult e = hermitian_eig(m);
    return e.eigenvalues(e.eigenvalues.size() - 1);
  };
  double bound = std::min(marginal_max(Factor::second),
                          marginal_max(Factor::first));
  if (lmax > bound + 1e-9)
    return NotEbtWitness{"max-eigenvalue", lmax, bound};
  return std::nullopt;
}

//------------------------------------------------------------------------
// Two-qubit separable construction
//------------------------------------------------------------------------

namespace detail {

// sigma_y (x) sigma_y in the computational basis.
inline ComplexMatrix spin_flip_kernel() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 3) = -1.0;
  m(1, 2) = 1.0;
  m(2, 1) = 1.0;
  m(3, 0) = -1.0;
  return m;
}

struct TakagiResult {
  RealVector values;      // descending, >= 0
  ComplexMatrix vectors;  // unitary; tau = vectors diag(values) vectors^T
};

// Factorization of a complex symmetric matrix through the real embedding
// K = [[Re, Im], [Im, -Re]]. Eigenvectors (u; w) of K with eigenvalue s > 0
// give con-eigenvectors u + iw; the kernel pairs up under J = [[0,I],[-I,0]]
// and contributes one vector per pair.
inline TakagiResult takagi_symmetric(const ComplexMatrix& tau) {
  const Index r = tau.rows();
  if (tau.cols() != r)
    fail(errc::shape_mismatch, "takagi_symmetric: square input required");
  if ((tau - tau.transpose()).norm() > 1e-9 * (1.0 + tau.norm()))
    fail(errc::invalid_argument, "takagi_symmetric: input is not symmetric");

  RealMatrix K(2 * r, 2 * r);
  K.topLeftCorner(r, r) = tau.real();
  K.topRightCorner(r, r) = tau.imag();
  K.bottomLeftCorner(r, r) = tau.imag();
  K.bottomRightCorner(r, r) = -tau.real();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(K);
  if (es.info() != Eigen::Success)
    fail(errc::tolerance_failure, "takagi_symmetric: eigensolver failed");
  const RealVector& ev = es.eigenvalues();
  double scale = std::max(std::abs(ev(0)), std::abs(ev(2 * r - 1)));
  double kern_tol = 1e-10 * (1.0 + scale);

  std::vector<std::pair<double, ComplexVector>> cols;
  std::vector<RealVector> kernel;
  for (Index i = 0; i < 2 * r; ++i) {
    if (ev(i) > kern_tol) {
      ComplexVector v(r);
      for (Index a = 0; a < r; ++a)
        v(a) = Complex(es.eigenvectors()(a, i), es.eigenvectors()(r + a, i));
      cols.emplace_back(ev(i), std::move(v));
    } else if (std::abs(ev(i)) <= kern_tol) {
      kernel.push_back(es.eigenvectors().col(i));
    }
  }

  // One con-eigenvector per J-pair of kernel vectors.
  auto apply_j = [r](const RealVector& x) {
    RealVector out(2 * r);
    out.head(r) = x.tail(r);
    out.tail(r) = -x.head(r);
    return out;
  };
  const size_t target = kernel.size() / 2;
  std::vector<RealVector> picked;
  for (const RealVector& cand : kernel) {
    if (picked.size() == target) break;
    RealVector p = cand;
    for (const RealVector& z : picked) {
      p -= z.dot(p) * z;
      RealVector jz = apply_j(z);
      p -= jz.dot(p) * jz;
    }
    if (p.norm() < 1e-6) continue;
    p.normalize();
    picked.push_back(p);
  }
  if (picked.size() != target)
    fail(errc::tolerance_failure, "takagi_symmetric: kernel pairing failed");
  for (const RealVector& p : picked) {
    ComplexVector v(r);
    for (Index a = 0; a < r; ++a) v(a) = Complex(p(a), p(r + a));
    cols.emplace_back(0.0, std::move(v));
  }
  if (Index(cols.size()) != r)
    fail(errc::tolerance_failure,
         "takagi_symmetric: spectrum did not split into " + std::to_string(r) +
             " con-eigenvectors");
  std::sort(cols.begin(), cols.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  TakagiResult out;
  out.values.resize(r);
  out.vectors.resize(r, r);
  for (Index i = 0; i < r; ++i) {
    out.values(i) = cols[i].first;
    out.vectors.col(i) = cols[i].second;
  }
  if ((out.vectors.adjoint() * out.vectors - ComplexMatrix::Identity(r, r))
          .norm() > 1e-8)
    fail(errc::tolerance_failure, "takagi_symmetric: basis is not unitary");
  ComplexMatrix rebuilt = out.vectors * out.values.asDiagonal().toDenseMatrix().cast<Complex>() *
                          out.vectors.transpose();
  if ((rebuilt - tau).norm() > 1e-8 * (1.0 + tau.norm()))
    fail(errc::tolerance_failure, "takagi_symmetric: factorization residual");
  return out;
}

struct SpinFlipBasis {
  std::array<double, 4> lambda;   // descending, zero padded
  std::vector<ComplexVector> ys;  // subnormalized, sum of projectors = rho
};

inline SpinFlipBasis spin_flip_basis(const ComplexMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4)
    fail(errc::shape_mismatch, "spin_flip_basis: need a two-qubit state");
  require_hermitian(rho, "spin_flip_basis");
  if (std::abs(rho.trace().real() - 1.0) > 1e-8)
    fail(errc::not_normalized, "spin_flip_basis: trace must be 1");

  EigResult eig = hermitian_eig(((rho + rho.adjoint()) / 2.0).eval());
  double cutoff = 4.0 * std::numeric_limits<double>::epsilon() *
                  std::max(std::abs(eig.eigenvalues(0)),
                           std::abs(eig.eigenvalues(3)));
  if (eig.eigenvalues(0) < -1e-8)
    fail(errc::not_psd, "spin_flip_basis: state is not positive");
  std::vector<ComplexVector> xs;
  for (Index i = 3; i >= 0; --i)
    if (eig.eigenvalues(i) > cutoff)
      xs.push_back(std::sqrt(eig.eigenvalues(i)) * eig.eigenvectors.col(i));
  const Index r = Index(xs.size());

  ComplexMatrix flip = spin_flip_kernel();
  ComplexMatrix tau(r, r);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j)
      tau(i, j) = (xs[i].adjoint() * flip * xs[j].conjugate())(0, 0);
  TakagiResult tk = takagi_symmetric(tau);

  SpinFlipBasis out;
  out.lambda = {0.0, 0.0, 0.0, 0.0};
  for (Index i = 0; i < r; ++i) out.lambda[size_t(i)] = tk.values(i);
  for (Index k = 0; k < r; ++k) {
    ComplexVector y = ComplexVector::Zero(4);
    for (Index j = 0; j < r; ++j) y += tk.vectors(j, k) * xs[j];
    out.ys.push_back(std::move(y));
  }
  return out;
}

// Angles alpha with sum_j lambda_j exp(i alpha_j) = 0, for a descending
// quadrilateral of side lengths satisfying lambda_0 <= lambda_1+2+3.
inline std::array<double, 4> closure_phases(const std::array<double, 4>& lam) {
  constexpr double pi = std::numbers::pi;
  std::array<double, 4> a{0.0, 0.0, 0.0, 0.0};
  if (lam[0] <= 1e-12) return a;
  double lo = std::max(lam[0] - lam[1], lam[2] - lam[3]);
  double hi = std::min(lam[0] + lam[1], lam[2] + lam[3]);
  if (lo > hi) lo = hi = (lo + hi) / 2.0;  // boundary within tolerance
  double s = (lo + hi) / 2.0;
  if (s <= 1e-12) {
    // Opposite equal pairs.
    a = {0.0, pi, 0.0, pi};
    return a;
  }
  auto clamp1 = [](double x) { return std::min(1.0, std::max(-1.0, x)); };
  a[0] = std::acos(
      clamp1((lam[0] * lam[0] + s * s - lam[1] * lam[1]) / (2.0 * lam[0] * s)));
  if (lam[1] > 1e-12)
    a[1] = -std::acos(clamp1((lam[1] * lam[1] + s * s - lam[0] * lam[0]) /
                             (2.0 * lam[1] * s)));
  if (lam[2] > 1e-12) {
    a[2] = pi - std::acos(clamp1((lam[2] * lam[2] + s * s - lam[3] * lam[3]) /
                                 (2.0 * lam[2] * s)));
    if (lam[3] > 1e-12)
      a[3] = pi + std::acos(clamp1((lam[3] * lam[3] + s * s - lam[2] * lam[2]) /
                                   (2.0 * lam[3] * s)));
  }
  return a;
}

// Splits a product vector on dims into unit factors and a weight.
inline SeparableTerm factor_product_vector(const ComplexVector& z,
                                           BipartiteDims dims) {
  ComplexMatrix zmat(dims.dim_a, dims.dim_b);
  for (Index a = 0; a < dims.dim_a; ++a)
    for (Index b = 0; b < dims.dim_b; ++b) zmat(a, b) = z(a * dims.dim_b + b);
  Eigen::JacobiSVD<ComplexMatrix> svd(
      zmat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SeparableTerm t;
  t.weight = z.squaredNorm();
  t.left = svd.matrixU().col(0);
  t.right = svd.matrixV().col(0).conjugate();
  return t;
}

}  // namespace detail

// Wootters concurrence of a two-qubit state; zero exactly on the separable
// set.
inline double two_qubit_concurrence(const ComplexMatrix& rho) {
  detail::SpinFlipBasis basis = detail::spin_flip_basis(rho);
  const auto& l = basis.lambda;
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

// Constructive product-state mixture for a separable two-qubit state: spin
// flip diagonalization, phase closure, then a Hadamard recombination whose
// outputs all have vanishing self overlap and are therefore products.
inline SeparableDecomposition two_qubit_separable_decomposition(
    const ComplexMatrix& rho) {
  detail::SpinFlipBasis basis = detail::spin_flip_basis(rho);
  const auto& lam = basis.lambda;
  double c = lam[0] - lam[1] - lam[2] - lam[3];
  if (c > 1e-9)
    fail(errc::not_ebt_input,
         "two_qubit_separable_decomposition: concurrence " +
             std::to_string(c) + " is positive, state is entangled");

  const BipartiteDims dims{2, 2};
  std::vector<SeparableTerm> terms;
  if (basis.ys.size() == 1) {
    terms.push_back(detail::factor_product_vector(basis.ys[0], dims));
  } else {
    std::array<double, 4> alpha = detail::closure_phases(lam);
    std::vector<ComplexVector> yp;
    for (size_t j = 0; j < basis.ys.size(); ++j)
      yp.push_back(std::exp(Complex(0.0, -alpha[j] / 2.0)) * basis.ys[j]);
    static const int kHadamard[4][4] = {{1, 1, 1, 1},
                                        {1, 1, -1, -1},
                                        {1, -1, 1, -1},
                                        {1, -1, -1, 1}};
    for (int i = 0; i < 4; ++i) {
      ComplexVector z = ComplexVector::Zero(4);
      for (size_t j = 0; j < yp.size(); ++j)
        z += 0.5 * double(kHadamard[i][j]) * yp[j];
      if (z.squaredNorm() > 1e-14)
        terms.push_back(detail::factor_product_vector(z, dims));
    }
  }
  SeparableDecomposition dec(dims, std::move(terms));
  double resid = dec.residual_against(rho);
  if (resid > 1e-8)
    fail(errc::tolerance_failure,
         "two_qubit_separable_decomposition: reconstruction residual " +
             std::to_string(resid));
  dec.residual = resid;
  return dec;
}

//------------------------------------------------------------------------
// Rank-d extraction and greedy peeling
//------------------------------------------------------------------------

// For a separable state of rank exactly d = dim_a, the range is spanned by d
// product vectors. Two random combinations of the reshaped range basis share
// the left factors as eigenvectors of their pencil; contracting the state
// against the dual left basis recovers weights and right factors.
inline std::optional<SeparableDecomposition> rank_d_separable_decomposition(
    const ChoiMatrix& choi, std::uint64_t seed = 1) {
  const Index d = choi.dim_in();
  const Index db = choi.dim_out();
  if (d != db || d < 2) return std::nullopt;
  const Index n = d * db;
  ComplexMatrix rho = choi.matrix() / choi.matrix().trace().real();

  EigResult eig = hermitian_eig(rho);
  double cutoff = double(n) * std::numeric_limits<double>::epsilon() *
                  std::max(std::abs(eig.eigenvalues(0)),
                           std::abs(eig.eigenvalues(n - 1)));
  Index rank = 0;
  for (Index i = 0; i < n; ++i)
    if (eig.eigenvalues(i) > cutoff) ++rank;
  if (rank != d) return std::nullopt;

  std::vector<ComplexMatrix> sheets;
  for (Index i = 0; i < d; ++i) {
    ComplexVector x = std::sqrt(eig.eigenvalues(n - 1 - i)) *
                      eig.eigenvectors.col(n - 1 - i);
    ComplexMatrix u(d, db);
    for (Index a = 0; a < d; ++a)
      for (Index b = 0; b < db; ++b) u(a, b) = x(a * db + b);
    sheets.push_back(std::move(u));
  }

  detail::GaussianStream stream(seed);
  for (int trial = 0; trial < 20; ++trial) {
    ComplexMatrix m = ComplexMatrix::Zero(d, db);
    ComplexMatrix nn = ComplexMatrix::Zero(d, db);
    for (Index i = 0; i < d; ++i) {
      m += Complex(stream.normal(), stream.normal()) * sheets[size_t(i)];
      nn += Complex(stream.normal(), stream.normal()) * sheets[size_t(i)];
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(nn);
    if (svd.singularValues()(d - 1) <= 1e-8 * svd.singularValues()(0))
      continue;
    ComplexMatrix pencil = m * nn.inverse();
    Eigen::ComplexEigenSolver<ComplexMatrix> ces(pencil);
    if (ces.info() != Eigen::Success) continue;

    double gmax = ces.eigenvalues().cwiseAbs().maxCoeff();
    bool separated = true;
    for (Index i = 0; i < d && separated; ++i)
      for (Index j = i + 1; j < d; ++j)
        if (std::abs(ces.eigenvalues()(i) - ces.eigenvalues()(j)) <
            1e-6 * (1.0 + gmax)) {
          separated = false;
          break;
        }
    if (!separated) continue;

    ComplexMatrix lefts = ces.eigenvectors();
    Eigen::JacobiSVD<ComplexMatrix> svda(lefts);
    if (svda.singularValues()(d - 1) <= 1e-8) continue;
    ComplexMatrix dual = lefts.inverse();

    std::vector<SeparableTerm> terms;
    double total = 0.0;
    bool ok = true;
    for (Index i = 0; i < d; ++i) {
      ComplexMatrix contracted = ComplexMatrix::Zero(db, db);
      for (Index a = 0; a < d; ++a)
        for (Index ap = 0; ap < d; ++ap)
          contracted += dual(i, a) * std::conj(dual(i, ap)) *
                        rho.block(a * db, ap * db, db, db);
      contracted = ((contracted + contracted.adjoint()) / 2.0).eval();
      double w = contracted.trace().real();
      if (w <= 1e-10) {
        ok = false;
        break;
      }
      EigResult ec = hermitian_eig(contracted);
      ComplexVector right = ec.eigenvectors.col(db - 1);
      if ((contracted - ec.eigenvalues(db - 1) * right * right.adjoint())
              .norm() > 1e-8 * (1.0 + w)) {
        ok = false;
        break;
      }
      SeparableTerm t;
      t.weight = w;
      t.left = lefts.col(i).normalized();
      t.right = right;
      terms.push_back(std::move(t));
      total += w;
    }
    if (!ok || std::abs(total - 1.0) > 1e-7) continue;
    for (auto& t : terms) t.weight /= total;
    try {
      SeparableDecomposition dec(choi.dims(), terms);
      double resid = dec.residual_against(rho);
      if (resid <= 1e-9) {
        dec.residual = resid;
        return dec;
      }
    } catch (const Error&) {
    }
  }
  return std::nullopt;
}

// Greedy fallback: repeatedly locate a dominant product vector by alternating
// eigenvector sweeps and peel off the largest weight that keeps the residual
// positive. Succeeds on block structured states; returns nothing on failure.
inline std::optional<SeparableDecomposition> peel_separable_decomposition(
    const ComplexMatrix& rho_in, BipartiteDims dims, int max_terms = 200) {
  const Index n = dims.total();
  if (rho_in.rows() != n || rho_in.cols() != n)
    fail(errc::shape_mismatch, "peel_separable_decomposition: shape mismatch");
  ComplexMatrix rho = ((rho_in + rho_in.adjoint()) / 2.0).eval();
  rho /= rho.trace().real();
  ComplexMatrix res = rho;

  auto sweep_from = [&](const ComplexMatrix& state, ComplexVector b) {
    ComplexVector a = ComplexVector::Zero(dims.dim_a);
    double prev = -1.0;
    for (int sweep = 0; sweep < 80; ++sweep) {
      ComplexMatrix ma(dims.dim_a, dims.dim_a);
      for (Index j = 0; j < dims.dim_a; ++j)
        for (Index k = 0; k < dims.dim_a; ++k)
          ma(j, k) =
              (b.adjoint() * state.block(j * dims.dim_b, k * dims.dim_b,
                                         dims.dim_b, dims.dim_b) * b)(0, 0);
      a = hermitian_eig(((ma + ma.adjoint()) / 2.0).eval())
              .eigenvectors.col(dims.dim_a - 1);
      ComplexMatrix mb = ComplexMatrix::Zero(dims.dim_b, dims.dim_b);
      for (Index j = 0; j < dims.dim_a; ++j)
        for (Index k = 0; k < dims.dim_a; ++k)
          mb += std::conj(a(j)) * a(k) *
                state.block(j * dims.dim_b, k * dims.dim_b, dims.dim_b,
                            dims.dim_b);
      EigResult ev = hermitian_eig(((mb + mb.adjoint()) / 2.0).eval());
      b = ev.eigenvectors.col(dims.dim_b - 1);
      double val = ev.eigenvalues(dims.dim_b - 1);
      if (std::abs(val - prev) < 1e-13 * (1.0 + std::abs(val))) break;
      prev = val;
    }
    return std::pair<ComplexVector, ComplexVector>(a, b);
  };

  // Symmetric states have degenerate marginals that leave the sweep stuck at
  // non-product saddle points, so every peel step tries several deterministic
  // starting vectors and takes the first one that stays on the support. The
  // sweep itself runs on a support-penalized copy of the residual: once terms
  // have been removed, the best unconstrained product can drift off the
  // shrunken support, and only on-support products are peelable.
  detail::GaussianStream init_stream(0x9ee1u);
  std::vector<SeparableTerm> terms;
  for (int it = 0; it < max_terms; ++it) {
    double remaining = res.trace().real();
    if (remaining <= 1e-9) break;

    EigResult er = hermitian_eig(res);
    double cutoff = double(n) * std::numeric_limits<double>::epsilon() *
                        std::max(std::abs(er.eigenvalues(0)),
                                 std::abs(er.eigenvalues(n - 1))) +
                    1e-15;
    ComplexMatrix support = ComplexMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      if (er.eigenvalues(i) > cutoff)
        support += er.eigenvectors.col(i) * er.eigenvectors.col(i).adjoint();
    double gamma = 10.0 * er.eigenvalues(n - 1) + 1.0;
    ComplexMatrix penalized =
        res - gamma * (ComplexMatrix::Identity(n, n) - support);

    std::vector<ComplexVector> inits;
    inits.push_back(hermitian_eig(partial_trace(res, dims, Factor::first))
                        .eigenvectors.col(dims.dim_b - 1));
    // Right singular vectors of reshaped support eigenvectors point at the
    // dominant product directions inside the support.
    for (Index i = n - 1; i >= 0; --i) {
      if (er.eigenvalues(i) <= cutoff) continue;
      Eigen::Map<const ComplexMatrix> sheet(er.eigenvectors.col(i).data(),
                                            dims.dim_b, dims.dim_a);
      Eigen::JacobiSVD<ComplexMatrix> svd(sheet, Eigen::ComputeThinU);
      inits.push_back(svd.matrixU().col(0));
    }
    for (int r = 0; r < 4; ++r)
      inits.push_back(init_stream.matrix(dims.dim_b, 1).col(0).normalized());

    bool peeled = false;
    for (const ComplexVector& b0 : inits) {
      auto [a, b] = sweep_from(penalized, b0);
      // Alternating projections between the support subspace and the product
      // manifold sharpen the sweep output onto an exactly peelable product.
      for (int polish = 0; polish < 60; ++polish) {
        ComplexVector sp = support * kron(a, b);
        double nn = sp.norm();
        if (nn < 1e-12) break;
        sp /= nn;
        Eigen::Map<const ComplexMatrix> sheet(sp.data(), dims.dim_b,
                                              dims.dim_a);
        Eigen::JacobiSVD<ComplexMatrix> svd(
            sheet, Eigen::ComputeThinU | Eigen::ComputeThinV);
        b = svd.matrixU().col(0);
        a = svd.matrixV().col(0).conjugate();
        ComplexVector refined = kron(a, b);
        if ((refined - support * refined).norm() < 1e-13) break;
      }
      ComplexVector p = kron(a, b);
      double inv = 0.0;
      double inside = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (er.eigenvalues(i) <= cutoff) continue;
        double overlap = std::norm(er.eigenvectors.col(i).dot(p));
        inv += overlap / er.eigenvalues(i);
        inside += overlap;
      }
      if (1.0 - inside > 1e-7) continue;  // leaves the support
      if (inv <= 0.0) continue;
      double t = std::min(1.0 / inv, remaining);
      if (t <= 1e-12) continue;

      ComplexMatrix trial = res - t * p * p.adjoint();
      trial = ((trial + trial.adjoint()) / 2.0).eval();
      if (hermitian_eig(trial).eigenvalues(0) < -1e-8) continue;
      res = std::move(trial);
      SeparableTerm term;
      term.weight = t;
      term.left = a;
      term.right = b;
      terms.push_back(std::move(term));
      peeled = true;
      break;
    }
    if (!peeled) break;  // the refit below may still absorb the leftovers
  }
  if (terms.empty()) return std::nullopt;

  // Greedy step sizes carry small eigendecomposition errors that compound
  // across iterations, so the weights are refit by least squares over the
  // collected product projectors, pruning negatives one at a time.
  const Index m = Index(terms.size());
  std::vector<ComplexVector> prods;
  for (const auto& t : terms) prods.push_back(kron(t.left, t.right));
  RealMatrix gram(m, m);
  RealVector target(m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j)
      gram(i, j) = std::norm(prods[size_t(i)].dot(prods[size_t(j)]));
    target(i) = (prods[size_t(i)].adjoint() * rho * prods[size_t(i)])(0, 0)
                    .real();
  }
  std::vector<bool> active(size_t(m), true);
  RealVector weights = RealVector::Zero(m);
  for (Index round = 0; round < m; ++round) {
    std::vector<Index> idx;
    for (Index i = 0; i < m; ++i)
      if (active[size_t(i)]) idx.push_back(i);
    if (idx.empty()) return std::nullopt;
    const Index k = Index(idx.size());
    RealMatrix g(k, k);
    RealVector r(k);
    for (Index i = 0; i < k; ++i) {
      for (Index j = 0; j < k; ++j) g(i, j) = gram(idx[size_t(i)], idx[size_t(j)]);
      r(i) = target(idx[size_t(i)]);
    }
    g.diagonal().array() += 1e-12;
    RealVector w = g.ldlt().solve(r);
    Index worst = -1;
    double most_negative = -1e-10;
    for (Index i = 0; i < k; ++i)
      if (w(i) < most_negative) {
        most_negative = w(i);
        worst = i;
      }
    if (worst < 0) {
      weights.setZero();
      for (Index i = 0; i < k; ++i)
        weights(idx[size_t(i)]) = std::max(w(i), 0.0);
      break;
    }
    active[size_t(idx[size_t(worst)])] = false;
  }

  std::vector<SeparableTerm> kept;
  double total = 0.0;
  for (Index i = 0; i < m; ++i) {
    if (weights(i) <= 1e-14) continue;
    SeparableTerm t = terms[size_t(i)];
    t.weight = weights(i);
    total += t.weight;
    kept.push_back(std::move(t));
  }
  if (kept.empty() || total <= 0.0) return std::nullopt;
  for (auto& t : kept) t.weight /= total;
  try {
    SeparableDecomposition dec(dims, kept);
    double resid = dec.residual_against(rho);
    if (resid > 1e-8) return std::nullopt;
    dec.residual = resid;
    return dec;
  } catch (const Error&) {
    return std::nullopt;
  }
}

//------------------------------------------------------------------------
// Decomposition reduction
//------------------------------------------------------------------------

// Shrinks a product decomposition of a rank-d state to at most d terms.
// Any d+1 product vectors inside the d-dimensional range are dependent; the
// dependent terms share a common right factor and merge into the spectral
// decomposition of their left marginal, strictly reducing the count.
inline SeparableDecomposition reduce_decomposition(
    const SeparableDecomposition& dec) {
  const Index d = dec.dims().dim_a;
  const Index db = dec.dims().dim_b;
  if (Index(dec.size()) <= d) return dec;

  ComplexMatrix rho = dec.reconstruct();
  ComplexMatrix rho_a = partial_trace(rho, dec.dims(), Factor::second);
  if (numerical_rank(rho) != d || numerical_rank(rho_a) != d)
    fail(errc::precondition_rank_mismatch,
         "reduce_decomposition: state rank " +
             std::to_string(numerical_rank(rho)) + " and left marginal rank " +
             std::to_string(numerical_rank(rho_a)) + " must both equal " +
             std::to_string(d));

  std::vector<SeparableTerm> terms = dec.terms();
  while (Index(terms.size()) > d) {
    const Index k = Index(terms.size());
    ComplexMatrix lefts(d, k);
    for (Index j = 0; j < k; ++j) lefts.col(j) = terms[size_t(j)].left;
    Eigen::ColPivHouseholderQR<ComplexMatrix> qr(lefts);
    if (qr.rank() < d)
      fail(errc::precondition_rank_mismatch,
           "reduce_decomposition: left vectors no longer span the marginal");

    std::vector<Index> cand;
    std::vector<bool> is_pivot(size_t(k), false);
    for (Index j = 0; j < d; ++j) {
      Index idx = qr.colsPermutation().indices()(j);
      cand.push_back(idx);
      is_pivot[size_t(idx)] = true;
    }
    for (Index j = 0; j < k; ++j)
      if (!is_pivot[size_t(j)]) {
        cand.push_back(j);
        break;
      }

    ComplexMatrix prods(d * db, d + 1);
    for (Index c = 0; c <= d; ++c)
      prods.col(c) =
          kron(terms[size_t(cand[size_t(c)])].left,
               terms[size_t(cand[size_t(c)])].right);
    Eigen::JacobiSVD<ComplexMatrix> svd(prods, Eigen::ComputeFullV);
    ComplexVector alpha = svd.matrixV().col(d);

    double amax = alpha.cwiseAbs().maxCoeff();
    std::vector<Index> merge_set;
    Index pivot_idx = 0;
    double pivot_mag = -1.0;
    for (Index c = 0; c <= d; ++c) {
      if (std::abs(alpha(c)) > 1e-9 * amax) {
        merge_set.push_back(cand[size_t(c)]);
        if (std::abs(alpha(c)) > pivot_mag) {
          pivot_mag = std::abs(alpha(c));
          pivot_idx = cand[size_t(c)];
        }
      }
    }
    if (merge_set.size() < 2)
      fail(errc::merge_stall, "reduce_decomposition: degenerate null vector");

    const ComplexVector nu = terms[size_t(pivot_idx)].right;
    for (Index idx : merge_set)
      if (std::abs(nu.dot(terms[size_t(idx)].right)) < 1.0 - 1e-7)
        fail(errc::merge_stall,
             "reduce_decomposition: dependent terms do not share a right "
             "factor");

    ComplexMatrix tilde = ComplexMatrix::Zero(d, d);
    for (Index idx : merge_set)
      tilde += terms[size_t(idx)].weight * terms[size_t(idx)].left *
               terms[size_t(idx)].left.adjoint();
    EigResult et = hermitian_eig(tilde);
    std::vector<SeparableTerm> merged;
    double emax = et.eigenvalues(d - 1);
    for (Index i = 0; i < d; ++i)
      if (et.eigenvalues(i) > 1e-12 * emax) {
        SeparableTerm t;
        t.weight = et.eigenvalues(i);
        t.left = et.eigenvectors.col(i);
        t.right = nu;
        merged.push_back(std::move(t));
      }
    if (merged.size() >= merge_set.size())
      fail(errc::merge_stall, "reduce_decomposition: no strict decrease");

    std::vector<bool> drop(size_t(k), false);
    for (Index idx : merge_set) drop[size_t(idx)] = true;
    std::vector<SeparableTerm> next;
    for (Index j = 0; j < k; ++j)
      if (!drop[size_t(j)]) next.push_back(terms[size_t(j)]);
    for (auto& t : merged) next.push_back(std::move(t));
    terms = std::move(next);
  }

  SeparableDecomposition out(dec.dims(), std::move(terms));
  double resid = out.residual_against(rho);
  if (resid > 1e-8)
    fail(errc::merge_stall,
         "reduce_decomposition: reconstruction drifted by " +
             std::to_string(resid));
  out.residual = resid;
  return out;
}

//------------------------------------------------------------------------
// Classification
//------------------------------------------------------------------------

enum class EbtStatus { not_ebt, ebt, undecided };

struct EbtDiagnostics {
  Index choi_rank = 0;
  double min_pt_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

struct EbtVerdict {
  EbtStatus status = EbtStatus::undecided;
  std::optional<HolevoChannel> certificate;
  std::optional<SeparableDecomposition> decomposition;
  std::optional<NotEbtWitness> witness;
  std::optional<EbtDiagnostics> diagnostics;
  double certificate_residual = 0.0;
};

namespace detail {

inline HolevoChannel certificate_from_decomposition(
    const SeparableDecomposition& dec, double trace) {
  HolevoChannel base = holevo_from_separable_choi(dec, false);
  if (std::abs(trace - 1.0) <= 1e-12) return base;
  std::vector<HolevoPair> pairs;
  for (const auto& p : base.pairs())
    pairs.push_back({p.state, (trace * p.effect).eval()});
  return HolevoChannel(std::move(pairs));
}

}  // namespace detail

// Decision procedure: measure-prepare inputs are certified directly; spectral
// tests and the partial transpose reject; PPT survivors get a constructed
// decomposition where one is known (any two-qubit case, rank-d pencils, block
// peeling), otherwise the verdict stays undecided with diagnostics.
inline EbtVerdict classify(const Channel& ch) {
  if (dim_in(ch) != dim_out(ch))
    fail(errc::invalid_argument, "classify: channel must map a space to itself");
  const Index d = dim_in(ch);
  const ChoiMatrix choi = choi_of(ch);
  const Index n = d * d;

  EbtDiagnostics diag;
  diag.choi_rank = numerical_rank(choi.matrix());
  PptResult ppt = is_ppt(choi);
  diag.min_pt_eigenvalue = ppt.min_eigenvalue;
  diag.max_eigenvalue = hermitian_eig(choi.matrix()).eigenvalues(n - 1);

  EbtVerdict verdict;
  verdict.diagnostics = diag;

  if (const auto* h = std::get_if<HolevoChannel>(&ch)) {
    HolevoChannel refined = holevo_from_rank1_kraus(kraus_from_holevo(*h));
    double resid = (choi_of(refined).matrix() - choi.matrix()).norm();
    if (resid > tol::kCertificate)
      fail(errc::tolerance_failure,
           "classify: rank-one refinement drifted by " + std::to_string(resid));
    verdict.status = EbtStatus::ebt;
    verdict.certificate = std::move(refined);
    verdict.certificate_residual = resid;
    return verdict;
  }

  if (auto w = kraus_count_test(choi)) {
    verdict.status = EbtStatus::not_ebt;
    verdict.witness = std::move(w);
    return verdict;
  }
  if (!ppt.ppt) {
    verdict.status = EbtStatus::not_ebt;
    verdict.witness = NotEbtWitness{"partial-transpose", ppt.min_eigenvalue, 0.0};
    return verdict;
  }

  const double trace = choi.matrix().trace().real();
  std::optional<SeparableDecomposition> dec;
  if (d == 2) {
    try {
      dec = two_qubit_separable_decomposition((choi.matrix() / trace).eval());
    } catch (const Error&) {
      dec.reset();
    }
  } else {
    if (diag.choi_rank == d) dec = rank_d_separable_decomposition(choi);
    if (!dec) dec = peel_separable_decomposition(choi.matrix(), choi.dims());
  }
  if (dec) {
    HolevoChannel cert = detail::certificate_from_decomposition(*dec, trace);
    double resid = (choi_of(cert).matrix() - choi.matrix()).norm();
    if (resid <= tol::kCertificate) {
      verdict.status = EbtStatus::ebt;
      verdict.certificate = std::move(cert);
      verdict.decomposition = std::move(dec);
      verdict.certificate_residual = resid;
      return verdict;
    }
  }
  verdict.status = EbtStatus::undecided;
  return verdict;
}

}  // namespace ebtkit

#endif
