/**
 * Copyright 2026, the ebtkit developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE.txt file in the root directory of this source tree.
 */

#ifndef EBTKIT_EXTREMALITY_HPP
#define EBTKIT_EXTREMALITY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <ebtkit/channels.hpp>
#include <ebtkit/ebt_analysis.hpp>

namespace ebtkit {

enum class CptExtremality { yes, no, numerically_marginal };
enum class StructuralClass { cq, extreme_cq, qc, point, block_projection, general };

struct ExtremalityReport {
  CptExtremality cpt_extreme = CptExtremality::no;
  double gram_min_singular_value = 0.0;
  StructuralClass structural_class = StructuralClass::general;
  std::optional<ComplexMatrix> cq_overlap_matrix;
};

//------------------------------------------------------------------------
// Structural detection
//------------------------------------------------------------------------

namespace detail {

struct StructureData {
  StructuralClass cls = StructuralClass::general;
  std::vector<ComplexVector> cq_basis;   // measured basis f_k
  std::vector<ComplexMatrix> cq_states;  // prepared states R_k
  std::vector<ComplexVector> qc_basis;   // register basis e_k
  std::vector<ComplexMatrix> qc_effects;
  ComplexMatrix point_state;             // unnormalized image, trace = Tr(choi)
  std::vector<ComplexMatrix> blocks;
};

inline ComplexMatrix hermitian_probe(Index d, std::uint64_t seed) {
  GaussianStream g(seed);
  ComplexMatrix y = g.matrix(d, d);
  return ((y + y.adjoint()) / 2.0).eval();
}

inline bool rank_one_within(const ComplexMatrix& m, double rel) {
  EigResult eig = hermitian_eig(m);
  const Index n = m.rows();
  double top = eig.eigenvalues(n - 1);
  if (top <= 0.0) return false;
  double second = (n > 1) ? std::max(std::abs(eig.eigenvalues(n - 2)),
                                     std::abs(eig.eigenvalues(0)))
                          : 0.0;
  return second <= rel * top;
}

// A channel is a basis measurement followed by preparation exactly when its
// Choi matrix is sum_k P_{u_k} (x) R_k / d for an orthonormal {u_k}: probe the
// input factor with a random observable, diagonalize, and verify the rebuild.
inline bool detect_cq(const ChoiMatrix& choi, StructureData& out) {
  const Index din = choi.dim_in(), dout = choi.dim_out();
  const ComplexMatrix& c = choi.matrix();
  for (int attempt = 0; attempt < 3; ++attempt) {
    ComplexMatrix y = hermitian_probe(dout, 0x6eb70001 + attempt);
    ComplexMatrix s(din, din);
    for (Index j = 0; j < din; ++j)
      for (Index k = 0; k < din; ++k)
        s(j, k) = (c.block(j * dout, k * dout, dout, dout) * y).trace();
    EigResult es = hermitian_eig(((s + s.adjoint()) / 2.0).eval());

    std::vector<ComplexVector> basis;
    std::vector<ComplexMatrix> states;
    ComplexMatrix rebuilt = ComplexMatrix::Zero(c.rows(), c.cols());
    bool valid = true;
    for (Index k = 0; k < din && valid; ++k) {
      ComplexVector u = es.eigenvectors.col(k);
      ComplexMatrix r = ComplexMatrix::Zero(dout, dout);
      for (Index j = 0; j < din; ++j)
        for (Index l = 0; l < din; ++l)
          r += std::conj(u(j)) * u(l) * c.block(j * dout, l * dout, dout, dout);
      r = (double(din) * (r + r.adjoint()) / 2.0).eval();
      rebuilt += kron((u * u.adjoint()).eval(), r) / double(din);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> psd(r, Eigen::EigenvaluesOnly);
      if (psd.eigenvalues().minCoeff() < -1e-9 ||
          std::abs(r.trace().real() - 1.0) > 1e-8)
        valid = false;
      basis.push_back(u.conjugate());
      states.push_back(std::move(r));
    }
    if (!valid) continue;
    if ((rebuilt - c).norm() > 1e-9 * (1.0 + c.norm())) continue;
    out.cq_basis = std::move(basis);
    out.cq_states = std::move(states);
    return true;
  }
  return false;
}

// Mirror of detect_cq on the output factor: Choi of the form
// sum_k conj(E_k) (x) P_{e_k} / d with a POVM {E_k} and orthonormal {e_k}.
inline bool detect_qc(const ChoiMatrix& choi, StructureData& out) {
  const Index din = choi.dim_in(), dout = choi.dim_out();
  const ComplexMatrix& c = choi.matrix();
  for (int attempt = 0; attempt < 3; ++attempt) {
    ComplexMatrix x = hermitian_probe(din, 0x6eb70011 + attempt);
    ComplexMatrix s = ComplexMatrix::Zero(dout, dout);
    for (Index j = 0; j < din; ++j)
      for (Index l = 0; l < din; ++l)
        s += x(l, j) * c.block(j * dout, l * dout, dout, dout);
    EigResult es = hermitian_eig(((s + s.adjoint()) / 2.0).eval());

    std::vector<ComplexVector> basis;
    std::vector<ComplexMatrix> effects;
    ComplexMatrix rebuilt = ComplexMatrix::Zero(c.rows(), c.cols());
    ComplexMatrix sum = ComplexMatrix::Zero(din, din);
    bool valid = true;
    for (Index k = 0; k < dout && valid; ++k) {
      ComplexVector e = es.eigenvectors.col(k);
      ComplexMatrix conj_e(din, din);
      for (Index j = 0; j < din; ++j)
        for (Index l = 0; l < din; ++l)
          conj_e(j, l) =
              (e.adjoint() * c.block(j * dout, l * dout, dout, dout) * e)(0, 0);
      conj_e = (double(din) * (conj_e + conj_e.adjoint()) / 2.0).eval();
      rebuilt += kron(conj_e, (e * e.adjoint()).eval()) / double(din);
      ComplexMatrix effect = conj_e.conjugate();
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> psd(effect,
                                                       Eigen::EigenvaluesOnly);
      if (psd.eigenvalues().minCoeff() < -1e-9) valid = false;
      sum += effect;
      basis.push_back(std::move(e));
      effects.push_back(std::move(effect));
    }
    if (!valid) continue;
    if ((sum - ComplexMatrix::Identity(din, din)).norm() > 1e-8) continue;
    if ((rebuilt - c).norm() > 1e-9 * (1.0 + c.norm())) continue;
    out.qc_basis = std::move(basis);
    out.qc_effects = std::move(effects);
    return true;
  }
  return false;
}

// Pinchings send u v* to itself inside a block and to zero across blocks, so
// the connected components of the image of a generic observable recover the
// projectors.
inline bool detect_block_projection(const ChoiMatrix& choi,
                                    StructureData& out) {
  const Index d = choi.dim_in();
  if (choi.dim_out() != d) return false;
  const ComplexMatrix& c = choi.matrix();
  for (int attempt = 0; attempt < 2; ++attempt) {
    ComplexMatrix h = hermitian_probe(d, 0x6eb70021 + attempt);
    ComplexMatrix b = apply_to_matrix(choi, h);
    EigResult eb = hermitian_eig(((b + b.adjoint()) / 2.0).eval());

    std::vector<int> comp(size_t(d), -1);
    int ncomp = 0;
    for (Index i = 0; i < d; ++i) {
      if (comp[size_t(i)] >= 0) continue;
      comp[size_t(i)] = ncomp;
      std::vector<Index> queue{i};
      while (!queue.empty()) {
        Index a = queue.back();
        queue.pop_back();
        for (Index j = 0; j < d; ++j) {
          if (comp[size_t(j)] >= 0) continue;
          ComplexMatrix cross = eb.eigenvectors.col(a) *
                                eb.eigenvectors.col(j).adjoint();
          if (apply_to_matrix(choi, cross).norm() > 1e-9) {
            comp[size_t(j)] = ncomp;
            queue.push_back(j);
          }
        }
      }
      ++ncomp;
    }
    std::vector<ComplexMatrix> blocks(
        size_t(ncomp), ComplexMatrix::Zero(d, d));
    for (Index i = 0; i < d; ++i)
      blocks[size_t(comp[size_t(i)])] +=
          eb.eigenvectors.col(i) * eb.eigenvectors.col(i).adjoint();
    try {
      ChoiMatrix cand = choi_of(KrausChannel(blocks));
      if ((cand.matrix() - c).norm() <= 1e-9 * (1.0 + c.norm())) {
        out.blocks = std::move(blocks);
        return true;
      }
    } catch (const Error&) {
    }
  }
  return false;
}

inline StructureData analyze_structure(const Channel& ch) {
  StructureData out;
  ChoiMatrix choi = choi_of(ch);
  const Index din = choi.dim_in();
  const ComplexMatrix& c = choi.matrix();

  ComplexMatrix image = partial_trace(c, choi.dims(), Factor::first);
  ComplexMatrix point_cand =
      kron((ComplexMatrix::Identity(din, din) / double(din)).eval(), image);
  if ((point_cand - c).norm() <= 1e-9 * (1.0 + c.norm())) {
    out.cls = StructuralClass::point;
    out.point_state = std::move(image);
    return out;
  }
  if (detect_cq(choi, out)) {
    bool all_pure = true;
    for (const auto& r : out.cq_states)
      if (!rank_one_within(r, 1e-9)) all_pure = false;
    out.cls = all_pure ? StructuralClass::extreme_cq : StructuralClass::cq;
    return out;
  }
  if (detect_qc(choi, out)) {
    out.cls = StructuralClass::qc;
    return out;
  }
  if (detect_block_projection(choi, out)) {
    out.cls = StructuralClass::block_projection;
    return out;
  }
  out.cls = StructuralClass::general;
  return out;
}

}  // namespace detail

inline StructuralClass classify_structure(const Channel& ch) {
  return detail::analyze_structure(ch).cls;
}

//------------------------------------------------------------------------
// CPT extremality via operator products
//------------------------------------------------------------------------

// Linear independence of {A_j* A_k} over a canonical Kraus set decides CPT
// extremality. The verdict is a tri-state: the smallest singular value of the
// stacked products is compared against 1e-8 of the largest, with a marginal
// band one decade wide below the threshold.
inline ExtremalityReport cpt_extremality(const KrausChannel& k) {
  ChoiMatrix choi = choi_of(k);
  KrausChannel canon = kraus_from_choi(choi);
  const auto& ops = canon.operators();
  const Index din = canon.dim_in();
  const Index r = Index(ops.size());

  ComplexMatrix gram(din * din, r * r);
  Index col = 0;
  for (Index j = 0; j < r; ++j)
    for (Index l = 0; l < r; ++l) {
      ComplexMatrix prod = (ops[size_t(j)].adjoint() * ops[size_t(l)]).eval();
      gram.col(col++) =
          Eigen::Map<const ComplexVector>(prod.data(), din * din);
    }
  Eigen::JacobiSVD<ComplexMatrix> svd(gram);
  double smax = svd.singularValues()(0);
  double smin = (gram.cols() > gram.rows())
                    ? 0.0
                    : svd.singularValues()(svd.singularValues().size() - 1);
  double tau = 1e-8 * smax;

  ExtremalityReport rep;
  rep.gram_min_singular_value = smin;
  if (smin > tau)
    rep.cpt_extreme = CptExtremality::yes;
  else if (smin >= tau / 10.0)
    rep.cpt_extreme = CptExtremality::numerically_marginal;
  else
    rep.cpt_extreme = CptExtremality::no;

  detail::StructureData sd = detail::analyze_structure(Channel(k));
  rep.structural_class = sd.cls;
  if (sd.cls == StructuralClass::extreme_cq) {
    const Index n = Index(sd.cq_states.size());
    ComplexMatrix overlaps(n, n);
    std::vector<ComplexVector> psis;
    for (const auto& state : sd.cq_states) {
      EigResult eig = hermitian_eig(state);
      psis.push_back(eig.eigenvectors.col(state.rows() - 1));
    }
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b)
        overlaps(a, b) = psis[size_t(a)].dot(psis[size_t(b)]);
    rep.cq_overlap_matrix = std::move(overlaps);
  }
  return rep;
}

//------------------------------------------------------------------------
// Named example channels
//------------------------------------------------------------------------

namespace detail {

inline std::vector<ComplexVector> tetrahedron_vertices() {
  const double s = 1.0 / std::sqrt(3.0);
  auto mk = [](double a, double b, double c) {
    ComplexVector v(3);
    v << Complex(a), Complex(b), Complex(c);
    return v;
  };
  return {mk(s, s, s), mk(s, -s, -s), mk(-s, s, -s), mk(-s, -s, s)};
}

struct TetrahedronCross {
  std::vector<ComplexVector> w;
  std::array<int, 6> first{0, 0, 0, 1, 1, 2};
  std::array<int, 6> second{1, 2, 3, 2, 3, 3};
  std::array<int, 6> complement{5, 4, 3, 2, 1, 0};
};

inline TetrahedronCross tetrahedron_cross_vectors() {
  const double h = 1.0 / std::sqrt(2.0);
  auto mk = [](double a, double b, double c) {
    ComplexVector v(3);
    v << Complex(a), Complex(b), Complex(c);
    return v;
  };
  TetrahedronCross out;
  out.w = {mk(0, h, h),  mk(h, 0, h),  mk(h, h, 0),
           mk(h, -h, 0), mk(h, 0, -h), mk(0, h, -h)};
  return out;
}

}  // namespace detail

// Measure the weighted tetrahedron-vertex POVM {(3/4) P_{v_i}} and prepare
// the matching vertex projector.
inline HolevoChannel tetrahedron_channel() {
  std::vector<HolevoPair> pairs;
  for (const ComplexVector& v : detail::tetrahedron_vertices()) {
    ComplexMatrix p = v * v.adjoint();
    pairs.push_back({DensityMatrix(p), (0.75 * p).eval()});
  }
  return HolevoChannel(std::move(pairs));
}

struct TetrahedronVerification {
  double povm_completeness = 0.0;    // ||sum (3/4) P_{v_i} - I||
  double max_unrelated_overlap = 0.0;
  double max_output_deviation = 0.0;  // against (P_{v_i} + P_{v_j}) / 2
  double max_complement_leakage = 0.0;
  RealVector sample_output_spectrum;  // of the image of the first cross vector
  ExtremalityReport cpt;
  bool passed = false;
};

// Reproduces the observables behind the channel's special standing: the POVM
// resolves the identity, each cross vector w_ij sees only vertices i and j,
// its image is the averaged pair projector with spectrum {0, 1/3, 2/3} and is
// orthogonal to the complementary cross vector, and the channel is not
// extreme among CPT maps even though it is extreme among EBT maps.
inline TetrahedronVerification verify_tetrahedron() {
  HolevoChannel ch = tetrahedron_channel();
  std::vector<ComplexVector> v = detail::tetrahedron_vertices();
  detail::TetrahedronCross cross = detail::tetrahedron_cross_vectors();
  TetrahedronVerification rep;

  ComplexMatrix sum = ComplexMatrix::Zero(3, 3);
  for (const auto& pair : ch.pairs()) sum += pair.effect;
  rep.povm_completeness = (sum - ComplexMatrix::Identity(3, 3)).norm();

  for (size_t p = 0; p < 6; ++p) {
    for (int k = 0; k < 4; ++k) {
      if (k == cross.first[p] || k == cross.second[p]) continue;
      rep.max_unrelated_overlap = std::max(
          rep.max_unrelated_overlap,
          std::abs(cross.w[p].dot(v[size_t(k)])));
    }
    ComplexMatrix out = apply_to_matrix(
        Channel(ch), (cross.w[p] * cross.w[p].adjoint()).eval());
    const ComplexVector& vi = v[size_t(cross.first[p])];
    const ComplexVector& vj = v[size_t(cross.second[p])];
    ComplexMatrix expect =
        0.5 * (vi * vi.adjoint() + vj * vj.adjoint());
    rep.max_output_deviation =
        std::max(rep.max_output_deviation, (out - expect).norm());
    rep.max_complement_leakage =
        std::max(rep.max_complement_leakage,
                 (out * cross.w[size_t(cross.complement[p])]).norm());
    if (p == 0) rep.sample_output_spectrum = hermitian_eig(out).eigenvalues;
  }
  rep.cpt = cpt_extremality(kraus_of(Channel(ch)));

  bool spectrum_ok = rep.sample_output_spectrum.size() == 3 &&
                     std::abs(rep.sample_output_spectrum(0)) < 1e-10 &&
                     std::abs(rep.sample_output_spectrum(1) - 1.0 / 3.0) < 1e-10 &&
                     std::abs(rep.sample_output_spectrum(2) - 2.0 / 3.0) < 1e-10;
  rep.passed = rep.povm_completeness < 1e-10 &&
               rep.max_unrelated_overlap < 1e-10 &&
               rep.max_output_deviation < 1e-10 &&
               rep.max_complement_leakage < 1e-10 && spectrum_ok &&
               rep.cpt.cpt_extreme == CptExtremality::no;
  return rep;
}

// Measure the POVM made of a trine on the first two coordinates plus the
// projection onto the last two, recording the outcome in the register basis.
inline HolevoChannel trine_block_channel() {
  ComplexVector g1 = ComplexVector::Unit(4, 0);
  ComplexVector g2 = ComplexVector::Unit(4, 1);
  ComplexVector gp = 0.5 * g1 + (std::sqrt(3.0) / 2.0) * g2;
  ComplexVector gm = 0.5 * g1 - (std::sqrt(3.0) / 2.0) * g2;
  std::vector<ComplexMatrix> effects = {
      (2.0 / 3.0) * (g1 * g1.adjoint()),
      (2.0 / 3.0) * (gp * gp.adjoint()),
      (2.0 / 3.0) * (gm * gm.adjoint()),
      ComplexMatrix(ComplexVector::Unit(4, 2) *
                        ComplexVector::Unit(4, 2).adjoint() +
                    ComplexVector::Unit(4, 3) *
                        ComplexVector::Unit(4, 3).adjoint())};
  return qc_channel(Povm(std::move(effects)));
}

//------------------------------------------------------------------------
// EBT extremality hints
//------------------------------------------------------------------------

enum class EbtExtremeVerdict { extreme, not_extreme, inconclusive };

// channel = weight * first + (1 - weight) * second.
struct ConvexSplit {
  double weight = 0.0;
  HolevoChannel first;
  HolevoChannel second;
};

struct EbtExtremalityHints {
  EbtExtremeVerdict verdict = EbtExtremeVerdict::inconclusive;
  StructuralClass structural_class = StructuralClass::general;
  CptExtremality cpt_extreme = CptExtremality::no;
  bool consistent = true;  // CPT-extreme EBT maps must be extreme CQ
  std::string builtin;     // "tetrahedron" or "trine4" when matched
  std::string reason;
  std::optional<ConvexSplit> split;
};

namespace detail {

// Splits a mixed state rho (trace 1) at its top eigenvector: rho =
// mu P + (1 - mu) rest.
struct SpectralSplit {
  double mu;
  DensityMatrix top;
  DensityMatrix rest;
};

inline std::optional<SpectralSplit> spectral_split(const ComplexMatrix& rho) {
  EigResult eig = hermitian_eig(rho);
  const Index d = rho.rows();
  double mu = eig.eigenvalues(d - 1);
  double second = (d > 1) ? eig.eigenvalues(d - 2) : 0.0;
  if (second <= 1e-9 * mu) return std::nullopt;  // already pure
  ComplexVector psi = eig.eigenvectors.col(d - 1);
  ComplexMatrix rest = (rho - mu * psi * psi.adjoint()) / (1.0 - mu);
  return SpectralSplit{mu, DensityMatrix((psi * psi.adjoint()).eval()),
                       DensityMatrix(((rest + rest.adjoint()) / 2.0).eval())};
}

}  // namespace detail

// Sufficient conditions only: extreme-CQ structure certifies extremality,
// mixed preparations yield explicit convex splits, verified builtins carry
// their known status, everything else stays inconclusive.
inline EbtExtremalityHints ebt_extremality_hints(const Channel& ch) {
  EbtVerdict verdict = classify(ch);
  if (verdict.status != EbtStatus::ebt)
    fail(errc::not_ebt_input,
         "ebt_extremality_hints: channel is not certified entanglement "
         "breaking");

  detail::StructureData sd = detail::analyze_structure(ch);
  EbtExtremalityHints h;
  h.structural_class = sd.cls;
  h.cpt_extreme = cpt_extremality(kraus_of(ch)).cpt_extreme;
  h.consistent = !(h.cpt_extreme == CptExtremality::yes &&
                   sd.cls != StructuralClass::extreme_cq);

  const ChoiMatrix choi = choi_of(ch);
  const Index d = dim_in(ch);
  if (d == 3 && dim_out(ch) == 3 &&
      (choi.matrix() - choi_of(Channel(tetrahedron_channel())).matrix())
              .norm() <= 1e-10)
    h.builtin = "tetrahedron";
  if (d == 4 && dim_out(ch) == 4 &&
      (choi.matrix() - choi_of(Channel(trine_block_channel())).matrix())
              .norm() <= 1e-10)
    h.builtin = "trine4";
  if (!h.builtin.empty()) {
    h.verdict = EbtExtremeVerdict::extreme;
    h.reason = "matches the " + h.builtin +
               " builtin, whose extremality is established by construction";
    return h;
  }

  switch (sd.cls) {
    case StructuralClass::point: {
      double tr = sd.point_state.trace().real();
      ComplexMatrix rho = sd.point_state / tr;
      auto split = detail::spectral_split(((rho + rho.adjoint()) / 2.0).eval());
      if (!split) {
        h.verdict = EbtExtremeVerdict::extreme;
        h.reason = "constant channel with a pure image";
      } else {
        h.verdict = EbtExtremeVerdict::not_extreme;
        h.reason = "constant channel with a mixed image splits along its "
                   "spectral decomposition";
        ComplexMatrix effect =
            tr * ComplexMatrix::Identity(dim_in(ch), dim_in(ch));
        h.split = ConvexSplit{
            split->mu, HolevoChannel({HolevoPair{split->top, effect}}),
            HolevoChannel({HolevoPair{split->rest, effect}})};
      }
      break;
    }
    case StructuralClass::extreme_cq:
      h.verdict = EbtExtremeVerdict::extreme;
      h.reason = "orthonormal basis measurement with pure preparations";
      break;
    case StructuralClass::cq: {
      for (size_t k = 0; k < sd.cq_states.size(); ++k) {
        auto split = detail::spectral_split(sd.cq_states[k]);
        if (!split) continue;
        std::vector<HolevoPair> first, second;
        for (size_t j = 0; j < sd.cq_states.size(); ++j) {
          ComplexMatrix effect =
              sd.cq_basis[j] * sd.cq_basis[j].adjoint();
          DensityMatrix state((sd.cq_states[j] +
                               sd.cq_states[j].adjoint()).eval() / 2.0);
          first.push_back({j == k ? split->top : state, effect});
          second.push_back({j == k ? split->rest : state, effect});
        }
        h.verdict = EbtExtremeVerdict::not_extreme;
        h.reason = "a prepared state is mixed; it splits along its spectral "
                   "decomposition";
        h.split = ConvexSplit{split->mu, HolevoChannel(std::move(first)),
                              HolevoChannel(std::move(second))};
        break;
      }
      if (h.verdict != EbtExtremeVerdict::not_extreme) {
        h.verdict = EbtExtremeVerdict::inconclusive;
        h.reason = "no sufficient condition applies";
      }
      break;
    }
    default:
      h.verdict = EbtExtremeVerdict::inconclusive;
      h.reason = "no sufficient condition applies";
      break;
  }
  return h;
}

}  // namespace ebtkit

#endif
