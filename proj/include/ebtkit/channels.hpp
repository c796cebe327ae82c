/**
 * Copyright 2026, the ebtkit developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE.txt file in the root directory of this source tree.
 */

#ifndef EBTKIT_CHANNELS_HPP
#define EBTKIT_CHANNELS_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include <ebtkit/separable_decomposition.hpp>
#include <ebtkit/states.hpp>

namespace ebtkit {

//------------------------------------------------------------------------
// Representations
//------------------------------------------------------------------------

// Operator-sum representation. Operators map dim_in to dim_out; the channel
// is flagged trace preserving when sum A^dagger A is the identity within
// tol::kTracePreserving.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<ComplexMatrix> ops) : ops_(std::move(ops)) {
    if (ops_.empty())
      fail(errc::invalid_argument, "KrausChannel: no operators");
    const Index rows = ops_[0].rows(), cols = ops_[0].cols();
    if (rows < 1 || cols < 1)
      fail(errc::invalid_argument, "KrausChannel: empty operator");
    ComplexMatrix sum = ComplexMatrix::Zero(cols, cols);
    for (size_t k = 0; k < ops_.size(); ++k) {
      if (ops_[k].rows() != rows || ops_[k].cols() != cols)
        fail(errc::shape_mismatch, "KrausChannel: operator " +
                                       std::to_string(k) +
                                       " has mismatched shape");
      sum += ops_[k].adjoint() * ops_[k];
    }
    tp_ = (sum - ComplexMatrix::Identity(cols, cols)).norm() <=
          tol::kTracePreserving;
  }

  Index dim_in() const { return ops_[0].cols(); }
  Index dim_out() const { return ops_[0].rows(); }
  bool trace_preserving() const { return tp_; }
  const std::vector<ComplexMatrix>& operators() const { return ops_; }

 private:
  std::vector<ComplexMatrix> ops_;
  bool tp_ = false;
};

// One measure-prepare pair: prepare `state` with probability Tr(effect rho).
struct HolevoPair {
  DensityMatrix state;
  ComplexMatrix effect;
};

// Measure-and-prepare form: rho -> sum_k state_k Tr(effect_k rho). Effects
// are positive but need not be complete; the channel is flagged trace
// preserving when they sum to the identity within tol::kTracePreserving.
class HolevoChannel {
 public:
  explicit HolevoChannel(std::vector<HolevoPair> pairs)
      : pairs_(std::move(pairs)) {
    if (pairs_.empty())
      fail(errc::invalid_argument, "HolevoChannel: no pairs");
    const Index din = pairs_[0].effect.rows();
    const Index dout = pairs_[0].state.dim();
    ComplexMatrix sum = ComplexMatrix::Zero(din, din);
    for (size_t k = 0; k < pairs_.size(); ++k) {
      const ComplexMatrix& f = pairs_[k].effect;
      if (f.rows() != din || f.cols() != din ||
          pairs_[k].state.dim() != dout)
        fail(errc::shape_mismatch, "HolevoChannel: pair " + std::to_string(k) +
                                       " has mismatched dimensions");
      if (f.norm() <= 1e-12)
        fail(errc::invalid_argument,
             "HolevoChannel: pair " + std::to_string(k) + " has a zero effect");
      require_hermitian(f, "HolevoChannel");
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
          ((f + f.adjoint()) / 2.0).eval(), Eigen::EigenvaluesOnly);
      if (solver.eigenvalues().minCoeff() < -tol::kPsd)
        fail(errc::not_psd, "HolevoChannel: effect " + std::to_string(k) +
                                " has eigenvalue " +
                                std::to_string(solver.eigenvalues().minCoeff()));
      sum += f;
    }
    tp_ = (sum - ComplexMatrix::Identity(din, din)).norm() <=
          tol::kTracePreserving;
  }

  Index dim_in() const { return pairs_[0].effect.rows(); }
  Index dim_out() const { return pairs_[0].state.dim(); }
  bool trace_preserving() const { return tp_; }
  const std::vector<HolevoPair>& pairs() const { return pairs_; }

 private:
  std::vector<HolevoPair> pairs_;
  bool tp_ = false;
};

// State form on input (x) output with the 1/dim_in normalization, so trace
// preserving channels give unit trace and input marginal I/dim_in.
class ChoiMatrix {
 public:
  ChoiMatrix(ComplexMatrix m, Index dim_in, Index dim_out)
      : mat_(std::move(m)), din_(dim_in), dout_(dim_out) {
    if (din_ < 1 || dout_ < 1 || mat_.rows() != din_ * dout_)
      fail(errc::shape_mismatch, "ChoiMatrix: side must be dim_in*dim_out");
    require_hermitian(mat_, "ChoiMatrix");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
        ((mat_ + mat_.adjoint()) / 2.0).eval(), Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -tol::kPsd)
      fail(errc::not_psd, "ChoiMatrix: matrix is not completely positive, "
                          "eigenvalue " +
                              std::to_string(solver.eigenvalues().minCoeff()));
    ComplexMatrix marg =
        partial_trace(mat_, BipartiteDims{din_, dout_}, Factor::second);
    tp_ = (marg - ComplexMatrix::Identity(din_, din_) / double(din_)).norm() <=
          tol::kTracePreserving;
  }

  Index dim_in() const { return din_; }
  Index dim_out() const { return dout_; }
  bool trace_preserving() const { return tp_; }
  const ComplexMatrix& matrix() const { return mat_; }
  BipartiteDims dims() const { return BipartiteDims{din_, dout_}; }

 private:
  ComplexMatrix mat_;
  Index din_ = 0, dout_ = 0;
  bool tp_ = false;
};

using Channel = std::variant<KrausChannel, HolevoChannel, ChoiMatrix>;

inline Index dim_in(const Channel& ch) {
  return std::visit([](const auto& c) { return c.dim_in(); }, ch);
}

inline Index dim_out(const Channel& ch) {
  return std::visit([](const auto& c) { return c.dim_out(); }, ch);
}

inline bool is_trace_preserving(const Channel& ch) {
  return std::visit([](const auto& c) { return c.trace_preserving(); }, ch);
}

//------------------------------------------------------------------------
// Linear action
//------------------------------------------------------------------------

inline ComplexMatrix apply_to_matrix(const KrausChannel& ch,
                                     const ComplexMatrix& x) {
  ComplexMatrix out = ComplexMatrix::Zero(ch.dim_out(), ch.dim_out());
  for (const auto& a : ch.operators()) out += a * x * a.adjoint();
  return out;
}

inline ComplexMatrix apply_to_matrix(const HolevoChannel& ch,
                                     const ComplexMatrix& x) {
  ComplexMatrix out = ComplexMatrix::Zero(ch.dim_out(), ch.dim_out());
  for (const auto& pair : ch.pairs())
    out += pair.state.matrix() * (pair.effect * x).trace();
  return out;
}

inline ComplexMatrix apply_to_matrix(const ChoiMatrix& ch,
                                     const ComplexMatrix& x) {
  const Index din = ch.dim_in(), dout = ch.dim_out();
  ComplexMatrix out = ComplexMatrix::Zero(dout, dout);
  for (Index m = 0; m < dout; ++m)
    for (Index n = 0; n < dout; ++n) {
      Complex acc = 0.0;
      for (Index j = 0; j < din; ++j)
        for (Index k = 0; k < din; ++k)
          acc += ch.matrix()(j * dout + m, k * dout + n) * x(j, k);
      out(m, n) = double(din) * acc;
    }
  return out;
}

inline ComplexMatrix apply_to_matrix(const Channel& ch,
                                     const ComplexMatrix& x) {
  if (x.rows() != dim_in(ch) || x.cols() != dim_in(ch))
    fail(errc::shape_mismatch, "apply: input must be dim_in x dim_in");
  return std::visit([&](const auto& c) { return apply_to_matrix(c, x); }, ch);
}

// By-value parameters keep this overload preferred over std::apply, which
// ADL drags in through the variant for unqualified calls.
inline DensityMatrix apply(Channel ch, DensityMatrix rho) {
  ComplexMatrix out = apply_to_matrix(ch, rho.matrix());
  return DensityMatrix(((out + out.adjoint()) / 2.0).eval());
}

//------------------------------------------------------------------------
// Conversions
//------------------------------------------------------------------------

namespace detail {

// Column vector of an operator under the composite index (input, output).
inline ComplexVector choi_vec(const ComplexMatrix& a) {
  ComplexVector v(a.rows() * a.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index m = 0; m < a.rows(); ++m) v(j * a.rows() + m) = a(m, j);
  return v;
}

inline std::vector<std::pair<double, ComplexVector>> positive_eigenpairs(
    const ComplexMatrix& m) {
  EigResult eig = hermitian_eig(m);
  double cutoff = double(m.rows()) * std::numeric_limits<double>::epsilon() *
                  std::max(std::abs(eig.eigenvalues(0)),
                           std::abs(eig.eigenvalues(m.rows() - 1)));
  std::vector<std::pair<double, ComplexVector>> out;
  for (Index i = 0; i < m.rows(); ++i)
    if (eig.eigenvalues(i) > cutoff)
      out.emplace_back(eig.eigenvalues(i), eig.eigenvectors.col(i));
  return out;
}

}  // namespace detail

inline ChoiMatrix choi_of(const KrausChannel& ch) {
  const Index d = ch.dim_in(), dp = ch.dim_out();
  ComplexMatrix m = ComplexMatrix::Zero(d * dp, d * dp);
  for (const auto& a : ch.operators()) {
    ComplexVector v = detail::choi_vec(a);
    m += v * v.adjoint();
  }
  return ChoiMatrix(m / double(d), d, dp);
}

inline ChoiMatrix choi_of(const HolevoChannel& ch) {
  const Index d = ch.dim_in(), dp = ch.dim_out();
  ComplexMatrix m = ComplexMatrix::Zero(d * dp, d * dp);
  for (const auto& pair : ch.pairs())
    m += kron(pair.effect.conjugate().eval(), pair.state.matrix());
  return ChoiMatrix(m / double(d), d, dp);
}

inline ChoiMatrix choi_of(const Channel& ch) {
  if (const auto* k = std::get_if<KrausChannel>(&ch)) return choi_of(*k);
  if (const auto* h = std::get_if<HolevoChannel>(&ch)) return choi_of(*h);
  return std::get<ChoiMatrix>(ch);
}

// Canonical operator-sum form: one operator per Choi eigenvalue above the
// spectral cutoff, scaled by sqrt(dim_in * eigenvalue).
inline KrausChannel kraus_from_choi(const ChoiMatrix& choi) {
  const Index d = choi.dim_in(), dp = choi.dim_out();
  auto pairs = detail::positive_eigenpairs(choi.matrix());
  if (pairs.empty())
    fail(errc::invalid_argument, "kraus_from_choi: zero channel");
  std::vector<ComplexMatrix> ops;
  for (const auto& [mu, u] : pairs) {
    ComplexMatrix a(dp, d);
    double scale = std::sqrt(double(d) * mu);
    for (Index j = 0; j < d; ++j)
      for (Index m = 0; m < dp; ++m) a(m, j) = scale * u(j * dp + m);
    ops.push_back(std::move(a));
  }
  return KrausChannel(std::move(ops));
}

// Measure-prepare expansion into rank-one factors: for each pair, operators
// sqrt(r_a f_b) |w_a><u_b| over the eigenbases of the state and the effect.
// Rank-deficient directions vanish and are pruned. Pure-state pairs against
// rank-one effects reduce to a single operator |psi><u|.
inline KrausChannel kraus_from_holevo(const HolevoChannel& ch) {
  std::vector<ComplexMatrix> ops;
  for (const auto& pair : ch.pairs()) {
    auto state_eig = detail::positive_eigenpairs(pair.state.matrix());
    auto effect_eig = detail::positive_eigenpairs(pair.effect);
    for (const auto& [r, w] : state_eig)
      for (const auto& [f, u] : effect_eig) {
        double scale = std::sqrt(r * f);
        if (scale <= tol::kKrausPrune) continue;
        ops.push_back((scale * w * u.adjoint()).eval());
      }
  }
  if (ops.empty())
    fail(errc::invalid_argument, "kraus_from_holevo: all operators pruned");
  return KrausChannel(std::move(ops));
}

// Inverse direction: every rank-one operator sigma |w><u| becomes the pair
// (|w><w|, sigma^2 |u><u|).
inline HolevoChannel holevo_from_rank1_kraus(const KrausChannel& ch) {
  std::vector<HolevoPair> pairs;
  for (size_t k = 0; k < ch.operators().size(); ++k) {
    const ComplexMatrix& a = ch.operators()[k];
    if (numerical_rank(a) != 1)
      fail(errc::rank_too_high,
           "holevo_from_rank1_kraus: operator " + std::to_string(k) +
               " has rank " + std::to_string(numerical_rank(a)));
    Eigen::JacobiSVD<ComplexMatrix> svd(
        a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double sigma = svd.singularValues()(0);
    ComplexVector w = svd.matrixU().col(0);
    ComplexVector u = svd.matrixV().col(0);
    pairs.push_back({DensityMatrix((w * w.adjoint()).eval()),
                     (sigma * sigma * u * u.adjoint()).eval()});
  }
  return HolevoChannel(std::move(pairs));
}

// Reads a measure-prepare form off a pure product decomposition of a Choi
// matrix: effect_n = d p_n conj(|v_n><v_n|), state_n = |w_n><w_n|. With
// require_tp the effects must sum to the identity within 1e-8, equivalently
// the decomposition's left marginal must be maximally mixed.
inline HolevoChannel holevo_from_separable_choi(
    const SeparableDecomposition& dec, bool require_tp = true) {
  const double d = double(dec.dims().dim_a);
  std::vector<HolevoPair> pairs;
  ComplexMatrix sum = ComplexMatrix::Zero(dec.dims().dim_a, dec.dims().dim_a);
  for (const SeparableTerm& t : dec.terms()) {
    ComplexMatrix effect =
        d * t.weight * (t.left.conjugate() * t.left.transpose());
    sum += effect;
    if (effect.norm() <= 1e-12) continue;
    pairs.push_back({DensityMatrix((t.right * t.right.adjoint()).eval()),
                     ((effect + effect.adjoint()) / 2.0).eval()});
  }
  if (require_tp) {
    double deviation =
        (sum - ComplexMatrix::Identity(sum.rows(), sum.cols())).norm();
    if (deviation > 1e-8)
      fail(errc::marginal_not_maximally_mixed,
           "holevo_from_separable_choi: left marginal deviates by " +
               std::to_string(deviation));
  }
  return HolevoChannel(std::move(pairs));
}

inline KrausChannel kraus_of(const Channel& ch) {
  if (const auto* k = std::get_if<KrausChannel>(&ch)) return *k;
  if (const auto* h = std::get_if<HolevoChannel>(&ch))
    return kraus_from_holevo(*h);
  return kraus_from_choi(std::get<ChoiMatrix>(ch));
}

//------------------------------------------------------------------------
// Structured constructors
//------------------------------------------------------------------------

namespace detail {

inline void check_orthonormal(const std::vector<ComplexVector>& basis,
                              const char* who) {
  if (basis.empty()) fail(errc::invalid_argument, std::string(who) + ": empty basis");
  const Index d = basis[0].size();
  if (Index(basis.size()) != d)
    fail(errc::non_orthonormal_basis,
         std::string(who) + ": need exactly dim basis vectors");
  for (size_t j = 0; j < basis.size(); ++j) {
    if (basis[j].size() != d)
      fail(errc::shape_mismatch, std::string(who) + ": basis dim mismatch");
    for (size_t k = 0; k <= j; ++k) {
      Complex g = basis[k].dot(basis[j]);
      double expect = (j == k) ? 1.0 : 0.0;
      if (std::abs(g - expect) > 1e-10)
        fail(errc::non_orthonormal_basis,
             std::string(who) + ": basis is not orthonormal");
    }
  }
}

inline std::vector<ComplexVector> computational_basis(Index d) {
  std::vector<ComplexVector> basis;
  for (Index k = 0; k < d; ++k) {
    ComplexVector e = ComplexVector::Zero(d);
    e(k) = 1.0;
    basis.push_back(std::move(e));
  }
  return basis;
}

}  // namespace detail

// Classical-quantum channel: measure in an orthonormal basis, prepare the
// state attached to the observed index.
inline HolevoChannel cq_channel(const std::vector<DensityMatrix>& states,
                                const std::vector<ComplexVector>& basis) {
  detail::check_orthonormal(basis, "cq_channel");
  if (states.size() != basis.size())
    fail(errc::shape_mismatch, "cq_channel: one state per basis vector");
  std::vector<HolevoPair> pairs;
  for (size_t k = 0; k < states.size(); ++k)
    pairs.push_back({states[k], (basis[k] * basis[k].adjoint()).eval()});
  return HolevoChannel(std::move(pairs));
}

inline HolevoChannel cq_channel(const std::vector<DensityMatrix>& states) {
  return cq_channel(states, detail::computational_basis(Index(states.size())));
}

// Quantum-classical channel: measure the POVM, record the outcome in an
// orthonormal register basis.
inline HolevoChannel qc_channel(const Povm& povm,
                                const std::vector<ComplexVector>& basis) {
  detail::check_orthonormal(basis, "qc_channel");
  if (povm.size() != basis.size())
    fail(errc::shape_mismatch, "qc_channel: one basis vector per outcome");
  std::vector<HolevoPair> pairs;
  for (size_t k = 0; k < povm.size(); ++k)
    pairs.push_back(
        {DensityMatrix((basis[k] * basis[k].adjoint()).eval()),
         povm.element(k)});
  return HolevoChannel(std::move(pairs));
}

inline HolevoChannel qc_channel(const Povm& povm) {
  return qc_channel(povm, detail::computational_basis(Index(povm.size())));
}

// Constant channel: every input goes to r.
inline HolevoChannel point_channel(const DensityMatrix& r, Index dim_in = 0) {
  if (dim_in == 0) dim_in = r.dim();
  if (dim_in < 1) fail(errc::invalid_argument, "point_channel: bad dim_in");
  std::vector<HolevoPair> pairs;
  pairs.push_back({r, ComplexMatrix::Identity(dim_in, dim_in)});
  return HolevoChannel(std::move(pairs));
}

// Pinching to a family of orthogonal projectors that resolves the identity.
inline KrausChannel block_projection_channel(
    const std::vector<ComplexMatrix>& projectors) {
  if (projectors.empty())
    fail(errc::invalid_argument, "block_projection_channel: no projectors");
  const Index d = projectors[0].rows();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (size_t k = 0; k < projectors.size(); ++k) {
    const ComplexMatrix& p = projectors[k];
    require_hermitian(p, "block_projection_channel");
    if (p.rows() != d)
      fail(errc::shape_mismatch, "block_projection_channel: shape mismatch");
    if ((p * p - p).norm() > 1e-10)
      fail(errc::invalid_argument, "block_projection_channel: element " +
                                       std::to_string(k) +
                                       " is not a projector");
    for (size_t j = 0; j < k; ++j)
      if ((projectors[j] * p).norm() > 1e-10)
        fail(errc::invalid_argument,
             "block_projection_channel: projectors overlap");
    sum += p;
  }
  if ((sum - ComplexMatrix::Identity(d, d)).norm() > 1e-10)
    fail(errc::incomplete_projectors,
         "block_projection_channel: projectors do not resolve the identity");
  return KrausChannel(projectors);
}

// alpha Phi1 + (1-alpha) Phi2 by effect concatenation. Endpoints return the
// untouched input channel.
inline HolevoChannel convex_combination(double alpha, const HolevoChannel& a,
                                        const HolevoChannel& b) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    fail(errc::invalid_argument, "convex_combination: alpha outside [0,1]");
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out())
    fail(errc::shape_mismatch, "convex_combination: dimension mismatch");
  if (!a.trace_preserving() || !b.trace_preserving())
    fail(errc::not_trace_preserving,
         "convex_combination: both channels must be trace preserving");
  if (alpha == 0.0) return b;
  if (alpha == 1.0) return a;
  std::vector<HolevoPair> pairs;
  for (const auto& pair : a.pairs())
    pairs.push_back({pair.state, (alpha * pair.effect).eval()});
  for (const auto& pair : b.pairs())
    pairs.push_back({pair.state, ((1.0 - alpha) * pair.effect).eval()});
  return HolevoChannel(std::move(pairs));
}

//------------------------------------------------------------------------
// Composition, adjoint, simulation
//------------------------------------------------------------------------

// phi after upsilon. Measure-prepare structure survives composition from
// the right: effects are pulled back through the adjoint of upsilon.
inline Channel compose(const Channel& phi, const Channel& upsilon) {
  if (dim_in(phi) != dim_out(upsilon))
    fail(errc::shape_mismatch, "compose: inner dimensions disagree");
  if (const auto* h = std::get_if<HolevoChannel>(&phi)) {
    KrausChannel ups = kraus_of(upsilon);
    std::vector<HolevoPair> pairs;
    for (const auto& pair : h->pairs()) {
      ComplexMatrix pulled =
          ComplexMatrix::Zero(ups.dim_in(), ups.dim_in());
      for (const auto& b : ups.operators())
        pulled += b.adjoint() * pair.effect * b;
      if (pulled.norm() <= 1e-12) continue;  // outcome never occurs
      pairs.push_back({pair.state, ((pulled + pulled.adjoint()) / 2.0).eval()});
    }
    return HolevoChannel(std::move(pairs));
  }
  KrausChannel left = kraus_of(phi);
  KrausChannel right = kraus_of(upsilon);
  std::vector<ComplexMatrix> ops;
  for (const auto& a : left.operators())
    for (const auto& b : right.operators()) {
      ComplexMatrix prod = a * b;
      if (prod.norm() <= tol::kKrausPrune) continue;
      ops.push_back(std::move(prod));
    }
  return KrausChannel(std::move(ops));
}

// Hilbert-Schmidt adjoint, as an operator-sum form with daggered operators.
inline KrausChannel adjoint(const Channel& ch) {
  KrausChannel k = kraus_of(ch);
  std::vector<ComplexMatrix> ops;
  for (const auto& a : k.operators()) ops.push_back(a.adjoint().eval());
  return KrausChannel(std::move(ops));
}

struct SimulationResult {
  std::vector<long long> counts;
  std::vector<double> probabilities;  // clipped and renormalized
  DensityMatrix empirical;
};

// Samples the measurement distribution and averages the prepared states.
// The seed fully determines the histogram; sampling uses raw generator
// bits so results do not depend on the standard library implementation.
inline SimulationResult simulate_measure_prepare(const HolevoChannel& ch,
                                                 const DensityMatrix& rho,
                                                 long long shots,
                                                 std::uint64_t seed) {
  if (!ch.trace_preserving())
    fail(errc::not_trace_preserving,
         "simulate_measure_prepare: channel is not trace preserving");
  if (rho.dim() != ch.dim_in())
    fail(errc::shape_mismatch, "simulate_measure_prepare: dimension mismatch");
  if (shots < 1)
    fail(errc::invalid_argument, "simulate_measure_prepare: shots < 1");

  const size_t n = ch.pairs().size();
  std::vector<double> p(n);
  double total = 0.0;
  for (size_t k = 0; k < n; ++k) {
    Complex raw = (ch.pairs()[k].effect * rho.matrix()).trace();
    double prob = raw.real();
    if (prob < -1e-10)
      fail(errc::tolerance_failure,
           "simulate_measure_prepare: outcome probability " +
               std::to_string(prob));
    p[k] = std::max(prob, 0.0);
    total += p[k];
  }
  for (double& v : p) v /= total;

  std::vector<double> cdf(n);
  double acc = 0.0;
  for (size_t k = 0; k < n; ++k) {
    acc += p[k];
    cdf[k] = acc;
  }
  cdf[n - 1] = 1.0;

  detail::GaussianStream stream(seed);
  std::vector<long long> counts(n, 0);
  for (long long s = 0; s < shots; ++s) {
    double u = stream.uniform();
    size_t k = size_t(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (k >= n) k = n - 1;
    ++counts[k];
  }

  ComplexMatrix mean = ComplexMatrix::Zero(ch.dim_out(), ch.dim_out());
  for (size_t k = 0; k < n; ++k)
    mean += (double(counts[k]) / double(shots)) * ch.pairs()[k].state.matrix();
  return SimulationResult{std::move(counts), std::move(p),
                          DensityMatrix(((mean + mean.adjoint()) / 2.0).eval())};
}

}  // namespace ebtkit

#endif
