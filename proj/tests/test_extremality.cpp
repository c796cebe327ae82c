#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include <ebtkit/ebt_analysis.hpp>
#include <ebtkit/extremality.hpp>

#include "test_support.hpp"

using namespace ebtkit;
using ebttest::max_abs_diff;

namespace {

ComplexVector real3(double a, double b, double c) {
  ComplexVector v(3);
  v << Complex(a), Complex(b), Complex(c);
  return v;
}

// The four unit vectors along the vertices of a regular tetrahedron and the
// six cross vectors orthogonal to the other two vertices, written out
// independently of the library builders.
struct TetrahedronFrame {
  std::vector<ComplexVector> v;
  // w[p] is supported on pair_first[p], pair_second[p].
  std::vector<ComplexVector> w;
  std::vector<int> pair_first, pair_second;
};

TetrahedronFrame tetrahedron_frame() {
  const double s = 1.0 / std::sqrt(3.0);
  const double h = 1.0 / std::sqrt(2.0);
  TetrahedronFrame f;
  f.v = {real3(s, s, s), real3(s, -s, -s), real3(-s, s, -s), real3(-s, -s, s)};
  f.w = {real3(0, h, h),  real3(h, 0, h),  real3(h, h, 0),
         real3(h, -h, 0), real3(h, 0, -h), real3(0, h, -h)};
  f.pair_first = {0, 0, 0, 1, 1, 2};
  f.pair_second = {1, 2, 3, 2, 3, 3};
  return f;
}

ComplexMatrix projector(const ComplexVector& x) {
  return x * x.adjoint();
}

// TP Kraus set: slice a random isometry into `ops` blocks.
KrausChannel random_kraus_channel(Index d, int ops, std::uint64_t seed) {
  ComplexMatrix u = random_unitary(d * ops, seed);
  std::vector<ComplexMatrix> as;
  for (int i = 0; i < ops; ++i)
    as.push_back(u.block(i * d, 0, d, d).eval());
  return KrausChannel(as);
}

double apply_distance(const Channel& a, const Channel& b, std::uint64_t seed,
                      int n = 6) {
  double worst = 0.0;
  for (int t = 0; t < n; ++t) {
    DensityMatrix rho = random_density(dim_in(a), dim_in(a), seed + t);
    worst = std::max(worst, max_abs_diff(apply_to_matrix(a, rho.matrix()),
                                         apply_to_matrix(b, rho.matrix())));
  }
  return worst;
}

double split_distance(const Channel& ch, const ConvexSplit& split,
                      std::uint64_t seed, int n = 6) {
  double worst = 0.0;
  for (int t = 0; t < n; ++t) {
    DensityMatrix rho = random_density(dim_in(ch), dim_in(ch), seed + t);
    ComplexMatrix lhs = apply_to_matrix(ch, rho.matrix());
    ComplexMatrix rhs =
        split.weight * apply_to_matrix(Channel(split.first), rho.matrix()) +
        (1.0 - split.weight) *
            apply_to_matrix(Channel(split.second), rho.matrix());
    worst = std::max(worst, max_abs_diff(lhs, rhs));
  }
  return worst;
}

}  // namespace

TEST_CASE("gram criterion for extreme CPT maps", "[extremality]") {
  SECTION("unitary conjugation is extreme") {
    KrausChannel u({random_unitary(3, 410)});
    ExtremalityReport rep = cpt_extremality(u);
    CHECK(rep.cpt_extreme == CptExtremality::yes);
    // Single product U*U = I, so the only singular value is ||I|| = sqrt(3).
    CHECK(std::abs(rep.gram_min_singular_value - std::sqrt(3.0)) < 1e-9);
  }

  SECTION("overlapping pure preparations are extreme") {
    ComplexVector plus(2);
    plus << Complex(1.0 / std::sqrt(2.0)), Complex(1.0 / std::sqrt(2.0));
    std::vector<DensityMatrix> states = {
        DensityMatrix::from_pure(PureState(ComplexVector::Unit(2, 0).eval())),
        DensityMatrix::from_pure(PureState(plus))};
    HolevoChannel cq = cq_channel(states);
    ExtremalityReport rep = cpt_extremality(kraus_of(Channel(cq)));
    CHECK(rep.cpt_extreme == CptExtremality::yes);
    CHECK(rep.structural_class == StructuralClass::extreme_cq);
    REQUIRE(rep.cq_overlap_matrix.has_value());
    const ComplexMatrix& ov = *rep.cq_overlap_matrix;
    REQUIRE(ov.rows() == 2);
    CHECK(std::abs(std::abs(ov(0, 1)) - 1.0 / std::sqrt(2.0)) < 1e-9);
    CHECK(std::abs(ov(0, 0) - Complex(1.0)) < 1e-9);
  }

  SECTION("orthogonal pure preparations are not extreme") {
    std::vector<DensityMatrix> states = {
        DensityMatrix::from_pure(PureState(ComplexVector::Unit(2, 0).eval())),
        DensityMatrix::from_pure(PureState(ComplexVector::Unit(2, 1).eval()))};
    ExtremalityReport rep = cpt_extremality(kraus_of(Channel(cq_channel(states))));
    CHECK(rep.cpt_extreme == CptExtremality::no);
    CHECK(rep.gram_min_singular_value < 1e-10);
    REQUIRE(rep.cq_overlap_matrix.has_value());
    CHECK(std::abs((*rep.cq_overlap_matrix)(0, 1)) < 1e-12);
  }

  SECTION("verdict and singular value are kraus gauge invariant") {
    KrausChannel a = random_kraus_channel(3, 2, 420);
    ExtremalityReport ra = cpt_extremality(a);
    CHECK(ra.cpt_extreme == CptExtremality::yes);

    ComplexMatrix u = random_unitary(2, 421);
    const auto& ops = a.operators();
    KrausChannel b({(u(0, 0) * ops[0] + u(0, 1) * ops[1]).eval(),
                    (u(1, 0) * ops[0] + u(1, 1) * ops[1]).eval()});
    ExtremalityReport rb = cpt_extremality(b);
    CHECK(ra.cpt_extreme == rb.cpt_extreme);
    CHECK(std::abs(ra.gram_min_singular_value - rb.gram_min_singular_value) <
          1e-8);
  }

  SECTION("more products than matrix dimensions is never extreme") {
    // 3 operators on a qubit: 9 products in a 4-dimensional space.
    ExtremalityReport rep = cpt_extremality(random_kraus_channel(2, 3, 430));
    CHECK(rep.cpt_extreme == CptExtremality::no);
  }

  SECTION("qc channels with several outcomes are never extreme") {
    ExtremalityReport rep =
        cpt_extremality(kraus_of(Channel(qc_channel(random_povm(3, 3, 440)))));
    CHECK(rep.cpt_extreme == CptExtremality::no);
  }
}

TEST_CASE("structural classification", "[extremality]") {
  SECTION("constant channels") {
    CHECK(classify_structure(Channel(point_channel(random_density(3, 2, 450)))) ==
          StructuralClass::point);
    CHECK(classify_structure(Channel(point_channel(
              random_density(2, 1, 451), 3))) == StructuralClass::point);
  }

  SECTION("basis measurement with pure outputs") {
    std::vector<DensityMatrix> states;
    for (int k = 0; k < 3; ++k)
      states.push_back(DensityMatrix::from_pure(random_pure(3, 452 + k)));
    CHECK(classify_structure(Channel(cq_channel(states))) ==
          StructuralClass::extreme_cq);
  }

  SECTION("basis measurement with a mixed output") {
    std::vector<DensityMatrix> states = {
        random_density(2, 2, 455),
        DensityMatrix::from_pure(random_pure(2, 456))};
    CHECK(classify_structure(Channel(cq_channel(states))) ==
          StructuralClass::cq);
  }

  SECTION("povm measurement recorded in a register") {
    CHECK(classify_structure(Channel(qc_channel(random_povm(3, 4, 457)))) ==
          StructuralClass::qc);
  }

  SECTION("pinchings") {
    ComplexMatrix p01 = ComplexMatrix::Zero(3, 3);
    p01(0, 0) = p01(1, 1) = 1.0;
    ComplexMatrix p2 = ComplexMatrix::Zero(3, 3);
    p2(2, 2) = 1.0;
    CHECK(classify_structure(Channel(block_projection_channel({p01, p2}))) ==
          StructuralClass::block_projection);
    // Identity: the single-block pinching.
    CHECK(classify_structure(Channel(KrausChannel(
              {ComplexMatrix::Identity(2, 2)}))) ==
          StructuralClass::block_projection);
  }

  SECTION("full dephasing is an extreme cq channel") {
    std::vector<ComplexMatrix> ps;
    for (int k = 0; k < 3; ++k)
      ps.push_back(projector(ComplexVector::Unit(3, k).eval()));
    CHECK(classify_structure(Channel(block_projection_channel(ps))) ==
          StructuralClass::extreme_cq);
  }

  SECTION("generic channels fall through") {
    CHECK(classify_structure(Channel(tetrahedron_channel())) ==
          StructuralClass::general);
    CHECK(classify_structure(Channel(KrausChannel({random_unitary(2, 458)}))) ==
          StructuralClass::general);
    CHECK(classify_structure(Channel(random_kraus_channel(2, 2, 459))) ==
          StructuralClass::general);
  }
}

TEST_CASE("tetrahedron channel", "[extremality]") {
  TetrahedronFrame frame = tetrahedron_frame();
  HolevoChannel tetra = tetrahedron_channel();

  SECTION("holevo pairs are the scaled vertex projectors") {
    REQUIRE(tetra.pairs().size() == 4);
    ComplexMatrix povm_sum = ComplexMatrix::Zero(3, 3);
    for (size_t i = 0; i < 4; ++i) {
      const HolevoPair& p = tetra.pairs()[i];
      CHECK(max_abs_diff(p.state.matrix(), projector(frame.v[i])) < 1e-12);
      CHECK(max_abs_diff(p.effect, (0.75 * projector(frame.v[i])).eval()) <
            1e-12);
      povm_sum += p.effect;
    }
    CHECK(max_abs_diff(povm_sum, ComplexMatrix::Identity(3, 3)) < 1e-12);
    CHECK(tetra.trace_preserving());
  }

  SECTION("cross vectors only see their own pair") {
    for (size_t p = 0; p < 6; ++p)
      for (int k = 0; k < 4; ++k) {
        if (k == frame.pair_first[p] || k == frame.pair_second[p]) continue;
        CHECK(std::abs(frame.w[p].dot(frame.v[size_t(k)])) < 1e-12);
      }
  }

  SECTION("cross vector outputs are the averaged pair projectors") {
    for (size_t p = 0; p < 6; ++p) {
      ComplexMatrix got = apply_to_matrix(Channel(tetra), projector(frame.w[p]));
      ComplexMatrix expect = 0.5 * (projector(frame.v[size_t(frame.pair_first[p])]) +
                                    projector(frame.v[size_t(frame.pair_second[p])]));
      CHECK(max_abs_diff(got, expect) < 1e-12);
    }
    // Rank 2 output with the overlap-split spectrum {0, 1/3, 2/3}.
    ComplexMatrix out = apply_to_matrix(Channel(tetra), projector(frame.w[0]));
    EigResult eig = hermitian_eig(out);
    CHECK(std::abs(eig.eigenvalues(0)) < 1e-12);
    CHECK(std::abs(eig.eigenvalues(1) - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(eig.eigenvalues(2) - 2.0 / 3.0) < 1e-12);
    // Orthogonal to the complementary cross vector: w[0] pairs {0,1}, its
    // complement {2,3} is w[5].
    CHECK((out * frame.w[5]).norm() < 1e-12);
  }

  SECTION("choi rank is four and the channel stays ppt") {
    ChoiMatrix choi = choi_of(Channel(tetra));
    CHECK(numerical_rank(choi.matrix()) == 4);
    CHECK_FALSE(kraus_count_test(choi).has_value());
    CHECK(is_ppt(choi).ppt);
    EbtVerdict verdict = classify(Channel(tetra));
    CHECK(verdict.status == EbtStatus::ebt);
  }

  SECTION("kraus round trip recovers the vertex pairs") {
    KrausChannel ops = kraus_of(Channel(tetra));
    REQUIRE(ops.operators().size() == 4);
    ComplexMatrix sum = ComplexMatrix::Zero(3, 3);
    for (const auto& a : ops.operators()) sum += a.adjoint() * a;
    CHECK(max_abs_diff(sum, ComplexMatrix::Identity(3, 3)) < 1e-10);
    HolevoChannel back = holevo_from_rank1_kraus(ops);
    REQUIRE(back.pairs().size() == 4);
    for (const auto& pair : back.pairs())
      CHECK(max_abs_diff(pair.effect,
                         (0.75 * pair.state.matrix().conjugate()).eval()) <
            1e-9);
    CHECK(apply_distance(Channel(back), Channel(tetra), 460) < 1e-10);
  }

  SECTION("verification report") {
    TetrahedronVerification rep = verify_tetrahedron();
    CHECK(rep.povm_completeness < 1e-12);
    CHECK(rep.max_unrelated_overlap < 1e-12);
    CHECK(rep.max_output_deviation < 1e-12);
    CHECK(rep.max_complement_leakage < 1e-12);
    REQUIRE(rep.sample_output_spectrum.size() == 3);
    CHECK(std::abs(rep.sample_output_spectrum(0)) < 1e-12);
    CHECK(std::abs(rep.sample_output_spectrum(1) - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(rep.sample_output_spectrum(2) - 2.0 / 3.0) < 1e-12);
    CHECK(rep.cpt.cpt_extreme == CptExtremality::no);
    CHECK(rep.passed);
  }
}

TEST_CASE("trine block channel", "[extremality]") {
  HolevoChannel trine = trine_block_channel();
  REQUIRE(trine.pairs().size() == 4);

  SECTION("effects form the trine plus block povm") {
    const double r3 = std::sqrt(3.0);
    const ComplexMatrix& e1 = trine.pairs()[0].effect;
    const ComplexMatrix& e2 = trine.pairs()[1].effect;
    const ComplexMatrix& e3 = trine.pairs()[2].effect;
    const ComplexMatrix& e4 = trine.pairs()[3].effect;
    CHECK(std::abs(e1(0, 0) - Complex(2.0 / 3.0)) < 1e-12);
    CHECK(std::abs(e1(1, 1)) < 1e-12);
    CHECK(std::abs(e2(0, 0) - Complex(1.0 / 6.0)) < 1e-12);
    CHECK(std::abs(e2(0, 1) - Complex(r3 / 6.0)) < 1e-12);
    CHECK(std::abs(e2(1, 1) - Complex(0.5)) < 1e-12);
    CHECK(std::abs(e3(0, 1) - Complex(-r3 / 6.0)) < 1e-12);
    CHECK(std::abs(e4(2, 2) - Complex(1.0)) < 1e-12);
    CHECK(std::abs(e4(3, 3) - Complex(1.0)) < 1e-12);
    CHECK(std::abs(e4(0, 0)) < 1e-12);

    ComplexMatrix sum = ComplexMatrix::Zero(4, 4);
    std::vector<ComplexMatrix> elements;
    for (const auto& p : trine.pairs()) {
      sum += p.effect;
      elements.push_back(p.effect);
    }
    CHECK(max_abs_diff(sum, ComplexMatrix::Identity(4, 4)) < 1e-12);
    CHECK_NOTHROW(validate_povm(elements));
  }

  SECTION("outputs are the register basis") {
    for (size_t k = 0; k < 4; ++k)
      CHECK(max_abs_diff(trine.pairs()[k].state.matrix(),
                         projector(ComplexVector::Unit(4, Index(k)).eval())) <
            1e-12);
  }

  SECTION("qc but not cq, entanglement breaking, not cpt extreme") {
    CHECK(classify_structure(Channel(trine)) == StructuralClass::qc);
    CHECK(classify(Channel(trine)).status == EbtStatus::ebt);
    CHECK(cpt_extremality(kraus_of(Channel(trine))).cpt_extreme ==
          CptExtremality::no);
  }
}

TEST_CASE("ebt extremality hints", "[extremality]") {
  SECTION("pure constant channels are extreme") {
    Channel ch{point_channel(DensityMatrix::from_pure(random_pure(3, 470)))};
    EbtExtremalityHints h = ebt_extremality_hints(ch);
    CHECK(h.verdict == EbtExtremeVerdict::extreme);
    CHECK(h.structural_class == StructuralClass::point);
    CHECK_FALSE(h.split.has_value());
  }

  SECTION("mixed constant channels split into point channels") {
    Channel ch{point_channel(random_density(3, 2, 471))};
    EbtExtremalityHints h = ebt_extremality_hints(ch);
    CHECK(h.verdict == EbtExtremeVerdict::not_extreme);
    REQUIRE(h.split.has_value());
    CHECK(h.split->weight > 0.0);
    CHECK(h.split->weight < 1.0);
    CHECK(classify_structure(Channel(h.split->first)) ==
          StructuralClass::point);
    CHECK(classify_structure(Channel(h.split->second)) ==
          StructuralClass::point);
    CHECK(split_distance(ch, *h.split, 472) < 1e-9);
    CHECK(max_abs_diff(choi_of(Channel(h.split->first)).matrix(),
                       choi_of(Channel(h.split->second)).matrix()) > 1e-3);
  }

  SECTION("extreme cq channels are extreme in the ebt set") {
    ComplexVector plus(2);
    plus << Complex(1.0 / std::sqrt(2.0)), Complex(1.0 / std::sqrt(2.0));
    std::vector<DensityMatrix> states = {
        DensityMatrix::from_pure(PureState(ComplexVector::Unit(2, 0).eval())),
        DensityMatrix::from_pure(PureState(plus))};
    EbtExtremalityHints h = ebt_extremality_hints(Channel(cq_channel(states)));
    CHECK(h.verdict == EbtExtremeVerdict::extreme);
    CHECK(h.structural_class == StructuralClass::extreme_cq);
    CHECK(h.cpt_extreme == CptExtremality::yes);
    CHECK(h.consistent);

    // Orthogonal preparations: still extreme in EBT, no longer in CPT.
    std::vector<DensityMatrix> ortho = {
        DensityMatrix::from_pure(PureState(ComplexVector::Unit(2, 0).eval())),
        DensityMatrix::from_pure(PureState(ComplexVector::Unit(2, 1).eval()))};
    EbtExtremalityHints h2 = ebt_extremality_hints(Channel(cq_channel(ortho)));
    CHECK(h2.verdict == EbtExtremeVerdict::extreme);
    CHECK(h2.cpt_extreme == CptExtremality::no);
    CHECK(h2.consistent);
  }

  SECTION("cq channels with a mixed preparation split") {
    std::vector<DensityMatrix> states = {
        random_density(2, 2, 473),
        DensityMatrix::from_pure(random_pure(2, 474))};
    Channel ch{cq_channel(states)};
    EbtExtremalityHints h = ebt_extremality_hints(ch);
    CHECK(h.verdict == EbtExtremeVerdict::not_extreme);
    CHECK(h.structural_class == StructuralClass::cq);
    REQUIRE(h.split.has_value());
    CHECK(split_distance(ch, *h.split, 475) < 1e-9);
    CHECK(h.split->first.trace_preserving());
    CHECK(h.split->second.trace_preserving());
  }

  SECTION("verified builtins are flagged extreme") {
    EbtExtremalityHints ht = ebt_extremality_hints(Channel(tetrahedron_channel()));
    CHECK(ht.verdict == EbtExtremeVerdict::extreme);
    CHECK(ht.structural_class == StructuralClass::general);
    CHECK(ht.builtin == "tetrahedron");

    EbtExtremalityHints hr = ebt_extremality_hints(Channel(trine_block_channel()));
    CHECK(hr.verdict == EbtExtremeVerdict::extreme);
    CHECK(hr.structural_class == StructuralClass::qc);
    CHECK(hr.builtin == "trine4");
  }

  SECTION("generic qc channels stay inconclusive") {
    EbtExtremalityHints h =
        ebt_extremality_hints(Channel(qc_channel(random_povm(3, 3, 476))));
    CHECK(h.verdict == EbtExtremeVerdict::inconclusive);
    CHECK(h.consistent);
  }

  SECTION("channels that are not entanglement breaking are rejected") {
    Channel identity{KrausChannel({ComplexMatrix::Identity(2, 2)})};
    try {
      ebt_extremality_hints(identity);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::not_ebt_input);
    }
  }
}
