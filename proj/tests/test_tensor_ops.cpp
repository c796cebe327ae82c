#include <catch2/catch_amalgamated.hpp>

#include <ebtkit/tensor_ops.hpp>

#include "test_support.hpp"

using namespace ebtkit;
using ebttest::max_abs_diff;
using Catch::Approx;

namespace {

ComplexMatrix bell_projector(Eigen::Index d) {
  ComplexVector beta = ComplexVector::Zero(d * d);
  for (Eigen::Index j = 0; j < d; ++j) beta(j * d + j) = 1.0 / std::sqrt(double(d));
  return beta * beta.adjoint();
}

}  // namespace

TEST_CASE("kron matches the index-loop oracle", "[tensor_ops]") {
  SECTION("pauli x (x) pauli z, frozen entries") {
    ComplexMatrix k = kron(ebttest::pauli_x(), ebttest::pauli_z());
    ComplexMatrix expect(4, 4);
    expect << 0, 0, 1, 0,
              0, 0, 0, -1,
              1, 0, 0, 0,
              0, -1, 0, 0;
    REQUIRE(max_abs_diff(k, expect) == 0.0);
  }
  SECTION("random rectangular factors") {
    ComplexMatrix a = ebttest::gaussian_matrix(2, 3, 11);
    ComplexMatrix b = ebttest::gaussian_matrix(4, 2, 12);
    REQUIRE(max_abs_diff(kron(a, b), ebttest::naive_kron(a, b)) < 1e-14);
  }
  SECTION("trace is multiplicative") {
    ComplexMatrix a = ebttest::random_hermitian(3, 21);
    ComplexMatrix b = ebttest::random_hermitian(2, 22);
    REQUIRE(std::abs(kron(a, b).trace() - a.trace() * b.trace()) < 1e-12);
  }
}

TEST_CASE("partial_trace contracts one factor", "[tensor_ops]") {
  BipartiteDims dims{2, 3};
  ComplexMatrix a = ebttest::random_hermitian(2, 31);
  ComplexMatrix b = ebttest::random_hermitian(3, 32);
  ComplexMatrix ab = kron(a, b);

  SECTION("product inputs reduce to scaled factors") {
    ComplexMatrix t2 = partial_trace(ab, dims, Factor::second);
    REQUIRE(max_abs_diff(t2, a * b.trace()) < 1e-12);
    ComplexMatrix t1 = partial_trace(ab, dims, Factor::first);
    REQUIRE(max_abs_diff(t1, b * a.trace()) < 1e-12);
  }
  SECTION("agrees with the loop oracle on a non-product matrix") {
    ComplexMatrix m = ebttest::random_hermitian(6, 33);
    REQUIRE(max_abs_diff(partial_trace(m, dims, Factor::second),
                         ebttest::naive_trace_out_second(m, 2, 3)) < 1e-13);
    REQUIRE(max_abs_diff(partial_trace(m, dims, Factor::first),
                         ebttest::naive_trace_out_first(m, 2, 3)) < 1e-13);
  }
  SECTION("maximally entangled projector has maximally mixed marginals") {
    for (Eigen::Index d : {2, 3, 4}) {
      ComplexMatrix p = bell_projector(d);
      ComplexMatrix marg = partial_trace(p, BipartiteDims{d, d}, Factor::second);
      ComplexMatrix eye = ComplexMatrix::Identity(d, d) / double(d);
      REQUIRE(max_abs_diff(marg, eye) < 1e-14);
    }
  }
  SECTION("dimension mismatch throws") {
    REQUIRE_THROWS_AS(partial_trace(ab, BipartiteDims{4, 2}, Factor::first),
                      Error);
  }
}

TEST_CASE("partial_transpose transposes one factor", "[tensor_ops]") {
  BipartiteDims dims{2, 2};
  SECTION("product inputs") {
    ComplexMatrix a = ebttest::gaussian_matrix(2, 2, 41);
    ComplexMatrix b = ebttest::gaussian_matrix(2, 2, 42);
    ComplexMatrix ab = kron(a, b);
    REQUIRE(max_abs_diff(partial_transpose(ab, dims, Factor::second),
                         kron(a, b.transpose().eval())) < 1e-14);
    REQUIRE(max_abs_diff(partial_transpose(ab, dims, Factor::first),
                         kron(a.transpose().eval(), b)) < 1e-14);
  }
  SECTION("loop oracle, rectangular factors") {
    BipartiteDims d23{2, 3};
    ComplexMatrix m = ebttest::gaussian_matrix(6, 6, 43);
    REQUIRE(max_abs_diff(partial_transpose(m, d23, Factor::second),
                         ebttest::naive_transpose_second(m, 2, 3)) == 0.0);
    REQUIRE(max_abs_diff(partial_transpose(m, d23, Factor::first),
                         ebttest::naive_transpose_first(m, 2, 3)) == 0.0);
  }
  SECTION("involution and composition with full transpose") {
    ComplexMatrix m = ebttest::gaussian_matrix(4, 4, 44);
    ComplexMatrix pt2 = partial_transpose(m, dims, Factor::second);
    REQUIRE(max_abs_diff(partial_transpose(pt2, dims, Factor::second), m) == 0.0);
    ComplexMatrix both = partial_transpose(pt2, dims, Factor::first);
    REQUIRE(max_abs_diff(both, m.transpose().eval()) == 0.0);
  }
  SECTION("entangled projector develops one negative eigenvalue") {
    // Frozen: transposing one side of the d=2 maximally entangled projector
    // yields spectrum {-1/2, +1/2, +1/2, +1/2}.
    ComplexMatrix pt = partial_transpose(bell_projector(2), dims, Factor::second);
    EigResult eig = hermitian_eig(pt);
    REQUIRE(eig.eigenvalues(0) == Approx(-0.5).margin(1e-12));
    for (int i = 1; i < 4; ++i)
      REQUIRE(eig.eigenvalues(i) == Approx(0.5).margin(1e-12));
  }
}

TEST_CASE("hermitian_eig is ordered, phase-fixed, accurate", "[tensor_ops]") {
  SECTION("pauli x, frozen eigenpairs") {
    EigResult eig = hermitian_eig(ebttest::pauli_x());
    REQUIRE(eig.eigenvalues(0) == Approx(-1.0).margin(1e-14));
    REQUIRE(eig.eigenvalues(1) == Approx(1.0).margin(1e-14));
    // Phase convention: first nonzero component real positive.
    double s = 1.0 / std::sqrt(2.0);
    REQUIRE(std::abs(eig.eigenvectors(0, 0) - Complex(s, 0)) < 1e-14);
    REQUIRE(std::abs(eig.eigenvectors(1, 0) - Complex(-s, 0)) < 1e-14);
    REQUIRE(std::abs(eig.eigenvectors(0, 1) - Complex(s, 0)) < 1e-14);
    REQUIRE(std::abs(eig.eigenvectors(1, 1) - Complex(s, 0)) < 1e-14);
  }
  SECTION("reconstruction residual within tolerance") {
    ComplexMatrix m = ebttest::random_hermitian(5, 51);
    EigResult eig = hermitian_eig(m);
    ComplexMatrix recon = eig.eigenvectors *
                          eig.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
                          eig.eigenvectors.adjoint();
    REQUIRE((m - recon).norm() <= 1e-12 * (1.0 + m.norm()));
    for (int i = 0; i + 1 < 5; ++i)
      REQUIRE(eig.eigenvalues(i) <= eig.eigenvalues(i + 1));
  }
  SECTION("degenerate spectrum: spectral projectors match") {
    // Projector comparison is the stable statement under degeneracy.
    ComplexMatrix m = ComplexMatrix::Zero(3, 3);
    m(2, 2) = 1.0;  // eigenvalues {0, 0, 1}
    EigResult eig = hermitian_eig(m);
    ComplexMatrix p0 = eig.eigenvectors.col(0) * eig.eigenvectors.col(0).adjoint() +
                       eig.eigenvectors.col(1) * eig.eigenvectors.col(1).adjoint();
    ComplexMatrix expect = ComplexMatrix::Identity(3, 3);
    expect(2, 2) = 0.0;
    REQUIRE(max_abs_diff(p0, expect) < 1e-13);
  }
  SECTION("non-hermitian input throws") {
    ComplexMatrix m(2, 2);
    m << 0, 1, 0, 0;
    REQUIRE_THROWS_AS(hermitian_eig(m), Error);
  }
  SECTION("phase convention with a leading zero component") {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    EigResult eig = hermitian_eig(m);
    // Eigenvector of -1 is e_1 up to phase; convention pins it to +e_1.
    REQUIRE(std::abs(eig.eigenvectors(1, 0) - Complex(1, 0)) < 1e-14);
  }
}

TEST_CASE("numerical_rank thresholds singular values", "[tensor_ops]") {
  SECTION("frozen small cases") {
    REQUIRE(numerical_rank(bell_projector(3)) == 1);
    REQUIRE(numerical_rank(ComplexMatrix::Identity(4, 4)) == 4);
    REQUIRE(numerical_rank(ComplexMatrix::Zero(3, 3)) == 0);
  }
  SECTION("default tolerance is max(rows,cols)*eps*sigma_max") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = 1e-16;  // below 2*eps, default tolerance swallows it
    REQUIRE(numerical_rank(m) == 1);
    m(1, 1) = 1e-13;  // above 2*eps, counted by default
    REQUIRE(numerical_rank(m) == 2);
    REQUIRE(numerical_rank(m, 1e-12) == 1);
  }
  SECTION("rank of a random outer product") {
    ComplexVector u = ebttest::random_unit_vector(4, 61);
    ComplexVector v = ebttest::random_unit_vector(4, 62);
    REQUIRE(numerical_rank((u * v.adjoint()).eval()) == 1);
  }
}

TEST_CASE("is_psd accepts states, rejects negative directions", "[tensor_ops]") {
  REQUIRE(is_psd(ebttest::random_test_density(3, 71)));
  SECTION("transposed-factor depolarizing matrix at lambda=0.5 is not psd") {
    // Frozen: min eigenvalue of the partially transposed matrix is
    // (1 - 3*0.5)/4 = -0.125.
    double lam = 0.5;
    ComplexMatrix choi = lam * bell_projector(2) +
                         (1 - lam) * ComplexMatrix::Identity(4, 4) / 4.0;
    ComplexMatrix pt = partial_transpose(choi, BipartiteDims{2, 2}, Factor::second);
    REQUIRE_FALSE(is_psd(pt));
    EigResult eig = hermitian_eig(pt);
    REQUIRE(eig.eigenvalues(0) == Approx(-0.125).margin(1e-12));
  }
  SECTION("tolerance boundary") {
    ComplexMatrix m = ComplexMatrix::Identity(2, 2);
    m(0, 0) = -5e-11;  // inside the default 1e-10 slack
    REQUIRE(is_psd(m));
    m(0, 0) = -1e-9;
    REQUIRE_FALSE(is_psd(m));
  }
  SECTION("non-hermitian input throws") {
    ComplexMatrix m(2, 2);
    m << 1, 1, 0, 1;
    REQUIRE_THROWS_AS(is_psd(m), Error);
  }
}

TEST_CASE("hs_inner is the trace pairing", "[tensor_ops]") {
  REQUIRE(std::abs(hs_inner(ebttest::pauli_x(), ebttest::pauli_y())) < 1e-15);
  REQUIRE(hs_inner(ebttest::pauli_x(), ebttest::pauli_x()).real() == Approx(2.0));
  SECTION("conjugate linear in the first argument") {
    ComplexMatrix a = ebttest::gaussian_matrix(3, 3, 81);
    ComplexMatrix b = ebttest::gaussian_matrix(3, 3, 82);
    Complex lhs = hs_inner((Complex(0, 1) * a).eval(), b);
    Complex rhs = Complex(0, -1) * hs_inner(a, b);
    REQUIRE(std::abs(lhs - rhs) < 1e-12);
  }
  SECTION("shape mismatch throws") {
    REQUIRE_THROWS_AS(hs_inner(ComplexMatrix::Identity(2, 2),
                               ComplexMatrix::Identity(3, 3)),
                      Error);
  }
}
