#include "osserman/errors.hpp"
#include "osserman/numkernel.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>

using namespace osserman;

TEST_CASE("sym_eigen on trivial inputs") {
    const auto id = sym_eigen(Matrix::Identity(3, 3));
    CHECK(id.eigenvalues.isApprox(Vector::Ones(3)));

    Matrix d = Matrix::Zero(3, 3);
    d(2, 2) = 3.0;
    const auto dec = sym_eigen(d);
    CHECK(dec.eigenvalues(0) == doctest::Approx(0.0));
    CHECK(dec.eigenvalues(1) == doctest::Approx(0.0));
    CHECK(dec.eigenvalues(2) == doctest::Approx(3.0));
    CHECK(std::abs(std::abs(dec.eigenvectors(2, 2)) - 1.0) < 1e-14);
}

TEST_CASE("sym_eigen recovers a planted spectrum") {
    SeededRng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 9;
        Vector d(n);
        for (int i = 0; i < n; ++i) d(i) = 4.0 * rng.gaussian();
        const Matrix q = rng.orthogonal(n);
        const Matrix a = q * d.asDiagonal() * q.transpose();
        const auto dec = sym_eigen(0.5 * (a + a.transpose()));
        std::vector<double> want(d.data(), d.data() + n);
        std::sort(want.begin(), want.end());
        for (int i = 0; i < n; ++i) CHECK(std::abs(dec.eigenvalues(i) - want[static_cast<std::size_t>(i)]) < 1e-10);
        const double anorm = a.norm();
        CHECK((a - dec.eigenvectors * dec.eigenvalues.asDiagonal() * dec.eigenvectors.transpose()).norm() <= 1e-9 * anorm);
        CHECK((dec.eigenvectors.transpose() * dec.eigenvectors - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("sym_eigen rejects bad input") {
    Matrix a = Matrix::Identity(2, 2);
    a(0, 1) = 1e-6;
    CHECK_THROWS_AS(sym_eigen(a), Error);
    try {
        sym_eigen(a);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonSymmetric);
    }
    a(0, 1) = std::numeric_limits<double>::quiet_NaN();
    try {
        sym_eigen(a);
        FAIL("expected NonFinite");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonFinite);
    }
}

TEST_CASE("sym_eigen is deterministic") {
    SeededRng rng(5);
    const Matrix a = testing::random_symmetric(rng, 7);
    const auto d1 = sym_eigen(a);
    const auto d2 = sym_eigen(a);
    CHECK(d1.eigenvalues == d2.eigenvalues);
    CHECK(d1.eigenvectors == d2.eigenvectors);
}

TEST_CASE("cluster_spectrum") {
    const std::vector<double> a{1.0, 1.0 + 1e-12, 4.0};
    const auto c = cluster_spectrum(a, 1e-9);
    REQUIRE(c.size() == 2);
    CHECK(c[0].multiplicity == 2);
    CHECK(c[0].value == doctest::Approx(1.0));
    CHECK(c[1] == EigenCluster{4.0, 1});

    const std::vector<double> z{0.0, 0.0, 0.0};
    const auto cz = cluster_spectrum(z);
    REQUIRE(cz.size() == 1);
    CHECK(cz[0] == EigenCluster{0.0, 3});

    SUBCASE("near-merging clusters are ambiguous") {
        const std::vector<double> amb{1.0, 1.0 + 5e-9, 2.0};
        try {
            cluster_spectrum(amb, 1e-9);
            FAIL("expected AmbiguousClustering");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::AmbiguousClustering);
        }
    }
}

TEST_CASE("cluster_spectrum of a Cliff(1) Jacobi operator on R^4") {
    const auto sys = testing::random_system(4, 1.0, {4.0}, 3);
    SeededRng rng(8);
    const Vector x = rng.unit_vector(4);
    // Independent restriction to X^perp: project and drop the zero from X.
    const Matrix rx = clifford_jacobi(sys, x);
    auto ev = sym_eigen(rx).eigenvalues;
    std::vector<double> v(ev.data(), ev.data() + ev.size());
    auto zero = std::min_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    v.erase(zero);
    const auto c = cluster_spectrum(v);
    REQUIRE(c.size() == 2);
    CHECK(c[0].multiplicity == 2);
    CHECK(c[0].value == doctest::Approx(1.0));
    CHECK(c[1].multiplicity == 1);
    CHECK(c[1].value == doctest::Approx(4.0));
}

TEST_CASE("numeric_rank") {
    CHECK(numeric_rank(Matrix::Zero(4, 3)) == 0);
    SeededRng rng(2);
    const Matrix q = rng.orthogonal(6);
    CHECK(numeric_rank(q.leftCols(4)) == 4);

    // invariance under orthogonal multiplication
    Matrix low = Matrix::Zero(6, 6);
    low.topLeftCorner(3, 3) = Matrix::Identity(3, 3);
    CHECK(numeric_rank(rng.orthogonal(6) * low * rng.orthogonal(6)) == 3);

    const auto sys = testing::random_system(8, 0.0, {1.0, 2.0, 3.0}, 4);
    CHECK(numeric_rank(clifford_jacobi(sys, rng.unit_vector(8))) == 3);
}

TEST_CASE("image_sum_dim") {
    const auto sys = testing::random_system(8, 0.0, {1.0, 1.0, 1.0}, 9);
    SeededRng rng(10);
    const Matrix q = rng.orthogonal(8);
    const Matrix rx = clifford_jacobi(sys, q.col(0));
    const Matrix ry = clifford_jacobi(sys, q.col(1));
    CHECK(image_sum_dim(std::vector<Matrix>{rx}) == 3);
    CHECK(image_sum_dim(std::vector<Matrix>{rx, ry}) == 6);
    CHECK(image_sum_dim(std::vector<Matrix>{rx, rx}) == 3);
}

TEST_CASE("orthogonal_complement and nullspace") {
    SeededRng rng(12);
    const Vector x = rng.unit_vector(5);
    const Matrix c = orthogonal_complement(x);
    CHECK(c.cols() == 4);
    CHECK((c.transpose() * x).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((c.transpose() * c - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);

    Matrix a(2, 4);
    a << 1, 0, 0, 0, 0, 1, 1, 0;
    const Matrix ns = nullspace(a);
    CHECK(ns.cols() == 2);
    CHECK((a * ns).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("subspace_distance") {
    SeededRng rng(13);
    const Matrix q = rng.orthogonal(6);
    CHECK(subspace_distance(q.leftCols(2), q.leftCols(2) * rng.orthogonal(2)) < 1e-14);
    CHECK(subspace_distance(q.leftCols(2), q.middleCols(2, 2)) == doctest::Approx(1.0));
    CHECK(subspace_distance(q.leftCols(2), q.leftCols(3)) == 1.0);
}

TEST_CASE("SeededRng reproducibility and unit sampling") {
    SeededRng a(99), b(99), c(100);
    for (int i = 0; i < 10; ++i) CHECK(a.gaussian() == b.gaussian());
    CHECK(a.uniform() != c.uniform());
    const Vector u = SeededRng(7).unit_vector(9);
    CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-15));
    const Matrix q = SeededRng(7).orthogonal(5);
    CHECK((q.transpose() * q - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-14);
}
