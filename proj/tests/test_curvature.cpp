#include "osserman/curvature.hpp"
#include "osserman/errors.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace osserman;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("tensor shape checks") {
    CHECK_THROWS_AS(CurvatureTensor(3, std::vector<double>(80)), Error);
    try {
        CurvatureTensor(2, std::vector<double>(3));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ShapeMismatch);
    }
    CHECK(CurvatureTensor(3).max_abs() == 0.0);
}

TEST_CASE("validate_tensor") {
    const auto s = sphere_tensor(4);
    const auto v = validate_tensor(s);
    CHECK(v.passed);
    CHECK(v.worst() == 0.0);

    SUBCASE("a perturbed component breaks the identities") {
        auto bad = s;
        bad(0, 1, 2, 3) += 1e-3;
        const auto vb = validate_tensor(bad);
        CHECK_FALSE(vb.passed);
        CHECK(vb.bianchi >= 1e-4);
    }
    SUBCASE("Clifford tensors pass") {
        const auto sys = testing::random_system(8, 0.5, {2.0, -1.0, 3.0}, 21);
        CHECK(validate_tensor(curvature_from_clifford(sys)).passed);
    }
}

TEST_CASE("curvature_action") {
    SeededRng rng(1);
    const auto s = sphere_tensor(5);
    const Vector x = rng.gaussian_vector(5), y = rng.gaussian_vector(5), z = rng.gaussian_vector(5);
    CHECK(max_abs(curvature_action(s, x, x, z)) < 1e-14);
    const Vector expect = x.dot(z) * y - y.dot(z) * x;
    CHECK(max_abs(curvature_action(s, x, y, z) - expect) < 1e-13);
    CHECK(max_abs(curvature_action(s, 2.0 * x, y, z) - 2.0 * curvature_action(s, x, y, z)) < 1e-13);
    CHECK_THROWS_AS(curvature_action(s, Vector::Zero(4), y, z), Error);

    SUBCASE("agrees with the vector form of a Clifford tensor") {
        const auto sys = testing::random_system(8, 1.5, {3.0, -2.0}, 5);
        const auto r = curvature_from_clifford(sys);
        for (int t = 0; t < 10; ++t) {
            const Vector a = rng.gaussian_vector(8), b = rng.gaussian_vector(8), c = rng.gaussian_vector(8);
            CHECK(max_abs(curvature_action(r, a, b, c) - testing::clifford_action(sys, a, b, c)) < 1e-11);
        }
    }
}

TEST_CASE("jacobi") {
    SeededRng rng(2);
    const auto s = sphere_tensor(6);
    CHECK(max_abs(jacobi(s, Vector::Zero(6))) == 0.0);
    const Vector x = rng.unit_vector(6);
    CHECK(max_abs(jacobi(s, x) - (Matrix::Identity(6, 6) - x * x.transpose())) < 1e-14);

    const auto sys = testing::random_system(4, 1.0, {4.0}, 3);
    const auto r = curvature_from_clifford(sys);
    const Matrix rx = jacobi(r, x.head(4).normalized());
    const Vector u = x.head(4).normalized();
    const Vector jx = sys.J[0] * u;
    CHECK(max_abs(rx * u) < 1e-13);
    CHECK(max_abs(rx * jx - 4.0 * jx) < 1e-13);
    // directions orthogonal to X and J1 X have eigenvalue 1
    Matrix basis(4, 2);
    basis.col(0) = u;
    basis.col(1) = jx;
    const Matrix others = nullspace(basis.transpose());
    CHECK(max_abs(rx * others - others) < 1e-13);

    SUBCASE("quadratic and self-adjoint") {
        const Vector y = rng.gaussian_vector(4), z = rng.gaussian_vector(4), w = rng.gaussian_vector(4);
        CHECK(max_abs(jacobi(r, 3.0 * y) - 9.0 * jacobi(r, y)) < 1e-12);
        const Matrix ry = jacobi(r, y);
        CHECK(std::abs((ry * z).dot(w) - z.dot(ry * w)) < 1e-12);
        CHECK(max_abs(ry * y) < 1e-12);
    }
}

TEST_CASE("mixed_jacobi") {
    SeededRng rng(3);
    const auto sys = testing::random_system(8, 0.3, {1.0, 2.0, 2.0}, 7);
    const auto r = curvature_from_clifford(sys);
    const Vector x = rng.gaussian_vector(8), y = rng.gaussian_vector(8);
    CHECK(max_abs(mixed_jacobi(r, x, x) - jacobi(r, x)) < 1e-13);
    CHECK(max_abs(mixed_jacobi(r, x, y) - mixed_jacobi(r, y, x)) < 1e-13);
    const double a = 0.7, b = -1.3;
    const Matrix lhs = jacobi(r, a * x + b * y);
    const Matrix rhs = a * a * jacobi(r, x) + 2 * a * b * mixed_jacobi(r, x, y) + b * b * jacobi(r, y);
    CHECK(max_abs(lhs - rhs) < 1e-10);

    SUBCASE("brute force from curvature_action") {
        const auto s = sphere_tensor(5);
        const Vector p = rng.gaussian_vector(5), q = rng.gaussian_vector(5);
        const Matrix m = mixed_jacobi(s, p, q);
        for (int k = 0; k < 5; ++k) {
            const Vector z = Vector::Unit(5, k);
            const Vector want = 0.5 * (curvature_action(s, p, z, q) + curvature_action(s, q, z, p));
            CHECK(max_abs(m * z - want) < 1e-13);
        }
    }
}

TEST_CASE("sphere_tensor") {
    const auto s2 = sphere_tensor(2);
    CHECK(s2(0, 1, 0, 1) == 1.0);
    CHECK(s2(0, 1, 1, 0) == -1.0);
    CHECK(validate_tensor(s2).bianchi == 0.0);
    CHECK_THROWS_AS(sphere_tensor(1), Error);
    SeededRng rng(4);
    const auto prof = jacobi_spectrum(sphere_tensor(7), rng.unit_vector(7));
    REQUIRE(prof.size() == 1);
    CHECK(prof[0].multiplicity == 6);
    CHECK(prof[0].value == doctest::Approx(1.0));
}

TEST_CASE("combine") {
    const auto sys = testing::random_system(8, 1.0, {3.0, 5.0}, 31);
    const auto r = curvature_from_clifford(sys);
    CHECK(combine(1.0, r, -1.0, r).max_abs() == 0.0);
    SeededRng rng(5);
    const Vector x = rng.unit_vector(8);
    CHECK(max_abs(jacobi(combine(2.0, r, 0.0, r), x) - 2.0 * jacobi(r, x)) < 1e-13);
    const auto shifted = combine(1.0, r, -1.0, sphere_tensor(8));
    const Vector before = restricted_jacobi_eigenvalues(r, x);
    const Vector after = restricted_jacobi_eigenvalues(shifted, x);
    CHECK(max_abs(after - (before.array() - 1.0).matrix()) < 1e-12);
    CHECK_THROWS_AS(combine(1.0, r, 1.0, sphere_tensor(4)), Error);
}

TEST_CASE("jacobi_spectrum") {
    SeededRng rng(6);
    const auto sys = testing::random_system(8, 1.0, {2.0, 2.0, 2.0}, 41);
    const auto prof = jacobi_spectrum(curvature_from_clifford(sys), rng.unit_vector(8));
    REQUIRE(prof.size() == 2);
    CHECK(prof[0].multiplicity == 4);
    CHECK(prof[0].value == doctest::Approx(1.0));
    CHECK(prof[1].multiplicity == 3);
    CHECK(prof[1].value == doctest::Approx(2.0));
    try {
        jacobi_spectrum(sphere_tensor(3), Vector::Ones(3));
        FAIL("expected NotUnit");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotUnit);
    }
}

TEST_CASE("tensor_from_jacobi inverts jacobi") {
    const auto sys = testing::random_system(8, -0.5, {1.0, 4.0, 4.0}, 51);
    const auto r = curvature_from_clifford(sys);
    const auto rebuilt = tensor_from_jacobi(8, [&](const Vector& x) { return jacobi(r, x); });
    CHECK(testing::max_abs_diff(r, rebuilt) < 1e-12);
    const auto direct = tensor_from_jacobi(8, [&](const Vector& x) { return clifford_jacobi(sys, x); });
    CHECK(testing::max_abs_diff(r, direct) < 1e-12);
}
