// Randomized properties over many seeds. Each case draws its own inputs
// from SeededRng so failures are reproducible from the captured seed.

#include "osserman/clifford.hpp"
#include "osserman/osserman.hpp"
#include "osserman/recovery.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>

using namespace osserman;

namespace {

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

struct RandomCase {
    int n;
    CliffordSystem sys;
};

// Random (n, nu) with nu <= rho(n) - 1, lambda0 and well separated mu's.
RandomCase random_case(std::uint64_t seed, bool recoverable) {
    SeededRng rng(seed);
    static const int dims[] = {4, 6, 8, 10, 12, 16};
    for (;;) {
        const int n = dims[static_cast<int>(rng.uniform() * 6)];
        const int top = radon_number(n) - 1;
        const int nu = static_cast<int>(rng.uniform() * (top + 1));
        if (recoverable && !prop1_hypotheses(n, nu).both()) continue;
        const double lambda0 = std::round(4.0 * rng.gaussian()) / 2.0;
        std::vector<double> mu;
        const int groups = 1 + static_cast<int>(rng.uniform() * 3);
        std::vector<double> values;
        while (static_cast<int>(values.size()) < groups) {
            const double v = lambda0 + (rng.uniform() < 0.5 ? -1.0 : 1.0) * (1.0 + std::round(6.0 * rng.uniform()));
            if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
        }
        for (int s = 0; s < nu; ++s) mu.push_back(values[static_cast<std::size_t>(s % groups)]);
        return {n, testing::random_system(n, lambda0, mu, seed * 7 + 1)};
    }
}

}  // namespace

TEST_CASE("cluster_spectrum is total and order independent") {
    SeededRng rng(1);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> v;
        const int k = 1 + static_cast<int>(rng.uniform() * 12);
        for (int i = 0; i < k; ++i) v.push_back(std::round(3.0 * rng.gaussian()));
        std::vector<double> a = v, b = v;
        std::sort(a.begin(), a.end());
        std::reverse(b.begin(), b.end());
        std::sort(b.begin(), b.end());
        const auto ca = cluster_spectrum(a), cb = cluster_spectrum(b);
        CHECK(ca == cb);
        int total = 0;
        for (const auto& c : ca) total += c.multiplicity;
        CHECK(total == k);
    }
}

TEST_CASE("numeric_rank is orthogonally invariant") {
    SeededRng rng(2);
    for (int t = 0; t < 50; ++t) {
        const int n = 3 + t % 6;
        const int r = static_cast<int>(rng.uniform() * (n + 1));
        Matrix a = Matrix::Zero(n, n);
        for (int i = 0; i < r; ++i) a += rng.gaussian_vector(n) * rng.gaussian_vector(n).transpose();
        const int base = numeric_rank(a);
        CHECK(base == r);
        CHECK(numeric_rank(rng.orthogonal(n) * a * rng.orthogonal(n)) == base);
    }
}

TEST_CASE("Clifford tensors: symmetries, both Jacobi routes, constant spectrum") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        CAPTURE(seed);
        const auto rc = random_case(seed, false);
        const auto r = curvature_from_clifford(rc.sys);
        CHECK(validate_tensor(r).passed);
        SeededRng rng(seed + 1000);
        std::vector<double> expected(static_cast<std::size_t>(rc.n - 1 - rc.sys.nu()), rc.sys.lambda0);
        expected.insert(expected.end(), rc.sys.mu.begin(), rc.sys.mu.end());
        std::sort(expected.begin(), expected.end());
        for (int t = 0; t < 20; ++t) {
            const Vector x = rng.unit_vector(rc.n);
            const Matrix rx = jacobi(r, x);
            CHECK(max_abs(rx - clifford_jacobi(rc.sys, x)) < 1e-12 * std::max(1.0, r.max_abs()) * 10);
            CHECK(max_abs(rx - rx.transpose()) < 1e-10);
            CHECK(max_abs(rx * x) < 1e-10);
            const Vector ev = restricted_jacobi_eigenvalues(r, x);
            for (int i = 0; i < ev.size(); ++i) CHECK(std::abs(ev(i) - expected[static_cast<std::size_t>(i)]) < 1e-10);
        }
    }
}

TEST_CASE("osserman_check profile equals the Clifford data for any seed") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CAPTURE(seed);
        const auto rc = random_case(seed, false);
        const auto rep = osserman_check(curvature_from_clifford(rc.sys), 40, kClusterRelTol, seed * 31);
        CHECK(rep.is_osserman);
        std::map<double, int> want;
        if (rc.n - 1 - rc.sys.nu() > 0) want[rc.sys.lambda0] += rc.n - 1 - rc.sys.nu();
        for (double m : rc.sys.mu) ++want[m];
        REQUIRE(rep.profile.size() == want.size());
        auto it = want.begin();
        for (const auto& c : rep.profile) {
            CHECK(c.value == doctest::Approx(it->first).epsilon(1e-10));
            CHECK(c.multiplicity == it->second);
            ++it;
        }
        CHECK(rep.m0 + rep.nu == rc.n - 1);
        if (rep.radon_bound_ok) CHECK(rep.nu <= radon_number(rc.n) - 1);
    }
}

TEST_CASE("mixed_jacobi polarization on random tensors") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto rc = random_case(seed + 100, false);
        const auto r = curvature_from_clifford(rc.sys);
        SeededRng rng(seed);
        const Vector x = rng.gaussian_vector(rc.n), y = rng.gaussian_vector(rc.n);
        const double a = rng.gaussian(), b = rng.gaussian();
        const Matrix lhs = jacobi(r, a * x + b * y);
        const Matrix rhs = a * a * jacobi(r, x) + 2 * a * b * mixed_jacobi(r, x, y) + b * b * jacobi(r, y);
        CHECK(max_abs(lhs - rhs) < 1e-10 * std::max(1.0, max_abs(lhs)));
    }
}

TEST_CASE("recovery round trip on random systems") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        CAPTURE(seed);
        const auto rc = random_case(seed + 500, true);
        CAPTURE(rc.n);
        CAPTURE(rc.sys.nu());
        const auto r = curvature_from_clifford(rc.sys);
        RecoveryConfig cfg;
        cfg.seed = seed;
        cfg.samples = 60;
        const auto res = recover_clifford(r, cfg);
        CHECK(res.reconstruction_residual < 1e-8);
        CHECK(validate_clifford(res.system, CliffordTolerance::uniform(1e-8)).passed);
    }
}

TEST_CASE("recovery is rotation covariant") {
    const auto sys = testing::random_system(12, 1.0, {2.0, 2.0, 4.0}, 9);
    const Matrix q = SeededRng(10).orthogonal(12);
    const auto rotated = rotate(sys, q);
    for (const auto& s : {sys, rotated}) {
        const auto res = recover_clifford(curvature_from_clifford(s));
        CHECK(res.reconstruction_residual < 1e-8);
    }
}
