#pragma once

// Helpers shared by the test binaries. Oracles here are written from the
// defining formulas and deliberately avoid the library's index-level code.

#include "osserman/clifford.hpp"
#include "osserman/curvature.hpp"
#include "osserman/numkernel.hpp"

#include <vector>

namespace osserman::testing {

/// Clifford system with generate_hurwitz_family generators conjugated by a
/// seeded rotation, so the structure is not aligned with the coordinates.
inline CliffordSystem random_system(int n, double lambda0, std::vector<double> mu, std::uint64_t seed) {
    const int nu = static_cast<int>(mu.size());
    SeededRng rng(seed);
    return rotate(make_clifford_system(n, lambda0, std::move(mu), generate_hurwitz_family(n, nu)), rng.orthogonal(n));
}

/// R(X,Y)Z = l0 (<X,Z>Y - <Y,Z>X)
///         + sum (mu_s - l0)/3 (2<J X,Y> J Z + <J X,Z> J Y - <J Y,Z> J X).
inline Vector clifford_action(const CliffordSystem& c, const Vector& x, const Vector& y, const Vector& z) {
    Vector out = c.lambda0 * (x.dot(z) * y - y.dot(z) * x);
    for (int s = 0; s < c.nu(); ++s) {
        const Matrix& j = c.J[static_cast<std::size_t>(s)];
        const double w = (c.mu[static_cast<std::size_t>(s)] - c.lambda0) / 3.0;
        out += w * (2.0 * (j * x).dot(y) * (j * z) + (j * x).dot(z) * (j * y) - (j * y).dot(z) * (j * x));
    }
    return out;
}

/// c1 * sphere on the first k coordinates plus c2 * sphere on the rest.
inline CurvatureTensor block_sphere(int k, int m, double c1, double c2) {
    const int n = k + m;
    CurvatureTensor r(n);
    auto fill = [&](int lo, int hi, double c) {
        for (int i = lo; i < hi; ++i)
            for (int j = lo; j < hi; ++j)
                for (int a = lo; a < hi; ++a)
                    for (int b = lo; b < hi; ++b)
                        r(i, j, a, b) = c * ((i == a && j == b ? 1.0 : 0.0) - (j == a && i == b ? 1.0 : 0.0));
    };
    fill(0, k, c1);
    fill(k, n, c2);
    return r;
}

inline double max_abs_diff(const CurvatureTensor& a, const CurvatureTensor& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.comps().size(); ++i) d = std::max(d, std::abs(a.comps()[i] - b.comps()[i]));
    return d;
}

inline Matrix random_symmetric(SeededRng& rng, int n) {
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.gaussian();
    return 0.5 * (a + a.transpose());
}

}  // namespace osserman::testing
