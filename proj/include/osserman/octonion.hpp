#pragma once

#include <array>
#include <cmath>
#include <ostream>

namespace osserman {

/// Quaternion w + x i + y j + z k.
struct Quaternion {
    std::array<double, 4> c{};

    constexpr double& operator[](int i) noexcept { return c[static_cast<std::size_t>(i)]; }
    constexpr double operator[](int i) const noexcept { return c[static_cast<std::size_t>(i)]; }

    constexpr Quaternion conj() const noexcept { return {{c[0], -c[1], -c[2], -c[3]}}; }

    friend constexpr Quaternion operator+(const Quaternion& a, const Quaternion& b) noexcept {
        return {{a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2], a.c[3] + b.c[3]}};
    }
    friend constexpr Quaternion operator-(const Quaternion& a, const Quaternion& b) noexcept {
        return {{a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2], a.c[3] - b.c[3]}};
    }
    friend constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) noexcept {
        return {{a.c[0] * b.c[0] - a.c[1] * b.c[1] - a.c[2] * b.c[2] - a.c[3] * b.c[3],
                 a.c[0] * b.c[1] + a.c[1] * b.c[0] + a.c[2] * b.c[3] - a.c[3] * b.c[2],
                 a.c[0] * b.c[2] - a.c[1] * b.c[3] + a.c[2] * b.c[0] + a.c[3] * b.c[1],
                 a.c[0] * b.c[3] + a.c[1] * b.c[2] - a.c[2] * b.c[1] + a.c[3] * b.c[0]}};
    }
};

/// Octonion with coefficients on the basis 1, e1..e7. Coefficients 0..3
/// and 4..7 are the two quaternion halves of the Cayley-Dickson pair.
struct Octonion {
    std::array<double, 8> c{};

    static constexpr Octonion unit(int k) noexcept {
        Octonion o;
        o.c[static_cast<std::size_t>(k)] = 1.0;
        return o;
    }
    static constexpr Octonion from_halves(const Quaternion& p, const Quaternion& q) noexcept {
        return {{p.c[0], p.c[1], p.c[2], p.c[3], q.c[0], q.c[1], q.c[2], q.c[3]}};
    }

    constexpr double& operator[](int i) noexcept { return c[static_cast<std::size_t>(i)]; }
    constexpr double operator[](int i) const noexcept { return c[static_cast<std::size_t>(i)]; }

    constexpr Quaternion low() const noexcept { return {{c[0], c[1], c[2], c[3]}}; }
    constexpr Quaternion high() const noexcept { return {{c[4], c[5], c[6], c[7]}}; }

    double norm_sq() const noexcept {
        double s = 0.0;
        for (double v : c) s += v * v;
        return s;
    }
    double norm() const noexcept { return std::sqrt(norm_sq()); }

    friend constexpr Octonion operator+(Octonion a, const Octonion& b) noexcept {
        for (std::size_t i = 0; i < 8; ++i) a.c[i] += b.c[i];
        return a;
    }
    friend constexpr Octonion operator-(Octonion a, const Octonion& b) noexcept {
        for (std::size_t i = 0; i < 8; ++i) a.c[i] -= b.c[i];
        return a;
    }
    friend constexpr Octonion operator*(double s, Octonion a) noexcept {
        for (double& v : a.c) v *= s;
        return a;
    }
    friend bool operator==(const Octonion&, const Octonion&) = default;
};

/// Cayley-Dickson product (a,b)(c,d) = (ac - d*b, da + bc*).
constexpr Octonion oct_mul(const Octonion& x, const Octonion& y) noexcept {
    const Quaternion a = x.low(), b = x.high(), c = y.low(), d = y.high();
    return Octonion::from_halves(a * c - d.conj() * b, d * a + b * c.conj());
}

constexpr Octonion oct_conj(Octonion a) noexcept {
    for (std::size_t i = 1; i < 8; ++i) a.c[i] = -a.c[i];
    return a;
}

/// Real inner product <a,b> = Re(a b*) = coefficient dot product.
constexpr double oct_dot(const Octonion& a, const Octonion& b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < 8; ++i) s += a.c[i] * b.c[i];
    return s;
}

inline std::ostream& operator<<(std::ostream& os, const Octonion& o) {
    os << '(';
    for (std::size_t i = 0; i < 8; ++i) os << (i ? ", " : "") << o.c[i];
    return os << ')';
}

}  // namespace osserman
