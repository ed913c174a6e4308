#pragma once

#include "osserman/curvature.hpp"
#include "osserman/numkernel.hpp"

#include <cstdint>
#include <vector>

namespace osserman {

/// Data of a Cliff(nu)-structure: R_X Y = lambda0 (|X|^2 Y - <Y,X> X)
///   + sum_s (mu_s - lambda0) <J_s X, Y> J_s X.
/// mu is stored per generator, so repeated eigenvalues appear repeatedly.
struct CliffordSystem {
    int n = 0;
    double lambda0 = 0.0;
    std::vector<double> mu;
    std::vector<Matrix> J;

    int nu() const noexcept { return static_cast<int>(J.size()); }
};

/// Builds a system after checking shapes and mu_s != lambda0
/// (ShapeMismatch, InvalidMu).
CliffordSystem make_clifford_system(int n, double lambda0, std::vector<double> mu, std::vector<Matrix> J);

struct CliffordTolerance {
    double skew = 1e-12;
    double orthogonal = 1e-10;
    double hurwitz = 1e-10;
    double bilinear = 1e-10;

    static CliffordTolerance uniform(double t) noexcept { return {t, t, t, t}; }
};

struct CliffordValidation {
    double skew = 0.0;        // max_s |J_s + J_s^t|
    double orthogonal = 0.0;  // max_s |J_s^t J_s - I|
    double hurwitz = 0.0;     // max_{s,q} |J_s J_q + J_q J_s + 2 delta_sq I|
    double bilinear = 0.0;    // max over sampled X of |<J_s X, J_q X> - delta_sq |X|^2|
    bool radon_bound_ok = true;
    bool passed = false;
};

/// rho(n) = 2^b + 8a for n = 2^(4a+b) c, c odd, 0 <= b <= 3.
int radon_number(int n);

CliffordValidation validate_clifford(const CliffordSystem& c,
                                     const CliffordTolerance& tol = {},
                                     int samples = 16, std::uint64_t seed = 0);

/// nu anticommuting skew-symmetric orthogonal n x n matrices. Base families
/// on R^2, R^4, R^8 (complex, quaternion, octonion left multiplication),
/// lifted along factors of 16 and replicated block-diagonally over the odd
/// part of n. Throws ExceedsRadonBound for nu > rho(n) - 1.
std::vector<Matrix> generate_hurwitz_family(int n, int nu);

/// Left multiplication by the imaginary octonion unit e_k (k = 1..7).
Matrix octonion_left_mul(int k);

/// Curvature tensor of the system. Throws InvalidSystem when the system fails
/// validate_clifford at `tol`.
CurvatureTensor curvature_from_clifford(const CliffordSystem& c,
                                        const CliffordTolerance& tol = {});

/// Jacobi operator of the system at X, evaluated directly.
Matrix clifford_jacobi(const CliffordSystem& c, const Vector& x);

/// Q J_s Q^t for every generator; the result is again a Clifford system.
CliffordSystem rotate(const CliffordSystem& c, const Matrix& q);

}  // namespace osserman
