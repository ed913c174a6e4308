#pragma once

// Curvature of the Cayley projective plane on O + O = R^16 and the
// numerical certificate that it carries no Clifford structure.

#include "osserman/curvature.hpp"
#include "osserman/octonion.hpp"

#include <cstdint>
#include <functional>

namespace osserman {

/// Tangent vector (a, b) of the Cayley plane; as a 16-vector a occupies
/// coordinates 0..7 and b coordinates 8..15.
struct CayleyPoint {
    Octonion a;
    Octonion b;

    static CayleyPoint from_vector(const Vector& v);
    Vector to_vector() const;
};

/// Jacobi operator at a unit X (NotUnit otherwise). For Y orthogonal to X:
///   R_X Y = alpha/4 ((4|a|^2 + |b|^2) c + 3 (ab) d*, (4|b|^2 + |a|^2) d + 3 c* (ab)),
/// applied to the X^perp component of Y, so R_X X = 0.
Matrix cayley_jacobi(const CayleyPoint& x, double alpha);

/// Same operator for arbitrary X, extended quadratically (R_{tX} = t^2 R_X).
Matrix cayley_jacobi_any(const Vector& x, double alpha);

/// The Cayley-plane curvature tensor rebuilt from cayley_jacobi_any.
CurvatureTensor cayley_tensor(double alpha);

enum class CayleyEigenspace { Alpha, AlphaQuarter };

/// Linear conditions C(X) with Y in E(X) iff C(X) Y = 0.
///   Alpha:        a d + c b = 0, <a,c> = 0, <b,d> = 0
///   AlphaQuarter: a(|b|^2 d - <b,d> b) = (|a|^2 c - <a,c> a) b, <X,Y> = 0
/// When a or b vanishes the AlphaQuarter equation degenerates; the rows
/// are then taken from the eigenspace of cayley_jacobi directly.
Matrix eigenspace_conditions(CayleyEigenspace which, const CayleyPoint& x);

bool e_alpha_membership(const CayleyPoint& x, const CayleyPoint& y, double tol = 1e-10);
bool e_alpha_quarter_membership(const CayleyPoint& x, const CayleyPoint& y, double tol = 1e-10);

/// Dimension of the space of n x n real matrices J with C(X) J X = 0 for
/// `samples` seeded random unit X, where `conditions(X)` returns C(X).
int constraint_nullspace_dim(int n, const std::function<Matrix(const Vector&)>& conditions, int samples,
                             double tol, std::uint64_t seed);

/// Nullspace dimension of {J : J X in E_which(X) for sampled X}. Zero
/// certifies that no linear operator maps X into the eigenspace.
int obstruction_nullspace(CayleyEigenspace which, int samples = 64, double tol = 1e-8, std::uint64_t seed = 0);

}  // namespace osserman
