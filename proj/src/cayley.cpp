#include "osserman/cayley.hpp"

#include "osserman/errors.hpp"

#include <cmath>
#include <sstream>

namespace osserman {

namespace {

Octonion half(const Vector& v, int offset) {
    Octonion o;
    for (int i = 0; i < 8; ++i) o[i] = v(offset + i);
    return o;
}

void put(Vector& v, int offset, const Octonion& o) {
    for (int i = 0; i < 8; ++i) v(offset + i) = o[i];
}

// Matrix of a real-linear map R^16 -> R^8 given on basis vectors.
template <typename F>
Matrix linear_rows(F&& f) {
    Matrix m(8, 16);
    for (int k = 0; k < 16; ++k) {
        const Octonion img = f(CayleyPoint::from_vector(Vector::Unit(16, k)));
        for (int r = 0; r < 8; ++r) m(r, k) = img[r];
    }
    return m;
}

Matrix eigenspace_complement_projector(const CayleyPoint& x, double target) {
    const Matrix rx = cayley_jacobi(x, 1.0);
    const auto dec = sym_eigen(rx, 1e-10);
    Matrix p = Matrix::Identity(16, 16);
    for (Eigen::Index i = 0; i < 16; ++i)
        if (std::abs(dec.eigenvalues(i) - target) < 1e-6) p -= dec.eigenvectors.col(i) * dec.eigenvectors.col(i).transpose();
    return p;
}

}  // namespace

CayleyPoint CayleyPoint::from_vector(const Vector& v) {
    if (v.size() != 16) throw Error(ErrorKind::DimensionMismatch, "Cayley point needs 16 coordinates");
    return {half(v, 0), half(v, 8)};
}

Vector CayleyPoint::to_vector() const {
    Vector v(16);
    put(v, 0, a);
    put(v, 8, b);
    return v;
}

Matrix cayley_jacobi_any(const Vector& xv, double alpha) {
    if (xv.size() != 16) throw Error(ErrorKind::DimensionMismatch, "cayley_jacobi: X must have 16 coordinates");
    const double nx = xv.squaredNorm();
    if (nx == 0.0) return Matrix::Zero(16, 16);
    const CayleyPoint x = CayleyPoint::from_vector(xv);
    const double na = x.a.norm_sq(), nb = x.b.norm_sq();
    const Octonion ab = oct_mul(x.a, x.b);

    Matrix formula(16, 16);
    for (int k = 0; k < 16; ++k) {
        const CayleyPoint y = CayleyPoint::from_vector(Vector::Unit(16, k));
        const Octonion first = (4.0 * na + nb) * y.a + 3.0 * oct_mul(ab, oct_conj(y.b));
        const Octonion second = (4.0 * nb + na) * y.b + 3.0 * oct_mul(oct_conj(y.a), ab);
        Vector col(16);
        put(col, 0, first);
        put(col, 8, second);
        formula.col(k) = 0.25 * alpha * col;
    }
    const Matrix proj = Matrix::Identity(16, 16) - xv * xv.transpose() / nx;
    return formula * proj;
}

Matrix cayley_jacobi(const CayleyPoint& x, double alpha) {
    const Vector xv = x.to_vector();
    require_unit(xv);
    return cayley_jacobi_any(xv, alpha);
}

CurvatureTensor cayley_tensor(double alpha) {
    return tensor_from_jacobi(16, [alpha](const Vector& x) { return cayley_jacobi_any(x, alpha); });
}

Matrix eigenspace_conditions(CayleyEigenspace which, const CayleyPoint& x) {
    const Octonion& a = x.a;
    const Octonion& b = x.b;
    if (which == CayleyEigenspace::Alpha) {
        Matrix c(10, 16);
        c.topRows(8) = linear_rows([&](const CayleyPoint& y) { return oct_mul(a, y.b) + oct_mul(y.a, b); });
        c.row(8).setZero();
        c.row(9).setZero();
        for (int i = 0; i < 8; ++i) {
            c(8, i) = a[i];
            c(9, 8 + i) = b[i];
        }
        return c;
    }
    const double na = a.norm_sq(), nb = b.norm_sq();
    Matrix c(9, 16);
    c.topRows(8) = linear_rows([&](const CayleyPoint& y) {
        const Octonion lhs = oct_mul(a, nb * y.b - oct_dot(b, y.b) * b);
        const Octonion rhs = oct_mul(na * y.a - oct_dot(a, y.a) * a, b);
        return lhs - rhs;
    });
    c.row(8) = x.to_vector().transpose();
    if (numeric_rank(c, 1e-8) == 8) return c;
    return eigenspace_complement_projector(x, 0.25);
}

bool e_alpha_membership(const CayleyPoint& x, const CayleyPoint& y, double tol) {
    require_unit(x.to_vector());
    const Octonion lhs = oct_mul(x.a, y.b) + oct_mul(y.a, x.b);
    return lhs.norm() <= tol && std::abs(oct_dot(x.a, y.a)) <= tol && std::abs(oct_dot(x.b, y.b)) <= tol;
}

bool e_alpha_quarter_membership(const CayleyPoint& x, const CayleyPoint& y, double tol) {
    require_unit(x.to_vector());
    const Matrix c = eigenspace_conditions(CayleyEigenspace::AlphaQuarter, x);
    return (c * y.to_vector()).cwiseAbs().maxCoeff() <= tol;
}

int constraint_nullspace_dim(int n, const std::function<Matrix(const Vector&)>& conditions, int samples,
                             double tol, std::uint64_t seed) {
    SeededRng rng(seed);
    std::vector<Matrix> blocks;
    Eigen::Index rows = 0;
    for (int t = 0; t < samples; ++t) {
        const Vector x = rng.unit_vector(n);
        const Matrix c = conditions(x);
        // (J X)_i = sum_k J(i,k) x_k; unknowns ordered column-major, vec index k*n + i.
        Matrix block(c.rows(), n * n);
        for (int k = 0; k < n; ++k) block.middleCols(k * n, n) = x(k) * c;
        rows += block.rows();
        blocks.push_back(std::move(block));
    }
    Matrix system(rows, n * n);
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
        system.middleRows(at, b.rows()) = b;
        at += b.rows();
    }
    return n * n - numeric_rank(system, tol);
}

int obstruction_nullspace(CayleyEigenspace which, int samples, double tol, std::uint64_t seed) {
    return constraint_nullspace_dim(
        16, [which](const Vector& x) { return eigenspace_conditions(which, CayleyPoint::from_vector(x)); }, samples,
        tol, seed);
}

}  // namespace osserman
