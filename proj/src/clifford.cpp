#include "osserman/clifford.hpp"

#include "osserman/errors.hpp"
#include "osserman/octonion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace osserman {

namespace {

Matrix quaternion_left_mul(int k) {
    Quaternion q;
    q[k] = 1.0;
    Matrix m(4, 4);
    for (int col = 0; col < 4; ++col) {
        Quaternion e;
        e[col] = 1.0;
        const Quaternion p = q * e;
        for (int row = 0; row < 4; ++row) m(row, col) = p[row];
    }
    return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Maximal family on R^(2^b), b = 0..3: 0, 1, 3, 7 generators.
std::vector<Matrix> base_family(int b) {
    std::vector<Matrix> out;
    switch (b) {
        case 0: break;
        case 1: {
            Matrix j(2, 2);
            j << 0.0, -1.0, 1.0, 0.0;
            out.push_back(j);
            break;
        }
        case 2:
            for (int k = 1; k <= 3; ++k) out.push_back(quaternion_left_mul(k));
            break;
        case 3:
            for (int k = 1; k <= 7; ++k) out.push_back(octonion_left_mul(k));
            break;
        default: break;
    }
    return out;
}

// Eight anticommuting complex structures A_j on R^16 plus a symmetric
// involution gamma anticommuting with all of them:
//   A_j = [[0, -L_j^t], [L_j, 0]],  L_1 = I, L_{j+1} = left mult by e_j,
//   gamma = diag(I_8, -I_8).
struct SixteenBlock {
    std::vector<Matrix> a;
    Matrix gamma;
};

SixteenBlock sixteen_block() {
    SixteenBlock blk;
    for (int j = 0; j < 8; ++j) {
        const Matrix l = j == 0 ? Matrix::Identity(8, 8) : octonion_left_mul(j);
        Matrix a = Matrix::Zero(16, 16);
        a.block(0, 8, 8, 8) = -l.transpose();
        a.block(8, 0, 8, 8) = l;
        blk.a.push_back(a);
    }
    blk.gamma = Matrix::Identity(16, 16);
    blk.gamma.block(8, 8, 8, 8) *= -1.0;
    return blk;
}

}  // namespace

Matrix octonion_left_mul(int k) {
    if (k < 1 || k > 7) throw Error(ErrorKind::ShapeMismatch, "octonion_left_mul: k must be in 1..7");
    const Octonion e = Octonion::unit(k);
    Matrix m(8, 8);
    for (int col = 0; col < 8; ++col) {
        const Octonion p = oct_mul(e, Octonion::unit(col));
        for (int row = 0; row < 8; ++row) m(row, col) = p[row];
    }
    return m;
}

CliffordSystem make_clifford_system(int n, double lambda0, std::vector<double> mu, std::vector<Matrix> J) {
    if (n < 1) throw Error(ErrorKind::ShapeMismatch, "Clifford system dimension must be positive");
    if (mu.size() != J.size()) {
        std::ostringstream msg;
        msg << "Clifford system has " << mu.size() << " eigenvalues but " << J.size() << " generators";
        throw Error(ErrorKind::ShapeMismatch, msg.str());
    }
    for (const auto& j : J)
        if (j.rows() != n || j.cols() != n) throw Error(ErrorKind::ShapeMismatch, "generator is not n x n");
    for (double m : mu) {
        if (!std::isfinite(m)) throw Error(ErrorKind::NonFinite, "non-finite mu");
        if (m == lambda0) {
            std::ostringstream msg;
            msg << "mu = " << m << " equals lambda0";
            throw Error(ErrorKind::InvalidMu, msg.str());
        }
    }
    return {n, lambda0, std::move(mu), std::move(J)};
}

int radon_number(int n) {
    if (n < 1) throw Error(ErrorKind::ShapeMismatch, "radon_number requires n >= 1");
    int twos = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++twos;
    }
    const int a = twos / 4;
    const int b = twos % 4;
    return (1 << b) + 8 * a;
}

CliffordValidation validate_clifford(const CliffordSystem& c, const CliffordTolerance& tol, int samples,
                                     std::uint64_t seed) {
    if (c.mu.size() != c.J.size()) throw Error(ErrorKind::ShapeMismatch, "mu/J size mismatch");
    for (const auto& j : c.J)
        if (j.rows() != c.n || j.cols() != c.n) throw Error(ErrorKind::ShapeMismatch, "generator is not n x n");

    CliffordValidation v;
    const Matrix id = Matrix::Identity(c.n, c.n);
    const int nu = c.nu();
    for (int s = 0; s < nu; ++s) {
        const Matrix& js = c.J[static_cast<std::size_t>(s)];
        v.skew = std::max(v.skew, (js + js.transpose()).cwiseAbs().maxCoeff());
        v.orthogonal = std::max(v.orthogonal, (js.transpose() * js - id).cwiseAbs().maxCoeff());
        for (int q = s; q < nu; ++q) {
            const Matrix& jq = c.J[static_cast<std::size_t>(q)];
            Matrix h = js * jq + jq * js;
            if (q == s) h += 2.0 * id;
            v.hurwitz = std::max(v.hurwitz, h.cwiseAbs().maxCoeff());
        }
    }
    SeededRng rng(seed);
    for (int t = 0; t < samples && nu > 0; ++t) {
        const Vector x = rng.gaussian_vector(c.n);
        const double nx = x.squaredNorm();
        Matrix images(c.n, nu);
        for (int s = 0; s < nu; ++s) images.col(s) = c.J[static_cast<std::size_t>(s)] * x;
        const Matrix gram = images.transpose() * images - nx * Matrix::Identity(nu, nu);
        v.bilinear = std::max(v.bilinear, gram.cwiseAbs().maxCoeff() / std::max(1.0, nx));
    }
    v.radon_bound_ok = nu <= radon_number(c.n) - 1;
    v.passed = v.radon_bound_ok && v.skew <= tol.skew && v.orthogonal <= tol.orthogonal &&
               v.hurwitz <= tol.hurwitz && v.bilinear <= tol.bilinear;
    return v;
}

std::vector<Matrix> generate_hurwitz_family(int n, int nu) {
    const int rho = radon_number(n);
    if (nu < 0) throw Error(ErrorKind::ShapeMismatch, "nu must be non-negative");
    if (nu > rho - 1) {
        std::ostringstream msg;
        msg << "nu = " << nu << " exceeds rho(" << n << ") - 1 = " << rho - 1;
        throw Error(ErrorKind::ExceedsRadonBound, msg.str());
    }
    int odd = n, twos = 0;
    while (odd % 2 == 0) {
        odd /= 2;
        ++twos;
    }
    std::vector<Matrix> family = base_family(twos % 4);
    int size = 1 << (twos % 4);
    if (twos / 4 > 0) {
        const SixteenBlock blk = sixteen_block();
        for (int step = 0; step < twos / 4; ++step) {
            std::vector<Matrix> lifted;
            const Matrix id = Matrix::Identity(size, size);
            for (const auto& a : blk.a) lifted.push_back(kron(id, a));
            for (const auto& j : family) lifted.push_back(kron(j, blk.gamma));
            family = std::move(lifted);
            size *= 16;
        }
    }
    if (odd > 1) {
        const Matrix id = Matrix::Identity(odd, odd);
        for (auto& j : family) j = kron(id, j);
    }
    family.resize(static_cast<std::size_t>(nu));
    return family;
}

CurvatureTensor curvature_from_clifford(const CliffordSystem& c, const CliffordTolerance& tol) {
    const auto v = validate_clifford(c, tol);
    if (!v.passed) {
        std::ostringstream msg;
        msg << "Clifford system invalid: skew " << v.skew << ", orthogonal " << v.orthogonal << ", hurwitz "
            << v.hurwitz << ", radon bound " << (v.radon_bound_ok ? "ok" : "violated");
        throw Error(ErrorKind::InvalidSystem, msg.str());
    }
    for (double m : c.mu)
        if (m == c.lambda0) throw Error(ErrorKind::InvalidSystem, "mu_s equals lambda0");

    const int n = c.n;
    CurvatureTensor r(n);
    if (n >= 2 && c.lambda0 != 0.0) r = combine(c.lambda0, sphere_tensor(n), 0.0, r);
    // <R(e_i,e_j)e_k, e_l> gains (mu_s - lambda0)/3 (2 J_ji J_lk + J_jk J_li - J_ik J_lj).
    for (int s = 0; s < c.nu(); ++s) {
        const Matrix& j = c.J[static_cast<std::size_t>(s)];
        const double w = (c.mu[static_cast<std::size_t>(s)] - c.lambda0) / 3.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        r(a, b, k, l) += w * (2.0 * j(b, a) * j(l, k) + j(b, k) * j(l, a) - j(a, k) * j(l, b));
    }
    return r;
}

Matrix clifford_jacobi(const CliffordSystem& c, const Vector& x) {
    if (x.size() != c.n) throw Error(ErrorKind::ShapeMismatch, "clifford_jacobi: vector size mismatch");
    for (const auto& j : c.J)
        if (j.rows() != c.n || j.cols() != c.n) throw Error(ErrorKind::ShapeMismatch, "generator is not n x n");
    Matrix out = c.lambda0 * (x.squaredNorm() * Matrix::Identity(c.n, c.n) - x * x.transpose());
    for (int s = 0; s < c.nu(); ++s) {
        const Vector jx = c.J[static_cast<std::size_t>(s)] * x;
        out += (c.mu[static_cast<std::size_t>(s)] - c.lambda0) * jx * jx.transpose();
    }
    return out;
}

CliffordSystem rotate(const CliffordSystem& c, const Matrix& q) {
    CliffordSystem out = c;
    for (auto& j : out.J) j = q * j * q.transpose();
    return out;
}

}  // namespace osserman
