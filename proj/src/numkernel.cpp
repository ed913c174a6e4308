#include "osserman/numkernel.hpp"

#include "osserman/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace osserman {

namespace {

void require_finite(const Matrix& a) {
    if (!a.allFinite()) throw Error(ErrorKind::NonFinite, "matrix has NaN or Inf entries");
}

}  // namespace

SpectralDecomposition sym_eigen(const Matrix& a, double sym_tol) {
    require_finite(a);
    if (a.rows() != a.cols()) throw Error(ErrorKind::ShapeMismatch, "sym_eigen: matrix is not square");
    const double asym = a.rows() == 0 ? 0.0 : (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > sym_tol) {
        std::ostringstream msg;
        msg << "sym_eigen: symmetry residual " << asym << " exceeds " << sym_tol;
        throw Error(ErrorKind::NonSymmetric, msg.str());
    }
    // Solve on the exact symmetrization; Eigen reads only the lower triangle.
    const Matrix sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::NonFinite, "sym_eigen: eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

ClusteredSpectrum cluster_spectrum(std::span<const double> eigenvalues, double rel_tol) {
    ClusteredSpectrum out;
    if (eigenvalues.empty()) return out;
    double scale = 0.0;
    for (double v : eigenvalues) {
        if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "cluster_spectrum: non-finite eigenvalue");
        scale = std::max(scale, std::abs(v));
    }
    if (scale == 0.0) scale = 1.0;
    const double join = rel_tol * scale;

    std::vector<std::vector<double>> groups{{eigenvalues[0]}};
    for (std::size_t i = 1; i < eigenvalues.size(); ++i) {
        const double gap = eigenvalues[i] - eigenvalues[i - 1];
        if (gap < -join) throw Error(ErrorKind::AmbiguousClustering, "cluster_spectrum: input not ascending");
        if (gap <= join) {
            groups.back().push_back(eigenvalues[i]);
            continue;
        }
        if (gap < 10.0 * join) {
            std::ostringstream msg;
            msg << "cluster_spectrum: eigenvalues " << eigenvalues[i - 1] << " and " << eigenvalues[i]
                << " are neither clearly equal nor clearly separated at rel_tol " << rel_tol;
            throw Error(ErrorKind::AmbiguousClustering, msg.str());
        }
        groups.push_back({eigenvalues[i]});
    }
    for (const auto& g : groups) {
        double sum = 0.0;
        for (double v : g) sum += v;
        out.push_back({sum / static_cast<double>(g.size()), static_cast<int>(g.size())});
    }
    return out;
}

int numeric_rank(const Matrix& a, double tol) {
    require_finite(a);
    if (a.size() == 0) return 0;
    Eigen::BDCSVD<Matrix> svd(a);
    const Vector& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol * s(0)) ++rank;
    return rank;
}

Matrix image_basis(const Matrix& sym, double tol) {
    const auto dec = sym_eigen(sym, 1e-9 * std::max(1.0, sym.cwiseAbs().maxCoeff()));
    const double top = dec.eigenvalues.size() ? dec.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i)
        if (top > 0.0 && std::abs(dec.eigenvalues(i)) > tol * top) keep.push_back(i);
    Matrix basis(sym.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k)
        basis.col(static_cast<Eigen::Index>(k)) = dec.eigenvectors.col(keep[k]);
    return basis;
}

int image_sum_dim(std::span<const Matrix> ops, double tol) {
    if (ops.empty()) return 0;
    const Eigen::Index n = ops.front().rows();
    std::vector<Matrix> bases;
    Eigen::Index cols = 0;
    for (const auto& op : ops) {
        if (op.rows() != n || op.cols() != n)
            throw Error(ErrorKind::DimensionMismatch, "image_sum_dim: operators differ in size");
        bases.push_back(image_basis(op, tol));
        cols += bases.back().cols();
    }
    if (cols == 0) return 0;
    Matrix stacked(n, cols);
    Eigen::Index at = 0;
    for (const auto& b : bases) {
        stacked.middleCols(at, b.cols()) = b;
        at += b.cols();
    }
    return numeric_rank(stacked, tol);
}

Matrix orthogonal_complement(const Vector& unit) {
    const Eigen::Index n = unit.size();
    // Householder reflection H with H e_0 = unit; remaining columns span unit^perp.
    Vector v = unit;
    const double sign = unit(0) >= 0.0 ? 1.0 : -1.0;
    v(0) += sign * unit.norm();
    Matrix h = Matrix::Identity(n, n);
    const double vv = v.squaredNorm();
    if (vv > 0.0) h -= (2.0 / vv) * v * v.transpose();
    return h.rightCols(n - 1);
}

Matrix nullspace(const Matrix& a, double tol) {
    require_finite(a);
    const Eigen::Index cols = a.cols();
    if (a.rows() == 0) return Matrix::Identity(cols, cols);
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    const double top = s.size() ? s(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (top > 0.0 && s(i) > tol * top) ++rank;
    return svd.matrixV().rightCols(cols - rank);
}

double subspace_distance(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols() || a.rows() != b.rows()) return 1.0;
    if (a.cols() == 0) return 0.0;
    const Matrix residual = b - a * (a.transpose() * b);
    Eigen::JacobiSVD<Matrix> svd(residual);
    return std::min(1.0, svd.singularValues()(0));
}

double SeededRng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

Vector SeededRng::gaussian_vector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = gaussian();
    return v;
}

Vector SeededRng::unit_vector(int n) {
    Vector v = gaussian_vector(n);
    double norm = v.norm();
    while (norm < 1e-12) {
        v = gaussian_vector(n);
        norm = v.norm();
    }
    return v / norm;
}

Matrix SeededRng::orthogonal(int n) {
    Matrix g(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) g(i, j) = gaussian();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

}  // namespace osserman
