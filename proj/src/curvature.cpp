#include "osserman/curvature.hpp"

#include "osserman/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace osserman {

namespace {

void require_dim(const CurvatureTensor& r, const Vector& v, const char* what) {
    if (v.size() != r.dim()) {
        std::ostringstream msg;
        msg << what << ": vector of size " << v.size() << " for tensor of dimension " << r.dim();
        throw Error(ErrorKind::DimensionMismatch, msg.str());
    }
}

}  // namespace

CurvatureTensor::CurvatureTensor(int n) : n_(n) {
    if (n < 1) throw Error(ErrorKind::ShapeMismatch, "curvature tensor dimension must be positive");
    const auto sz = static_cast<std::size_t>(n);
    comps_.assign(sz * sz * sz * sz, 0.0);
}

CurvatureTensor::CurvatureTensor(int n, std::vector<double> comps) : n_(n), comps_(std::move(comps)) {
    if (n < 1) throw Error(ErrorKind::ShapeMismatch, "curvature tensor dimension must be positive");
    const auto sz = static_cast<std::size_t>(n);
    if (comps_.size() != sz * sz * sz * sz) {
        std::ostringstream msg;
        msg << "expected " << sz * sz * sz * sz << " components for n = " << n << ", got " << comps_.size();
        throw Error(ErrorKind::ShapeMismatch, msg.str());
    }
}

double CurvatureTensor::max_abs() const noexcept {
    double m = 0.0;
    for (double c : comps_) m = std::max(m, std::abs(c));
    return m;
}

double TensorValidation::worst() const noexcept {
    return std::max({antisym_first, antisym_second, pair_exchange, bianchi});
}

TensorValidation validate_tensor(const CurvatureTensor& r, double tol) {
    TensorValidation v;
    const int n = r.dim();
    for (double c : r.comps())
        if (!std::isfinite(c)) throw Error(ErrorKind::NonFinite, "tensor has non-finite components");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const double c = r(i, j, k, l);
                    v.antisym_first = std::max(v.antisym_first, std::abs(c + r(j, i, k, l)));
                    v.antisym_second = std::max(v.antisym_second, std::abs(c + r(i, j, l, k)));
                    v.pair_exchange = std::max(v.pair_exchange, std::abs(c - r(k, l, i, j)));
                    v.bianchi = std::max(v.bianchi, std::abs(c + r(j, k, i, l) + r(k, i, j, l)));
                }
    v.passed = v.worst() <= tol;
    return v;
}

Vector curvature_action(const CurvatureTensor& r, const Vector& x, const Vector& y, const Vector& z) {
    require_dim(r, x, "curvature_action");
    require_dim(r, y, "curvature_action");
    require_dim(r, z, "curvature_action");
    const int n = r.dim();
    Vector out = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
        if (x(i) == 0.0) continue;
        for (int j = 0; j < n; ++j) {
            const double xy = x(i) * y(j);
            if (xy == 0.0) continue;
            for (int k = 0; k < n; ++k) {
                const double w = xy * z(k);
                if (w == 0.0) continue;
                for (int m = 0; m < n; ++m) out(m) += w * r(i, j, k, m);
            }
        }
    }
    return out;
}

Matrix mixed_jacobi(const CurvatureTensor& r, const Vector& x, const Vector& y) {
    require_dim(r, x, "mixed_jacobi");
    require_dim(r, y, "mixed_jacobi");
    const int n = r.dim();
    // (R_{XY})_{m j} = 1/2 sum_{i,k} (x_i y_k + y_i x_k) R(i, j, k, m)
    Matrix weights = 0.5 * (x * y.transpose() + y * x.transpose());
    Matrix out = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double w = weights(i, k);
            if (w == 0.0) continue;
            for (int j = 0; j < n; ++j)
                for (int m = 0; m < n; ++m) out(m, j) += w * r(i, j, k, m);
        }
    return out;
}

Matrix jacobi(const CurvatureTensor& r, const Vector& x) {
    require_dim(r, x, "jacobi");
    return mixed_jacobi(r, x, x);
}

CurvatureTensor sphere_tensor(int n) {
    if (n < 2) throw Error(ErrorKind::ShapeMismatch, "sphere_tensor requires n >= 2");
    CurvatureTensor r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            r(i, j, i, j) = 1.0;
            r(i, j, j, i) = -1.0;
        }
    return r;
}

CurvatureTensor combine(double a, const CurvatureTensor& r1, double b, const CurvatureTensor& r2) {
    if (r1.dim() != r2.dim()) throw Error(ErrorKind::DimensionMismatch, "combine: tensors differ in dimension");
    std::vector<double> out(r1.comps().size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * r1.comps()[i] + b * r2.comps()[i];
    return CurvatureTensor(r1.dim(), std::move(out));
}

void require_unit(const Vector& x, double tol) {
    const double norm = x.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > tol) {
        std::ostringstream msg;
        msg << "vector norm " << norm << " is not 1 within " << tol;
        throw Error(ErrorKind::NotUnit, msg.str());
    }
}

Vector restricted_jacobi_eigenvalues(const CurvatureTensor& r, const Vector& unit_x) {
    require_dim(r, unit_x, "jacobi_spectrum");
    require_unit(unit_x);
    const Matrix basis = orthogonal_complement(unit_x);
    const Matrix rx = jacobi(r, unit_x);
    const Matrix restricted = basis.transpose() * rx * basis;
    const double scale = std::max(1.0, restricted.cwiseAbs().maxCoeff());
    return sym_eigen(restricted, 1e-10 * scale).eigenvalues;
}

SpectrumProfile jacobi_spectrum(const CurvatureTensor& r, const Vector& unit_x, double rel_tol) {
    const Vector ev = restricted_jacobi_eigenvalues(r, unit_x);
    return cluster_spectrum(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())), rel_tol);
}

CurvatureTensor tensor_from_jacobi(int n, const std::function<Matrix(const Vector&)>& jacobi_map) {
    std::vector<Matrix> diag(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = jacobi_map(Vector::Unit(n, i));
    // mixed[i][k] = R_{e_i e_k} = (R_{e_i + e_k} - R_{e_i} - R_{e_k}) / 2
    std::vector<std::vector<Matrix>> mixed(static_cast<std::size_t>(n), std::vector<Matrix>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i) {
        mixed[i][i] = diag[i];
        for (int k = i + 1; k < n; ++k) {
            const Vector sum = Vector::Unit(n, i) + Vector::Unit(n, k);
            mixed[i][k] = 0.5 * (jacobi_map(sum) - diag[i] - diag[k]);
            mixed[k][i] = mixed[i][k];
        }
    }
    CurvatureTensor r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    r(i, j, k, l) = (2.0 / 3.0) * (mixed[i][k](l, j) - mixed[j][k](l, i));
    return r;
}

}  // namespace osserman
