#pragma once

#include "osserman/numkernel.hpp"

#include <functional>
#include <vector>

namespace osserman {

/// Clustered Jacobi eigenvalues on X^perp: (value, multiplicity) pairs,
/// ascending by value, multiplicities summing to n - 1.
using SpectrumProfile = ClusteredSpectrum;

inline constexpr double kTensorSymmetryTol = 1e-10;

/// Algebraic curvature tensor stored as the full (4,0) array:
/// comp(i,j,k,l) = <R(e_i, e_j) e_k, e_l>, row-major in (i,j,k,l).
class CurvatureTensor {
public:
    CurvatureTensor() = default;
    explicit CurvatureTensor(int n);  // zero tensor
    CurvatureTensor(int n, std::vector<double> comps);

    int dim() const noexcept { return n_; }
    const std::vector<double>& comps() const noexcept { return comps_; }

    double operator()(int i, int j, int k, int l) const noexcept { return comps_[index(i, j, k, l)]; }
    double& operator()(int i, int j, int k, int l) noexcept { return comps_[index(i, j, k, l)]; }

    double max_abs() const noexcept;

private:
    std::size_t index(int i, int j, int k, int l) const noexcept {
        const auto n = static_cast<std::size_t>(n_);
        return ((static_cast<std::size_t>(i) * n + j) * n + k) * n + l;
    }

    int n_ = 0;
    std::vector<double> comps_;
};

struct TensorValidation {
    double antisym_first = 0.0;   // R(i,j,k,l) + R(j,i,k,l)
    double antisym_second = 0.0;  // R(i,j,k,l) + R(i,j,l,k)
    double pair_exchange = 0.0;   // R(i,j,k,l) - R(k,l,i,j)
    double bianchi = 0.0;         // R(i,j,k,l) + R(j,k,i,l) + R(k,i,j,l)
    bool passed = false;

    double worst() const noexcept;
};

TensorValidation validate_tensor(const CurvatureTensor& r, double tol = kTensorSymmetryTol);

/// R(X, Y) Z.
Vector curvature_action(const CurvatureTensor& r, const Vector& x, const Vector& y, const Vector& z);

/// Jacobi operator R_X Y = R(X, Y) X as a symmetric n x n matrix.
Matrix jacobi(const CurvatureTensor& r, const Vector& x);

/// R_{XY} Z = (R(X, Z) Y + R(Y, Z) X) / 2.
Matrix mixed_jacobi(const CurvatureTensor& r, const Vector& x, const Vector& y);

/// Curvature tensor of the unit sphere, R(X,Y)Z = <X,Z>Y - <Y,Z>X.
CurvatureTensor sphere_tensor(int n);

CurvatureTensor combine(double a, const CurvatureTensor& r1, double b, const CurvatureTensor& r2);

/// Ascending eigenvalues of R_X restricted to X^perp (n - 1 values).
Vector restricted_jacobi_eigenvalues(const CurvatureTensor& r, const Vector& unit_x);

SpectrumProfile jacobi_spectrum(const CurvatureTensor& r, const Vector& unit_x,
                                double rel_tol = kClusterRelTol);

/// Rebuilds the (4,0) tensor from a quadratic Jacobi map X -> R_X by
/// polarization and the first Bianchi identity:
///   R(i,j,k,l) = 2/3 ( <R_{e_i e_k} e_j, e_l> - <R_{e_j e_k} e_i, e_l> ).
/// The map must be defined for arbitrary (non-unit) X.
CurvatureTensor tensor_from_jacobi(int n, const std::function<Matrix(const Vector&)>& jacobi_map);

void require_unit(const Vector& x, double tol = 1e-12);

}  // namespace osserman
