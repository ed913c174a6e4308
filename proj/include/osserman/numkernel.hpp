#pragma once

// Dense symmetric spectral kernel, rank utilities and the seeded sampler
// shared by every other module.

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace osserman {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kClusterRelTol = 1e-9;
inline constexpr double kRankRelTol = 1e-8;
inline constexpr double kSymmetryTol = 1e-12;

struct SpectralDecomposition {
    Vector eigenvalues;   // ascending
    Matrix eigenvectors;  // orthonormal columns, column i pairs with eigenvalues[i]
};

/// One cluster of a spectrum: representative value and how many
/// eigenvalues (with multiplicity) fell into it.
struct EigenCluster {
    double value = 0.0;
    int multiplicity = 0;

    friend bool operator==(const EigenCluster&, const EigenCluster&) = default;
};

using ClusteredSpectrum = std::vector<EigenCluster>;

/// Full eigendecomposition of a symmetric matrix. Throws NonFinite or
/// NonSymmetric (absolute residual above `sym_tol`).
SpectralDecomposition sym_eigen(const Matrix& a, double sym_tol = kSymmetryTol);

/// Gap-based clustering of an ascending eigenvalue list. Neighbours closer
/// than rel_tol*scale merge; clusters closer than 10*rel_tol*scale are
/// rejected as AmbiguousClustering. scale = max |value| (1 if all zero).
ClusteredSpectrum cluster_spectrum(std::span<const double> eigenvalues,
                                   double rel_tol = kClusterRelTol);

/// Number of singular values above tol * sigma_max.
int numeric_rank(const Matrix& a, double tol = kRankRelTol);

/// Orthonormal basis of Im(A) for symmetric A (eigenvectors with
/// |lambda| > tol * max|lambda|).
Matrix image_basis(const Matrix& sym, double tol = kRankRelTol);

/// dim(Im op_1 + ... + Im op_k) for symmetric operators of equal size.
int image_sum_dim(std::span<const Matrix> ops, double tol = kRankRelTol);

/// Orthonormal basis (n x (n-1)) of the complement of a unit vector.
Matrix orthogonal_complement(const Vector& unit);

/// Orthonormal basis of the right nullspace of A, by SVD with a relative cut.
Matrix nullspace(const Matrix& a, double tol = kRankRelTol);

/// sin of the largest principal angle between the column spans of two
/// matrices with orthonormal columns; 1 if dimensions differ.
double subspace_distance(const Matrix& a, const Matrix& b);

/// Reproducible sampler: mt19937_64 with explicit bit-to-double conversion
/// and Box-Muller, so output does not depend on the standard library's
/// distribution implementations.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    double uniform();  // [0, 1)
    double gaussian();
    Vector gaussian_vector(int n);
    Vector unit_vector(int n);
    /// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
    Matrix orthogonal(int n);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace osserman
