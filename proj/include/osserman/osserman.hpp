#pragma once

// Sampling-based evidence that a curvature tensor is Osserman, the
// duality-principle check, and the classification lookup for tensors with a
// Clifford structure.

#include "osserman/curvature.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace osserman {

enum class Prop2Class { TwoPointHomogeneous, Undetermined };

std::string_view to_string(Prop2Class c) noexcept;

/// Lookup of the known cases in which a manifold with a Cliff(nu)-structure
/// is two-point homogeneous: n not in {2,4,8,16}, or n = 8 and nu < 3, or
/// n = 16 and nu != 8. Performs no geometry.
Prop2Class classify(int n, int nu);

struct Prop1Hypotheses {
    bool n_ge_3nu = false;
    bool n_gt_quarter_sq = false;  // n > (nu + 1)^2 / 4

    bool both() const noexcept { return n_ge_3nu && n_gt_quarter_sq; }
};

Prop1Hypotheses prop1_hypotheses(int n, int nu);

struct OssermanReport {
    bool is_osserman = false;
    SpectrumProfile profile;
    double max_deviation = 0.0;
    int samples_used = 0;
    int m0 = 0;  // largest multiplicity in profile
    int nu = 0;  // n - 1 - m0
    Prop1Hypotheses prop1_hypotheses;
    bool radon_bound_ok = false;
    Prop2Class prop2_class = Prop2Class::Undetermined;
};

/// Samples `samples` seeded uniform unit vectors and compares the sorted
/// Jacobi spectra on X^perp. is_osserman holds when every eigenvalue varies
/// by at most rel_tol * max(1, max|lambda|) across samples. Throws
/// InvalidTensor if R fails validate_tensor, AmbiguousClustering if an
/// Osserman spectrum cannot be clustered at rel_tol.
OssermanReport osserman_check(const CurvatureTensor& r, int samples = 200, double rel_tol = kClusterRelTol,
                              std::uint64_t seed = 0);

struct DualityViolation {
    int sample = 0;
    bool kernel_variant = false;
    double eigenvalue = 0.0;
    double residual = 0.0;
};

struct DualityReport {
    int pairs_tested = 0;
    int kernel_pairs_tested = 0;
    double max_residual = 0.0;
    double max_kernel_residual = 0.0;
    std::vector<DualityViolation> violations;

    bool passed() const noexcept { return violations.empty(); }
};

/// For sampled unit X and a unit eigenvector Y of R_X on X^perp (eigenvalue
/// lambda) checks |R_Y X - lambda X|. The kernel variant shifts R by the
/// dominant eigenvalue and checks X in Ker R_Y for Y = cos(psi) X + sin(psi) Z,
/// Z in Ker R_X, psi away from 0 and pi/2. Residuals are relative to
/// max(1, max|lambda|); violations are recorded, never thrown.
DualityReport duality_check(const CurvatureTensor& r, int samples = 200, double tol = 1e-9,
                            std::uint64_t seed = 0);

/// Index of the cluster with maximal multiplicity, ties broken by smallest
/// absolute value. Sets `tied` when a tie occurred.
std::size_t dominant_cluster(const SpectrumProfile& profile, bool* tied = nullptr);

}  // namespace osserman
