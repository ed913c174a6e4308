#pragma once

// Recovery of a Clifford structure from an Osserman tensor.
//
// The pipeline shifts the tensor so that the dominant Jacobi eigenvalue
// becomes 0, factors every Jacobi operator as R_X = M_X Lambda M_X^t with a
// map X -> M_X that is linear in X, and then repeatedly extracts the
// generators belonging to one eigenvalue (chosen by the min 1/lambda rule)
// from the quadratic map Phi(X) = M_X^t M_X, peeling them off the tensor
// until nothing is left.

#include "osserman/clifford.hpp"
#include "osserman/curvature.hpp"
#include "osserman/osserman.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace osserman {

/// Diagonal operator Lambda = diag(mu_1..mu_nu): the nonzero shifted
/// eigenvalues repeated by multiplicity, grouped contiguously in ascending
/// order of value.
class LambdaOp {
public:
    struct Group {
        double value = 0.0;
        int offset = 0;
        int size = 0;
    };

    LambdaOp() = default;
    explicit LambdaOp(const SpectrumProfile& nonzero_groups);

    int nu() const noexcept { return static_cast<int>(mu_.size()); }
    const std::vector<double>& mu() const noexcept { return mu_; }
    const std::vector<Group>& groups() const noexcept { return groups_; }
    Matrix matrix() const;
    Matrix inverse() const;
    double scale() const noexcept;

    /// Copy with one group removed.
    LambdaOp without_group(std::size_t g) const;

private:
    std::vector<double> mu_;
    std::vector<Group> groups_;
};

struct RecoveryConfig {
    int samples = 200;             // osserman_check samples
    double rel_tol = kClusterRelTol;
    std::uint64_t seed = 0;
    bool force = false;            // run even if the size hypotheses fail
    bool break_ties = true;        // otherwise TieBreakNeeded on equal maximal multiplicities
    double factor_tol = 1e-9;
    double frame_tol = 1e-8;
    double angle_tol = 1e-9;
    double rank_tol = kRankRelTol;
    double reconstruction_tol = 1e-8;
    int redraw_budget = 50;
    int frame_check_samples = 100;
    int subspace_samples = 50;
    int attempts = 3;
};

struct NormalizedTensor {
    CurvatureTensor tensor;  // R - shift * R^1
    double shift = 0.0;
    LambdaOp lambda;
    bool tie_broken = false;
};

/// Shifts by the eigenvalue of maximal multiplicity. Ties are broken by the
/// smallest absolute value unless break_ties is false (TieBreakNeeded).
NormalizedTensor normalize(const CurvatureTensor& r, const SpectrumProfile& profile, bool break_ties = true);

/// M_X (n x nu) with orthonormal columns, R_X = M_X Lambda M_X^t, columns in
/// Lambda's group order. SpectrumMismatch if the spectrum of R_X at unit X
/// is not {0} plus Lambda's entries.
Matrix factor_jacobi(const CurvatureTensor& rn, const Vector& x, const LambdaOp& lambda, double tol = 1e-9);

/// Im R_X and Im R_Y intersect trivially (X, Y orthonormal).
bool generic_pair(const CurvatureTensor& rn, const Vector& x, const Vector& y, int nu, double tol = kRankRelTol);

/// dim(Im R_X + Im R_Y + Im R_Z) = 3 nu (X, Y, Z orthonormal).
bool generic_triple(const CurvatureTensor& rn, const Vector& x, const Vector& y, const Vector& z, int nu,
                    double tol = kRankRelTol);

/// The unique M2 = F2 N (F2 a factor of R_{E2}, N in O_Lambda) with
/// M1 Lambda M2^t + M2 Lambda M1^t = 2 R_{E1 E2}. The gauge N comes from the
/// linear cross-term system followed by Gauss-Newton steps on the joint
/// residual including N Lambda N^t = Lambda. AlignmentFailed otherwise.
Matrix align_pair(const Matrix& m1, const CurvatureTensor& rn, const Vector& e1, const Vector& e2,
                  const LambdaOp& lambda, double tol = 1e-8);

/// Same, with a precomputed factor F2 of R_{E2}.
Matrix align_pair(const Matrix& m1, const Matrix& f2, const CurvatureTensor& rn, const Vector& e1,
                  const Vector& e2, const LambdaOp& lambda, double tol = 1e-8);

struct FrameDiagnostics {
    int redraws = 0;
    bool triples_checked = false;
    double max_alignment_residual = 0.0;
    double max_pair_residual = 0.0;     // i, j >= 2 cross terms
    double max_sample_residual = 0.0;   // R_X vs M_X Lambda M_X^t on random X
    double max_orthonormality = 0.0;    // M_i^t M_i - I
};

/// Linear map X -> M_X = sum_i <X, E_i> M_i.
struct FactorFrame {
    Matrix basis;            // columns E_1..E_n
    std::vector<Matrix> M;   // M_i, n x nu each
    LambdaOp lambda;
    FrameDiagnostics diagnostics;

    int n() const noexcept { return static_cast<int>(basis.rows()); }
    Matrix m_of(const Vector& x) const;
};

/// Draws orthonormal bases until every pair (and, when n >= 3 nu, every
/// triple) is generic, aligns every M_i to M_1 and cross-checks the result.
/// GenericityExhausted after cfg.redraw_budget draws; FrameInconsistent if
/// the pairwise identity or the sampled factorization fails at frame_tol.
FactorFrame assemble_frame(const CurvatureTensor& rn, const LambdaOp& lambda, const RecoveryConfig& cfg,
                           std::uint64_t seed);

/// Phi(X) = M_X^t M_X.
Matrix phi(const FactorFrame& frame, const Vector& x);

struct StableSubspace {
    Matrix basis;  // nu x m_alpha, orthonormal columns
    std::size_t group = 0;
    double lambda_alpha = 0.0;
    double max_angle = 0.0;  // sin of the largest principal angle seen
};

/// Eigenvalue group minimizing 1/lambda over Lambda's groups.
std::size_t select_peel_group(const LambdaOp& lambda);

/// Common lambda_alpha-eigenspace of Lambda Phi(X) over sampled unit X.
/// UnstableSubspace if samples disagree beyond angle_tol.
StableSubspace stable_subspace(const FactorFrame& frame, int samples, double angle_tol, std::uint64_t seed);

struct GaugeResult {
    std::vector<Matrix> generators;
    Matrix n0;  // element of O_Lambda with n0^t Phi(X0) n0 = I
    double gauge_residual = 0.0;
    double hurwitz_residual = 0.0;
    double eigen_residual = 0.0;
};

/// Generators J_s X = M_X u_s with u_s = N0 e_(m'+s) for the selected group.
/// GaugeFailed if no admissible N0 exists or the generators violate the
/// Hurwitz relations at tol.
GaugeResult gauge_generators(const FactorFrame& frame, const StableSubspace& s, const Vector& x0,
                             const CurvatureTensor& rn, double tol = 1e-8);

/// Rn - Rhat, Rhat being the tensor of (lambda0 = 0, mu = lambda_alpha, J).
/// PeelInconsistent if the remainder's Jacobi spectrum is not
/// {0 : n-1-nu+m_alpha} plus the remaining groups.
CurvatureTensor peel(const CurvatureTensor& rn, double lambda_alpha, const std::vector<Matrix>& generators,
                     const LambdaOp& remaining, double tol = 1e-8, std::uint64_t seed = 0);

struct TraceStage {
    std::string stage;
    std::vector<std::pair<std::string, double>> metrics;
    std::string note;
};

struct RecoveryResult {
    CliffordSystem system;
    OssermanReport report;
    std::vector<TraceStage> trace;
    double reconstruction_residual = 0.0;
};

/// Full pipeline. Errors carry the failing stage. HypothesesViolated when
/// n < 3 nu or n <= (nu+1)^2/4 without cfg.force; with force, a structural
/// failure that persists across cfg.attempts reseeded runs is reported as
/// ObstructionDetected.
RecoveryResult recover_clifford(const CurvatureTensor& r, const RecoveryConfig& cfg = {});

}  // namespace osserman
