#include "osserman/osserman.hpp"

#include "osserman/clifford.hpp"
#include "osserman/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace osserman {

namespace {

std::span<const double> as_span(const Vector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

// Random unit vector inside the span of the given orthonormal columns.
Vector random_in_span(SeededRng& rng, const Matrix& basis) {
    const Vector coeff = rng.unit_vector(static_cast<int>(basis.cols()));
    return basis * coeff;
}

struct RestrictedSpectrum {
    Vector values;
    Matrix vectors;  // n x (n-1), orthonormal, inside X^perp
};

RestrictedSpectrum restricted_decomposition(const CurvatureTensor& r, const Vector& x) {
    const Matrix basis = orthogonal_complement(x);
    const Matrix restricted = basis.transpose() * jacobi(r, x) * basis;
    const auto dec = sym_eigen(restricted, 1e-10 * std::max(1.0, restricted.cwiseAbs().maxCoeff()));
    return {dec.eigenvalues, basis * dec.eigenvectors};
}

Matrix shifted_jacobi(const CurvatureTensor& r, double shift, const Vector& y) {
    const Eigen::Index n = y.size();
    return jacobi(r, y) - shift * (y.squaredNorm() * Matrix::Identity(n, n) - y * y.transpose());
}

}  // namespace

std::string_view to_string(Prop2Class c) noexcept {
    return c == Prop2Class::TwoPointHomogeneous ? "TwoPointHomogeneous" : "Undetermined";
}

Prop2Class classify(int n, int nu) {
    const bool special = n == 2 || n == 4 || n == 8 || n == 16;
    if (!special || (n == 8 && nu < 3) || (n == 16 && nu != 8)) return Prop2Class::TwoPointHomogeneous;
    return Prop2Class::Undetermined;
}

Prop1Hypotheses prop1_hypotheses(int n, int nu) {
    return {n >= 3 * nu, 4 * n > (nu + 1) * (nu + 1)};
}

std::size_t dominant_cluster(const SpectrumProfile& profile, bool* tied) {
    int top = 0;
    for (const auto& c : profile) top = std::max(top, c.multiplicity);
    std::size_t best = 0;
    int count = 0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (profile[i].multiplicity != top) continue;
        if (count == 0 || std::abs(profile[i].value) < std::abs(profile[best].value)) best = i;
        ++count;
    }
    if (tied) *tied = count > 1;
    return best;
}

OssermanReport osserman_check(const CurvatureTensor& r, int samples, double rel_tol, std::uint64_t seed) {
    if (samples < 2) throw Error(ErrorKind::InvalidArgument, "osserman_check needs at least 2 samples");
    if (!(rel_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "rel_tol must be positive");
    const int n = r.dim();
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "osserman_check needs n >= 2");
    const auto validation = validate_tensor(r);
    if (!validation.passed) {
        std::ostringstream msg;
        msg << "tensor fails symmetry validation (worst residual " << validation.worst() << ")";
        throw Error(ErrorKind::InvalidTensor, msg.str());
    }

    SeededRng rng(seed);
    std::vector<Vector> spectra;
    spectra.reserve(static_cast<std::size_t>(samples));
    for (int s = 0; s < samples; ++s) spectra.push_back(restricted_jacobi_eigenvalues(r, rng.unit_vector(n)));

    Vector lo = spectra.front(), hi = spectra.front(), mean = Vector::Zero(n - 1);
    double scale = 1.0;
    for (const auto& ev : spectra) {
        lo = lo.cwiseMin(ev);
        hi = hi.cwiseMax(ev);
        mean += ev;
        scale = std::max(scale, ev.cwiseAbs().maxCoeff());
    }
    mean /= static_cast<double>(samples);

    OssermanReport rep;
    rep.samples_used = samples;
    rep.max_deviation = (hi - lo).maxCoeff();
    rep.is_osserman = rep.max_deviation <= rel_tol * scale;
    if (rep.is_osserman) {
        rep.profile = cluster_spectrum(as_span(mean), rel_tol);
    } else {
        // Profile of a non-Osserman tensor is only indicative (first sample).
        try {
            rep.profile = cluster_spectrum(as_span(spectra.front()), rel_tol);
        } catch (const Error&) {
            rep.profile.clear();
        }
    }
    for (const auto& c : rep.profile) rep.m0 = std::max(rep.m0, c.multiplicity);
    rep.nu = n - 1 - rep.m0;
    rep.prop1_hypotheses = prop1_hypotheses(n, rep.nu);
    rep.radon_bound_ok = rep.nu <= radon_number(n) - 1;
    rep.prop2_class = classify(n, rep.nu);
    return rep;
}

DualityReport duality_check(const CurvatureTensor& r, int samples, double tol, std::uint64_t seed) {
    const int n = r.dim();
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "duality_check needs n >= 2");
    SeededRng rng(seed);
    DualityReport rep;

    // Shift for the kernel variant: dominant eigenvalue of a reference sample.
    double shift = 0.0;
    bool have_shift = false;
    {
        const Vector ref = restricted_jacobi_eigenvalues(r, rng.unit_vector(n));
        try {
            const auto profile = cluster_spectrum(as_span(ref));
            shift = profile[dominant_cluster(profile)].value;
            have_shift = true;
        } catch (const Error&) {
            have_shift = false;
        }
    }

    for (int s = 0; s < samples; ++s) {
        const Vector x = rng.unit_vector(n);
        const auto dec = restricted_decomposition(r, x);
        const double scale = std::max(1.0, dec.values.cwiseAbs().maxCoeff());
        const double join = kClusterRelTol * scale * 10.0;

        // Eigen variant: Y a unit eigenvector of R_X for a randomly chosen eigenvalue.
        const auto pick = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(dec.values.size()));
        const double lambda = dec.values(pick);
        std::vector<Eigen::Index> members;
        for (Eigen::Index i = 0; i < dec.values.size(); ++i)
            if (std::abs(dec.values(i) - lambda) <= join) members.push_back(i);
        Matrix span(n, static_cast<Eigen::Index>(members.size()));
        for (std::size_t k = 0; k < members.size(); ++k) span.col(static_cast<Eigen::Index>(k)) = dec.vectors.col(members[k]);
        const Vector y = random_in_span(rng, span);
        const double residual = (jacobi(r, y) * x - lambda * x).norm() / scale;
        ++rep.pairs_tested;
        rep.max_residual = std::max(rep.max_residual, residual);
        if (residual > tol) rep.violations.push_back({s, false, lambda, residual});

        if (!have_shift) continue;
        // Kernel variant on the shifted tensor, non-orthogonal pair.
        std::vector<Eigen::Index> kernel;
        for (Eigen::Index i = 0; i < dec.values.size(); ++i)
            if (std::abs(dec.values(i) - shift) <= join) kernel.push_back(i);
        if (kernel.empty()) continue;
        Matrix kspan(n, static_cast<Eigen::Index>(kernel.size()));
        for (std::size_t k = 0; k < kernel.size(); ++k) kspan.col(static_cast<Eigen::Index>(k)) = dec.vectors.col(kernel[k]);
        const Vector z = random_in_span(rng, kspan);
        const double psi = 0.2 + 1.1 * rng.uniform();  // inside (0, pi/2)
        const Vector yk = std::cos(psi) * x + std::sin(psi) * z;
        const double kres = (shifted_jacobi(r, shift, yk) * x).norm() / scale;
        ++rep.kernel_pairs_tested;
        rep.max_kernel_residual = std::max(rep.max_kernel_residual, kres);
        if (kres > tol) rep.violations.push_back({s, true, shift, kres});
    }
    return rep;
}

}  // namespace osserman
