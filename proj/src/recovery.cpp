#include "osserman/recovery.hpp"

#include "osserman/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace osserman {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    // splitmix64 finalizer over the combined words
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (a + 1) + 0xBF58476D1CE4E5B9ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool images_independent(std::initializer_list<const Matrix*> bases, double tol) {
    Eigen::Index cols = 0, rows = 0;
    for (const Matrix* b : bases) {
        cols += b->cols();
        rows = b->rows();
    }
    if (cols == 0) return true;
    Matrix stacked(rows, cols);
    Eigen::Index at = 0;
    for (const Matrix* b : bases) {
        stacked.middleCols(at, b->cols()) = *b;
        at += b->cols();
    }
    return numeric_rank(stacked, tol) == cols;
}

void require_orthonormal(const Vector& x, const Vector& y) {
    require_unit(x, 1e-10);
    require_unit(y, 1e-10);
    if (std::abs(x.dot(y)) > 1e-10) throw Error(ErrorKind::InvalidArgument, "vectors are not orthogonal");
}

std::string with_round(const char* stage, int round) {
    std::ostringstream s;
    s << stage << '[' << round << ']';
    return s.str();
}

template <typename F>
auto run_stage(const std::string& stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (!e.stage().empty()) throw;
        throw Error(e.kind(), e.what(), stage);
    }
}

bool is_structural(ErrorKind k) {
    switch (k) {
        case ErrorKind::FrameInconsistent:
        case ErrorKind::AlignmentFailed:
        case ErrorKind::UnstableSubspace:
        case ErrorKind::GaugeFailed:
        case ErrorKind::PeelInconsistent:
        case ErrorKind::ReconstructionMismatch:
            return true;
        default:
            return false;
    }
}

// Upper-triangular (p <= q) entries of a symmetric n x n matrix, row-major.
Vector upper(const Matrix& m) {
    const Eigen::Index n = m.rows();
    Vector v(n * (n + 1) / 2);
    Eigen::Index r = 0;
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = p; q < n; ++q) v(r++) = m(p, q);
    return v;
}

}  // namespace

// ---------------------------------------------------------------- LambdaOp

LambdaOp::LambdaOp(const SpectrumProfile& nonzero_groups) {
    SpectrumProfile sorted = nonzero_groups;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    for (const auto& g : sorted) {
        if (g.value == 0.0 || g.multiplicity <= 0)
            throw Error(ErrorKind::InvalidArgument, "Lambda groups need nonzero values and positive multiplicities");
        groups_.push_back({g.value, static_cast<int>(mu_.size()), g.multiplicity});
        mu_.insert(mu_.end(), static_cast<std::size_t>(g.multiplicity), g.value);
    }
}

Matrix LambdaOp::matrix() const {
    Vector d(nu());
    for (int i = 0; i < nu(); ++i) d(i) = mu_[static_cast<std::size_t>(i)];
    return d.asDiagonal();
}

Matrix LambdaOp::inverse() const {
    Vector d(nu());
    for (int i = 0; i < nu(); ++i) d(i) = 1.0 / mu_[static_cast<std::size_t>(i)];
    return d.asDiagonal();
}

double LambdaOp::scale() const noexcept {
    double s = 0.0;
    for (double m : mu_) s = std::max(s, std::abs(m));
    return s;
}

LambdaOp LambdaOp::without_group(std::size_t g) const {
    SpectrumProfile rest;
    for (std::size_t i = 0; i < groups_.size(); ++i)
        if (i != g) rest.push_back({groups_[i].value, groups_[i].size});
    return LambdaOp(rest);
}

// ---------------------------------------------------------------- normalize

NormalizedTensor normalize(const CurvatureTensor& r, const SpectrumProfile& profile, bool break_ties) {
    if (profile.empty()) throw Error(ErrorKind::InvalidArgument, "normalize: empty spectrum profile");
    bool tied = false;
    const std::size_t dom = dominant_cluster(profile, &tied);
    if (tied && !break_ties)
        throw Error(ErrorKind::TieBreakNeeded, "two eigenvalues share the maximal multiplicity");

    NormalizedTensor out;
    out.shift = profile[dom].value;
    out.tie_broken = tied;
    SpectrumProfile rest;
    for (std::size_t i = 0; i < profile.size(); ++i)
        if (i != dom) rest.push_back({profile[i].value - out.shift, profile[i].multiplicity});
    out.lambda = LambdaOp(rest);
    out.tensor = out.shift == 0.0 ? r : combine(1.0, r, -out.shift, sphere_tensor(r.dim()));
    return out;
}

// ---------------------------------------------------------------- factorization

Matrix factor_jacobi(const CurvatureTensor& rn, const Vector& x, const LambdaOp& lambda, double tol) {
    require_unit(x, 1e-10);
    const int n = rn.dim();
    const int nu = lambda.nu();
    const Matrix rx = jacobi(rn, x);
    const double scale = std::max({lambda.scale(), max_abs(rx), 1e-300});
    const auto dec = sym_eigen(rx, 1e-10 * scale);
    const double match = 1e-6 * scale;

    std::vector<std::vector<Eigen::Index>> members(lambda.groups().size());
    int zeros = 0;
    for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i) {
        const double v = dec.eigenvalues(i);
        if (std::abs(v) <= match) {
            ++zeros;
            continue;
        }
        bool placed = false;
        for (std::size_t g = 0; g < lambda.groups().size() && !placed; ++g)
            if (std::abs(v - lambda.groups()[g].value) <= match) {
                members[g].push_back(i);
                placed = true;
            }
        if (!placed) {
            std::ostringstream msg;
            msg << "Jacobi eigenvalue " << v << " matches neither 0 nor an entry of Lambda";
            throw Error(ErrorKind::SpectrumMismatch, msg.str());
        }
    }
    bool counts_ok = zeros == n - nu;
    for (std::size_t g = 0; g < members.size(); ++g)
        counts_ok = counts_ok && static_cast<int>(members[g].size()) == lambda.groups()[g].size;
    if (!counts_ok) throw Error(ErrorKind::SpectrumMismatch, "Jacobi multiplicities disagree with Lambda");

    Matrix m(n, nu);
    for (std::size_t g = 0; g < members.size(); ++g)
        for (std::size_t k = 0; k < members[g].size(); ++k)
            m.col(lambda.groups()[g].offset + static_cast<Eigen::Index>(k)) = dec.eigenvectors.col(members[g][k]);

    const double residual = max_abs(m * lambda.matrix() * m.transpose() - rx) / scale;
    if (residual > tol) {
        std::ostringstream msg;
        msg << "factorization residual " << residual << " exceeds " << tol;
        throw Error(ErrorKind::SpectrumMismatch, msg.str());
    }
    return m;
}

bool generic_pair(const CurvatureTensor& rn, const Vector& x, const Vector& y, int nu, double tol) {
    require_orthonormal(x, y);
    const std::vector<Matrix> ops{jacobi(rn, x), jacobi(rn, y)};
    return image_sum_dim(ops, tol) == 2 * nu;
}

bool generic_triple(const CurvatureTensor& rn, const Vector& x, const Vector& y, const Vector& z, int nu,
                    double tol) {
    require_orthonormal(x, y);
    require_orthonormal(x, z);
    require_orthonormal(y, z);
    const std::vector<Matrix> ops{jacobi(rn, x), jacobi(rn, y), jacobi(rn, z)};
    return image_sum_dim(ops, tol) == 3 * nu;
}

Matrix align_pair(const Matrix& m1, const CurvatureTensor& rn, const Vector& e1, const Vector& e2,
                  const LambdaOp& lambda, double tol) {
    return align_pair(m1, factor_jacobi(rn, e2, lambda, tol), rn, e1, e2, lambda, tol);
}

Matrix align_pair(const Matrix& m1, const Matrix& f2, const CurvatureTensor& rn, const Vector& e1,
                  const Vector& e2, const LambdaOp& lambda, double tol) {
    require_orthonormal(e1, e2);
    const int n = rn.dim();
    const int nu = lambda.nu();
    if (nu == 0) return Matrix(n, 0);
    if (m1.rows() != n || m1.cols() != nu || f2.rows() != n || f2.cols() != nu)
        throw Error(ErrorKind::DimensionMismatch, "align_pair: factor shapes do not match Lambda");

    const std::vector<double>& mu = lambda.mu();
    const Matrix lam = lambda.matrix();
    const double scale = lambda.scale();
    const Matrix target = 2.0 * mixed_jacobi(rn, e1, e2);
    const Eigen::Index tri = static_cast<Eigen::Index>(n) * (n + 1) / 2;
    const Eigen::Index unknowns = static_cast<Eigen::Index>(nu) * nu;

    // Cross term M1 Lam N^t F2^t + F2 N Lam M1^t is linear in N;
    // coefficient of N(a,b) at (p,q) is mu_b (F2(p,a) M1(q,b) + M1(p,b) F2(q,a)).
    Matrix cross(tri, unknowns);
    {
        Eigen::Index r = 0;
        for (int p = 0; p < n; ++p)
            for (int q = p; q < n; ++q, ++r)
                for (int a = 0; a < nu; ++a)
                    for (int b = 0; b < nu; ++b)
                        cross(r, a * nu + b) = mu[static_cast<std::size_t>(b)] * (f2(p, a) * m1(q, b) + m1(p, b) * f2(q, a));
    }
    const Vector rhs = upper(target);
    Eigen::ColPivHouseholderQR<Matrix> qr(cross);
    qr.setThreshold(1e-10);
    if (qr.rank() < unknowns) {
        std::ostringstream msg;
        msg << "cross-term system has rank " << qr.rank() << " < " << unknowns << " (pair not generic)";
        throw Error(ErrorKind::AlignmentFailed, msg.str());
    }
    Vector nvec = qr.solve(rhs);
    auto as_matrix = [nu](const Vector& v) {
        Matrix m(nu, nu);
        for (int a = 0; a < nu; ++a)
            for (int b = 0; b < nu; ++b) m(a, b) = v(a * nu + b);
        return m;
    };

    // Gauss-Newton on [cross term; N Lam N^t - Lam].
    const Eigen::Index gtri = static_cast<Eigen::Index>(nu) * (nu + 1) / 2;
    for (int iter = 0; iter < 4; ++iter) {
        const Matrix nmat = as_matrix(nvec);
        Vector res(tri + gtri);
        res.head(tri) = cross * nvec - rhs;
        res.tail(gtri) = upper(nmat * lam * nmat.transpose() - lam);
        if (res.cwiseAbs().maxCoeff() <= 1e-15 * scale) break;
        Matrix jac(tri + gtri, unknowns);
        jac.topRows(tri) = cross;
        Eigen::Index r = tri;
        for (int p = 0; p < nu; ++p)
            for (int q = p; q < nu; ++q, ++r)
                for (int a = 0; a < nu; ++a)
                    for (int b = 0; b < nu; ++b) {
                        const double mb = mu[static_cast<std::size_t>(b)];
                        double c = 0.0;
                        if (p == a) c += mb * nmat(q, b);
                        if (q == a) c += nmat(p, b) * mb;
                        jac(r, a * nu + b) = c;
                    }
        const Vector step = jac.colPivHouseholderQr().solve(-res);
        nvec += step;
        if (step.cwiseAbs().maxCoeff() <= 1e-16) break;
    }

    const Matrix nmat = as_matrix(nvec);
    const Matrix m2 = f2 * nmat;
    const double cross_res = max_abs(m1 * lam * m2.transpose() + m2 * lam * m1.transpose() - target) / scale;
    const double gauge_res = max_abs(nmat * lam * nmat.transpose() - lam) / scale;
    const double factor_res = max_abs(m2 * lam * m2.transpose() - jacobi(rn, e2)) / scale;
    const double worst = std::max({cross_res, gauge_res, factor_res});
    if (!(worst <= tol)) {
        std::ostringstream msg;
        msg << "alignment residuals cross " << cross_res << ", gauge " << gauge_res << ", factor " << factor_res
            << " exceed " << tol;
        throw Error(ErrorKind::AlignmentFailed, msg.str());
    }
    return m2;
}

// ---------------------------------------------------------------- frame

Matrix FactorFrame::m_of(const Vector& x) const {
    const Vector coords = basis.transpose() * x;
    const int nu = lambda.nu();
    Matrix out = Matrix::Zero(n(), nu);
    for (int i = 0; i < n(); ++i) out += coords(i) * M[static_cast<std::size_t>(i)];
    return out;
}

FactorFrame assemble_frame(const CurvatureTensor& rn, const LambdaOp& lambda, const RecoveryConfig& cfg,
                           std::uint64_t seed) {
    const int n = rn.dim();
    const int nu = lambda.nu();
    const double scale = nu > 0 ? lambda.scale() : std::max(1.0, rn.max_abs());
    SeededRng rng(seed);
    FactorFrame frame;
    frame.lambda = lambda;

    if (nu > 0 && n < 2 * nu) {
        std::ostringstream msg;
        msg << "no generic pairs exist for n = " << n << " < 2 nu = " << 2 * nu;
        throw Error(ErrorKind::GenericityExhausted, msg.str());
    }

    std::vector<Matrix> factors;
    bool found = false;
    frame.diagnostics.triples_checked = nu > 0 && n >= 3 * nu;
    for (int draw = 0; draw < std::max(1, cfg.redraw_budget) && !found; ++draw) {
        frame.basis = rng.orthogonal(n);
        factors.clear();
        for (int i = 0; i < n; ++i) {
            try {
                factors.push_back(factor_jacobi(rn, frame.basis.col(i), lambda, cfg.factor_tol));
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::SpectrumMismatch) throw;
                std::ostringstream msg;
                msg << "Jacobi operator at basis vector " << i << " is inconsistent with Lambda: " << e.what();
                throw Error(ErrorKind::FrameInconsistent, msg.str());
            }
        }
        bool ok = true;
        for (int i = 0; i < n && ok && nu > 0; ++i)
            for (int j = i + 1; j < n && ok; ++j)
                ok = images_independent({&factors[static_cast<std::size_t>(i)], &factors[static_cast<std::size_t>(j)]}, cfg.rank_tol);
        if (ok && frame.diagnostics.triples_checked) {
            for (int i = 0; i < n && ok; ++i)
                for (int j = i + 1; j < n && ok; ++j)
                    for (int k = j + 1; k < n && ok; ++k)
                        ok = images_independent({&factors[static_cast<std::size_t>(i)], &factors[static_cast<std::size_t>(j)],
                                                 &factors[static_cast<std::size_t>(k)]},
                                                cfg.rank_tol);
        }
        if (ok)
            found = true;
        else
            ++frame.diagnostics.redraws;
    }
    if (!found) {
        std::ostringstream msg;
        msg << "no generic orthonormal basis after " << frame.diagnostics.redraws << " draws";
        throw Error(ErrorKind::GenericityExhausted, msg.str());
    }

    const Matrix lam = lambda.matrix();
    const Vector e1 = frame.basis.col(0);
    frame.M.resize(static_cast<std::size_t>(n));
    frame.M[0] = factors[0];
    for (int i = 1; i < n; ++i) {
        frame.M[static_cast<std::size_t>(i)] =
            align_pair(factors[0], factors[static_cast<std::size_t>(i)], rn, e1, frame.basis.col(i), lambda, cfg.frame_tol);
        const Matrix& mi = frame.M[static_cast<std::size_t>(i)];
        frame.diagnostics.max_alignment_residual =
            std::max(frame.diagnostics.max_alignment_residual,
                     nu ? max_abs(factors[0] * lam * mi.transpose() + mi * lam * factors[0].transpose() -
                                  2.0 * mixed_jacobi(rn, e1, frame.basis.col(i))) / scale
                        : 0.0);
    }

    auto& diag = frame.diagnostics;
    for (int i = 1; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const Matrix& mi = frame.M[static_cast<std::size_t>(i)];
            const Matrix& mj = frame.M[static_cast<std::size_t>(j)];
            const Matrix lhs = nu ? Matrix(mi * lam * mj.transpose() + mj * lam * mi.transpose()) : Matrix::Zero(n, n);
            diag.max_pair_residual = std::max(
                diag.max_pair_residual, max_abs(lhs - 2.0 * mixed_jacobi(rn, frame.basis.col(i), frame.basis.col(j))) / scale);
        }
    for (const auto& m : frame.M)
        if (nu) diag.max_orthonormality = std::max(diag.max_orthonormality, max_abs(m.transpose() * m - Matrix::Identity(nu, nu)));
    for (int t = 0; t < cfg.frame_check_samples; ++t) {
        const Vector x = rng.unit_vector(n);
        const Matrix mx = frame.m_of(x);
        const Matrix lhs = nu ? Matrix(mx * lam * mx.transpose()) : Matrix::Zero(n, n);
        diag.max_sample_residual = std::max(diag.max_sample_residual, max_abs(lhs - jacobi(rn, x)) / scale);
    }
    if (diag.max_pair_residual > cfg.frame_tol || diag.max_sample_residual > cfg.frame_tol) {
        std::ostringstream msg;
        msg << "linear factorization inconsistent: pairwise residual " << diag.max_pair_residual
            << ", sampled residual " << diag.max_sample_residual << " (tolerance " << cfg.frame_tol << ")";
        throw Error(ErrorKind::FrameInconsistent, msg.str());
    }
    return frame;
}

Matrix phi(const FactorFrame& frame, const Vector& x) {
    const Matrix mx = frame.m_of(x);
    return mx.transpose() * mx;
}

// ---------------------------------------------------------------- Phi-map steps

std::size_t select_peel_group(const LambdaOp& lambda) {
    const auto& groups = lambda.groups();
    if (groups.empty()) throw Error(ErrorKind::InvalidArgument, "no eigenvalue groups to peel");
    std::size_t best = 0;
    for (std::size_t g = 1; g < groups.size(); ++g)
        if (1.0 / groups[g].value < 1.0 / groups[best].value) best = g;
    return best;
}

StableSubspace stable_subspace(const FactorFrame& frame, int samples, double angle_tol, std::uint64_t seed) {
    const LambdaOp& lambda = frame.lambda;
    const int nu = lambda.nu();
    StableSubspace out;
    out.group = select_peel_group(lambda);
    const auto& grp = lambda.groups()[out.group];
    out.lambda_alpha = grp.value;
    if (lambda.groups().size() == 1) {
        out.basis = Matrix::Identity(nu, nu);
        return out;
    }

    const Matrix lam = lambda.matrix();
    SeededRng rng(seed);
    for (int t = 0; t < std::max(1, samples); ++t) {
        const Vector x = rng.unit_vector(frame.n());
        const Matrix shifted = lam * phi(frame, x) - grp.value * Matrix::Identity(nu, nu);
        const Matrix s = nullspace(shifted, 1e-8);
        if (s.cols() != grp.size) {
            std::ostringstream msg;
            msg << "eigenspace of Lambda Phi(X) for " << grp.value << " has dimension " << s.cols() << ", expected "
                << grp.size;
            throw Error(ErrorKind::UnstableSubspace, msg.str());
        }
        if (t == 0) {
            out.basis = s;
            continue;
        }
        out.max_angle = std::max(out.max_angle, subspace_distance(out.basis, s));
    }
    if (out.max_angle > angle_tol) {
        std::ostringstream msg;
        msg << "eigenspaces of Lambda Phi(X) move with X: sin(angle) " << out.max_angle << " > " << angle_tol;
        throw Error(ErrorKind::UnstableSubspace, msg.str());
    }
    return out;
}

GaugeResult gauge_generators(const FactorFrame& frame, const StableSubspace& s, const Vector& x0,
                             const CurvatureTensor& rn, double tol) {
    require_unit(x0, 1e-10);
    const LambdaOp& lambda = frame.lambda;
    const int nu = lambda.nu();
    const int n = frame.n();
    const auto& grp = lambda.groups()[s.group];
    const Matrix lam = lambda.matrix();
    const double scale = lambda.scale();
    GaugeResult out;

    // N0 simultaneously normalizes Phi(X0) to I and keeps Lambda^{-1}
    // (equivalently Lambda) invariant: generalized eigenvectors of
    // (Lambda^{-1}, Phi(X0)) with eigenvalues 1/mu_s.
    const Matrix phi0 = phi(frame, x0);
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(lambda.inverse(), phi0,
                                                         Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (ges.info() != Eigen::Success) throw Error(ErrorKind::GaugeFailed, "Phi(X0) is not positive definite");
    std::vector<int> order(static_cast<std::size_t>(nu));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return 1.0 / lambda.mu()[static_cast<std::size_t>(a)] < 1.0 / lambda.mu()[static_cast<std::size_t>(b)];
    });
    out.n0 = Matrix(nu, nu);
    for (int k = 0; k < nu; ++k) {
        const double expected = 1.0 / lambda.mu()[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
        if (std::abs(ges.eigenvalues()(k) - expected) > 1e-6 * std::max(1.0, std::abs(expected)))
            throw Error(ErrorKind::GaugeFailed, "spectrum of Lambda Phi(X0) differs from Lambda");
        out.n0.col(order[static_cast<std::size_t>(k)]) = ges.eigenvectors().col(k);
    }
    // Fix the remaining O(m) freedom inside each group: right-multiply by the
    // polar factor that makes the diagonal block symmetric positive, so
    // Phi(X0) = I and Lambda = lambda I give N0 = I.
    for (const auto& g : lambda.groups()) {
        const Matrix block = out.n0.block(g.offset, g.offset, g.size, g.size);
        Eigen::JacobiSVD<Matrix> svd(block, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Matrix q = svd.matrixV() * svd.matrixU().transpose();
        out.n0.middleCols(g.offset, g.size) = out.n0.middleCols(g.offset, g.size) * q;
    }
    out.gauge_residual = std::max(max_abs(out.n0.transpose() * phi0 * out.n0 - Matrix::Identity(nu, nu)),
                                  max_abs(out.n0 * lam * out.n0.transpose() - lam) / scale);
    if (out.gauge_residual > tol) {
        std::ostringstream msg;
        msg << "no O_Lambda factorization of Phi(X0) within " << tol << " (residual " << out.gauge_residual << ")";
        throw Error(ErrorKind::GaugeFailed, msg.str());
    }

    const Matrix u = out.n0.middleCols(grp.offset, grp.size);
    const Matrix u_orth = Eigen::HouseholderQR<Matrix>(u).householderQ() * Matrix::Identity(nu, grp.size);
    const double drift = subspace_distance(s.basis, u_orth);
    if (drift > tol) {
        std::ostringstream msg;
        msg << "gauge directions leave the stable subspace (sin angle " << drift << ")";
        throw Error(ErrorKind::GaugeFailed, msg.str());
    }

    // J_s = sum_i (M_i u_s) E_i^t
    for (int sidx = 0; sidx < grp.size; ++sidx) {
        Matrix images(n, n);
        for (int i = 0; i < n; ++i) images.col(i) = frame.M[static_cast<std::size_t>(i)] * u.col(sidx);
        out.generators.push_back(images * frame.basis.transpose());
    }

    SeededRng rng(0x5eedULL);
    double skew = 0.0;
    for (const auto& j : out.generators) skew = std::max(skew, max_abs(j + j.transpose()));
    for (int t = 0; t < 20; ++t) {
        const Vector x = rng.unit_vector(n);
        const Matrix rx = jacobi(rn, x);
        Matrix images(n, grp.size);
        for (int sidx = 0; sidx < grp.size; ++sidx) images.col(sidx) = out.generators[static_cast<std::size_t>(sidx)] * x;
        out.hurwitz_residual =
            std::max(out.hurwitz_residual, max_abs(images.transpose() * images - Matrix::Identity(grp.size, grp.size)));
        out.eigen_residual = std::max(out.eigen_residual, max_abs(rx * images - grp.value * images) / scale);
    }
    out.hurwitz_residual = std::max(out.hurwitz_residual, skew);
    if (out.hurwitz_residual > tol || out.eigen_residual > tol) {
        std::ostringstream msg;
        msg << "generators violate Hurwitz/eigen conditions: hurwitz " << out.hurwitz_residual << ", eigen "
            << out.eigen_residual;
        throw Error(ErrorKind::GaugeFailed, msg.str());
    }
    return out;
}

CurvatureTensor peel(const CurvatureTensor& rn, double lambda_alpha, const std::vector<Matrix>& generators,
                     const LambdaOp& remaining, double tol, std::uint64_t seed) {
    const int n = rn.dim();
    CurvatureTensor hat;
    try {
        const CliffordSystem sys = make_clifford_system(
            n, 0.0, std::vector<double>(generators.size(), lambda_alpha), generators);
        hat = curvature_from_clifford(sys, CliffordTolerance::uniform(tol));
    } catch (const Error& e) {
        throw Error(ErrorKind::PeelInconsistent, std::string("peeled generators do not form a Clifford system: ") + e.what());
    }
    CurvatureTensor rest = combine(1.0, rn, -1.0, hat);

    std::vector<double> expected(static_cast<std::size_t>(n - 1 - remaining.nu()), 0.0);
    expected.insert(expected.end(), remaining.mu().begin(), remaining.mu().end());
    std::sort(expected.begin(), expected.end());
    const double scale = std::max({1.0, std::abs(lambda_alpha), remaining.scale()});
    SeededRng rng(seed);
    for (int t = 0; t < 10; ++t) {
        const Vector ev = restricted_jacobi_eigenvalues(rest, rng.unit_vector(n));
        double worst = 0.0;
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            worst = std::max(worst, std::abs(ev(i) - expected[static_cast<std::size_t>(i)]));
        if (worst / scale > tol) {
            std::ostringstream msg;
            msg << "remainder spectrum deviates from the reduced profile by " << worst;
            throw Error(ErrorKind::PeelInconsistent, msg.str());
        }
    }
    return rest;
}

// ---------------------------------------------------------------- pipeline

namespace {

struct Extracted {
    std::vector<Matrix> generators;
    std::vector<double> mu;  // unshifted eigenvalues
};

Extracted run_rounds(const NormalizedTensor& norm, const RecoveryConfig& cfg, std::uint64_t seed, int attempt,
                     std::vector<TraceStage>& trace) {
    Extracted out;
    CurvatureTensor current = norm.tensor;
    LambdaOp lambda = norm.lambda;
    const int n = current.dim();
    for (int round = 0; lambda.nu() > 0; ++round) {
        const FactorFrame frame = run_stage(with_round("assemble_frame", round), [&] {
            return assemble_frame(current, lambda, cfg, mix_seed(seed, static_cast<std::uint64_t>(round), 1));
        });
        trace.push_back({with_round("assemble_frame", round),
                         {{"attempt", attempt},
                          {"nu", lambda.nu()},
                          {"redraws", frame.diagnostics.redraws},
                          {"triples_checked", frame.diagnostics.triples_checked ? 1.0 : 0.0},
                          {"alignment_residual", frame.diagnostics.max_alignment_residual},
                          {"pair_residual", frame.diagnostics.max_pair_residual},
                          {"sample_residual", frame.diagnostics.max_sample_residual},
                          {"orthonormality", frame.diagnostics.max_orthonormality}},
                         {}});

        const StableSubspace sub = run_stage(with_round("stable_subspace", round), [&] {
            return stable_subspace(frame, cfg.subspace_samples, cfg.angle_tol,
                                   mix_seed(seed, static_cast<std::uint64_t>(round), 2));
        });
        trace.push_back({with_round("stable_subspace", round),
                         {{"attempt", attempt},
                          {"lambda_alpha", sub.lambda_alpha},
                          {"m_alpha", static_cast<double>(sub.basis.cols())},
                          {"max_angle", sub.max_angle}},
                         {}});

        const GaugeResult gauge = run_stage(with_round("gauge_generators", round), [&] {
            SeededRng rng(mix_seed(seed, static_cast<std::uint64_t>(round), 3));
            Vector x0 = rng.unit_vector(n);
            for (int tries = 0; tries < 20; ++tries) {
                const Eigen::SelfAdjointEigenSolver<Matrix> es(phi(frame, x0), Eigen::EigenvaluesOnly);
                if (es.eigenvalues()(0) > 1e-8 * es.eigenvalues()(es.eigenvalues().size() - 1)) break;
                x0 = rng.unit_vector(n);
            }
            return gauge_generators(frame, sub, x0, current, cfg.frame_tol);
        });
        trace.push_back({with_round("gauge_generators", round),
                         {{"attempt", attempt},
                          {"gauge_residual", gauge.gauge_residual},
                          {"hurwitz_residual", gauge.hurwitz_residual},
                          {"eigen_residual", gauge.eigen_residual}},
                         {}});

        const LambdaOp remaining = lambda.without_group(sub.group);
        current = run_stage(with_round("peel", round), [&] {
            return peel(current, sub.lambda_alpha, gauge.generators, remaining, cfg.frame_tol,
                        mix_seed(seed, static_cast<std::uint64_t>(round), 4));
        });
        trace.push_back({with_round("peel", round),
                         {{"attempt", attempt},
                          {"peeled", static_cast<double>(gauge.generators.size())},
                          {"remaining_nu", remaining.nu()}},
                         {}});

        for (const auto& j : gauge.generators) {
            out.generators.push_back(j);
            out.mu.push_back(sub.lambda_alpha + norm.shift);
        }
        lambda = remaining;
    }
    const double leftover = current.max_abs();
    if (leftover > cfg.reconstruction_tol * std::max(1.0, norm.lambda.scale())) {
        std::ostringstream msg;
        msg << "tensor left after peeling has max component " << leftover;
        throw Error(ErrorKind::PeelInconsistent, msg.str(), "peel");
    }
    return out;
}

}  // namespace

RecoveryResult recover_clifford(const CurvatureTensor& r, const RecoveryConfig& cfg) {
    RecoveryResult result;
    const int n = r.dim();

    result.report = run_stage("osserman_check", [&] { return osserman_check(r, cfg.samples, cfg.rel_tol, cfg.seed); });
    const OssermanReport& rep = result.report;
    result.trace.push_back({"osserman_check",
                            {{"max_deviation", rep.max_deviation},
                             {"samples", rep.samples_used},
                             {"m0", rep.m0},
                             {"nu", rep.nu}},
                            {}});
    if (!rep.is_osserman) {
        std::ostringstream msg;
        msg << "Jacobi spectrum depends on X (max deviation " << rep.max_deviation << ")";
        throw Error(ErrorKind::NotOsserman, msg.str(), "osserman_check");
    }

    const bool hypotheses = rep.prop1_hypotheses.both();
    result.trace.push_back({"hypotheses",
                            {{"n_ge_3nu", rep.prop1_hypotheses.n_ge_3nu ? 1.0 : 0.0},
                             {"n_gt_quarter_sq", rep.prop1_hypotheses.n_gt_quarter_sq ? 1.0 : 0.0}},
                            hypotheses ? "" : (cfg.force ? "violated, overridden by force" : "violated")});
    if (!hypotheses && !cfg.force) {
        std::ostringstream msg;
        msg << "n = " << n << ", nu = " << rep.nu << " fails n >= 3 nu or n > (nu+1)^2/4";
        throw Error(ErrorKind::HypothesesViolated, msg.str(), "hypotheses");
    }

    const NormalizedTensor norm = run_stage("normalize", [&] { return normalize(r, rep.profile, cfg.break_ties); });
    result.trace.push_back({"normalize",
                            {{"lambda0", norm.shift}, {"nu", norm.lambda.nu()}, {"groups", static_cast<double>(norm.lambda.groups().size())}},
                            norm.tie_broken ? "tie at maximal multiplicity broken by smallest |value|" : ""});

    Extracted extracted;
    bool done = false;
    Error last(ErrorKind::FrameInconsistent, "no attempt made", "assemble_frame");
    for (int attempt = 0; attempt < std::max(1, cfg.attempts) && !done; ++attempt) {
        try {
            extracted = run_rounds(norm, cfg, mix_seed(cfg.seed, static_cast<std::uint64_t>(attempt), 7), attempt, result.trace);
            done = true;
        } catch (const Error& e) {
            if (!is_structural(e.kind())) throw;
            result.trace.push_back({e.stage(), {{"attempt", attempt}}, std::string(to_string(e.kind())) + ": " + e.what()});
            last = e;
        }
    }
    if (!done) {
        if (!hypotheses) {
            std::ostringstream msg;
            msg << "no Clifford structure: stage " << last.stage() << " failed on every attempt (" << to_string(last.kind())
                << ": " << last.what() << ")";
            throw Error(ErrorKind::ObstructionDetected, msg.str(), last.stage());
        }
        throw last;
    }

    result.system = run_stage("assemble", [&] {
        return make_clifford_system(n, norm.shift, extracted.mu, extracted.generators);
    });
    const auto validation = validate_clifford(result.system, CliffordTolerance::uniform(cfg.frame_tol));
    result.trace.push_back({"assemble",
                            {{"nu", result.system.nu()},
                             {"skew", validation.skew},
                             {"orthogonal", validation.orthogonal},
                             {"hurwitz", validation.hurwitz}},
                            {}});
    if (!validation.passed)
        throw Error(ErrorKind::ReconstructionMismatch, "recovered generators fail the Hurwitz relations", "assemble");

    const CurvatureTensor rebuilt =
        run_stage("verify", [&] { return curvature_from_clifford(result.system, CliffordTolerance::uniform(cfg.frame_tol)); });
    double residual = 0.0;
    for (std::size_t i = 0; i < r.comps().size(); ++i)
        residual = std::max(residual, std::abs(rebuilt.comps()[i] - r.comps()[i]));
    result.reconstruction_residual = residual;
    result.trace.push_back({"verify", {{"reconstruction_residual", residual}}, {}});
    if (residual > cfg.reconstruction_tol) {
        std::ostringstream msg;
        msg << "rebuilt tensor differs from input by " << residual;
        throw Error(ErrorKind::ReconstructionMismatch, msg.str(), "verify");
    }
    return result;
}

}  // namespace osserman
