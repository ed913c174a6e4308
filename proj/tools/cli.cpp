#include "cli.hpp"

#include "osserman/cayley.hpp"
#include "osserman/clifford.hpp"
#include "osserman/errors.hpp"
#include "osserman/io.hpp"
#include "osserman/osserman.hpp"
#include "osserman/recovery.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace osserman::cli {

namespace {

using nlohmann::json;

struct RunConfig {
    std::string command;
    std::string input_path;
    int samples = 200;
    double rel_tol = kClusterRelTol;
    std::uint64_t seed = 0;
    std::string format = "text";
    bool force = false;
    std::string out;

    bool structured() const { return format == "structured"; }
};

struct GenerateArgs {
    int n = 0;
    int nu = 0;
    double lambda0 = 1.0;
    std::vector<double> mu;
    bool rotate = false;
};

struct CayleyArgs {
    double alpha = 1.0;
    bool emit_tensor = false;
    std::string obstruction;
};

json envelope(const RunConfig& cfg) {
    return {{"schema_version", kSchemaVersion},
            {"command", cfg.command},
            {"samples", cfg.samples},
            {"rel_tol", cfg.rel_tol},
            {"seed", cfg.seed}};
}

json error_json(const Error& e) {
    json j = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
    if (!e.stage().empty()) j["stage"] = e.stage();
    return j;
}

std::string profile_text(const SpectrumProfile& p) {
    std::ostringstream s;
    s.precision(12);
    s << '{';
    for (std::size_t i = 0; i < p.size(); ++i) s << (i ? ", " : "") << '(' << p[i].value << ", " << p[i].multiplicity << ')';
    s << '}';
    return s.str();
}

// Strips ".tensor.json" / ".json" so derived outputs sit next to the input.
std::string stem_of(const std::string& path) {
    for (const std::string suffix : {".tensor.json", ".json"})
        if (path.size() > suffix.size() && path.ends_with(suffix)) return path.substr(0, path.size() - suffix.size());
    return path;
}

int report_error(const RunConfig& cfg, const Error& e, int code, std::ostream& out, std::ostream& err) {
    if (cfg.structured()) {
        json doc = envelope(cfg);
        doc["status"] = "error";
        doc["exit_code"] = code;
        doc["error"] = error_json(e);
        out << doc.dump(2) << '\n';
    }
    err << "error: " << to_string(e.kind());
    if (!e.stage().empty()) err << " at stage " << e.stage();
    err << ": " << e.what() << '\n';
    return code;
}

int cmd_generate(const RunConfig& cfg, const GenerateArgs& g, std::ostream& out, std::ostream& err) {
    CliffordSystem sys;
    try {
        if (static_cast<int>(g.mu.size()) != g.nu)
            throw Error(ErrorKind::InvalidMu, "--mu must list exactly nu values");
        sys = make_clifford_system(g.n, g.lambda0, g.mu, generate_hurwitz_family(g.n, g.nu));
        if (g.rotate) sys = rotate(sys, SeededRng(cfg.seed).orthogonal(g.n));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ExceedsRadonBound) return report_error(cfg, e, kRadonBound, out, err);
        if (e.kind() == ErrorKind::InvalidMu) return report_error(cfg, e, kInvalidMu, out, err);
        return report_error(cfg, e, kFileError, out, err);
    }

    const std::string base = cfg.out.empty() ? "clifford_n" + std::to_string(g.n) + "_nu" + std::to_string(g.nu) : cfg.out;
    const std::string tensor_path = base + ".tensor.json";
    const std::string system_path = base + ".clifford.json";
    SpectrumProfile profile;
    try {
        const CurvatureTensor r = curvature_from_clifford(sys);
        save_tensor(tensor_path, r);
        save_clifford(system_path, sys);
        if (g.n >= 2) profile = jacobi_spectrum(r, SeededRng(cfg.seed).unit_vector(g.n), cfg.rel_tol);
    } catch (const Error& e) {
        return report_error(cfg, e, kFileError, out, err);
    }

    if (cfg.structured()) {
        json doc = envelope(cfg);
        doc["status"] = "ok";
        doc["exit_code"] = kOk;
        doc["system"] = {{"n", g.n}, {"nu", g.nu}, {"lambda0", g.lambda0}, {"mu", g.mu}, {"rotated", g.rotate}};
        doc["radon_number"] = radon_number(g.n);
        doc["profile"] = to_json(profile);
        doc["files"] = {{"tensor", tensor_path}, {"clifford", system_path}};
        out << doc.dump(2) << '\n';
    } else {
        out << "generated Cliff(" << g.nu << ") structure on R^" << g.n << " (rho = " << radon_number(g.n) << ")\n"
            << "Jacobi profile: " << profile_text(profile) << '\n'
            << "tensor:   " << tensor_path << '\n'
            << "system:   " << system_path << '\n';
    }
    return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    CurvatureTensor r;
    OssermanReport rep;
    DualityReport dual;
    try {
        r = load_tensor(cfg.input_path);
        rep = osserman_check(r, cfg.samples, cfg.rel_tol, cfg.seed);
        if (rep.is_osserman) dual = duality_check(r, cfg.samples, 1e-9, cfg.seed);
    } catch (const Error& e) {
        return report_error(cfg, e, kFileError, out, err);
    }
    const int code = rep.is_osserman ? kOk : kNegative;

    if (cfg.structured()) {
        json doc = envelope(cfg);
        doc["status"] = "ok";
        doc["exit_code"] = code;
        doc["input"] = cfg.input_path;
        doc["n"] = r.dim();
        doc["report"] = to_json(rep);
        doc["duality"] = rep.is_osserman ? to_json(dual) : json(nullptr);
        out << doc.dump(2) << '\n';
        return code;
    }
    out.precision(6);
    out << "tensor:            " << cfg.input_path << " (n = " << r.dim() << ")\n"
        << "osserman:          " << (rep.is_osserman ? "yes" : "no") << " (" << rep.samples_used
        << " samples, max deviation " << rep.max_deviation << ")\n"
        << "profile:           " << profile_text(rep.profile) << '\n'
        << "m0, nu:            " << rep.m0 << ", " << rep.nu << '\n'
        << "n >= 3 nu:         " << (rep.prop1_hypotheses.n_ge_3nu ? "yes" : "no") << '\n'
        << "n > (nu+1)^2/4:    " << (rep.prop1_hypotheses.n_gt_quarter_sq ? "yes" : "no") << '\n'
        << "radon bound:       " << (rep.radon_bound_ok ? "ok" : "violated") << " (rho = " << radon_number(r.dim()) << ")\n"
        << "classification:    " << to_string(rep.prop2_class) << '\n';
    if (rep.is_osserman)
        out << "duality:           " << (dual.passed() ? "ok" : "violated") << " (max residual "
            << std::max(dual.max_residual, dual.max_kernel_residual) << ", " << dual.violations.size() << " violations)\n";
    return code;
}

int cmd_recover(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    CurvatureTensor r;
    try {
        r = load_tensor(cfg.input_path);
    } catch (const Error& e) {
        return report_error(cfg, e, kFileError, out, err);
    }
    RecoveryConfig rc;
    rc.samples = cfg.samples;
    rc.rel_tol = cfg.rel_tol;
    rc.seed = cfg.seed;
    rc.force = cfg.force;

    RecoveryResult res;
    try {
        res = recover_clifford(r, rc);
    } catch (const Error& e) {
        switch (e.kind()) {
            case ErrorKind::HypothesesViolated: return report_error(cfg, e, kNegative, out, err);
            case ErrorKind::ObstructionDetected: return report_error(cfg, e, kObstruction, out, err);
            case ErrorKind::InvalidTensor:
            case ErrorKind::Io: return report_error(cfg, e, kFileError, out, err);
            default: return report_error(cfg, e, kStageFailure, out, err);
        }
    }

    const std::string base = (cfg.out.empty() ? stem_of(cfg.input_path) + ".recovered" : cfg.out);
    const std::string system_path = base + ".clifford.json";
    const std::string trace_path = base + ".trace.json";
    json trace_doc = envelope(cfg);
    trace_doc["input"] = cfg.input_path;
    trace_doc["trace"] = to_json(res.trace);
    trace_doc["reconstruction_residual"] = res.reconstruction_residual;
    try {
        save_clifford(system_path, res.system);
        std::ofstream os(trace_path);
        if (!os) throw Error(ErrorKind::Io, "cannot open " + trace_path + " for writing");
        os << trace_doc.dump(2) << '\n';
    } catch (const Error& e) {
        return report_error(cfg, e, kFileError, out, err);
    }

    if (cfg.structured()) {
        json doc = envelope(cfg);
        doc["status"] = "ok";
        doc["exit_code"] = kOk;
        doc["input"] = cfg.input_path;
        doc["report"] = to_json(res.report);
        doc["system"] = {{"n", res.system.n}, {"nu", res.system.nu()}, {"lambda0", res.system.lambda0}, {"mu", res.system.mu}};
        doc["reconstruction_residual"] = res.reconstruction_residual;
        doc["trace"] = to_json(res.trace);
        doc["files"] = {{"clifford", system_path}, {"trace", trace_path}};
        out << doc.dump(2) << '\n';
    } else {
        out.precision(6);
        out << "recovered Cliff(" << res.system.nu() << ") structure on R^" << res.system.n << ", lambda0 = "
            << res.system.lambda0 << '\n';
        out << "mu:                ";
        for (std::size_t s = 0; s < res.system.mu.size(); ++s) out << (s ? ", " : "") << res.system.mu[s];
        out << "\nreconstruction residual: " << res.reconstruction_residual << '\n'
            << "system:            " << system_path << '\n'
            << "trace:             " << trace_path << '\n';
    }
    return kOk;
}

int cmd_cayley(const RunConfig& cfg, const CayleyArgs& c, std::ostream& out, std::ostream& err) {
    json doc = envelope(cfg);
    doc["alpha"] = c.alpha;
    int code = kOk;
    try {
        // Spectrum of the Jacobi operator over sampled unit X.
        SeededRng rng(cfg.seed);
        SpectrumProfile first;
        double deviation = 0.0;
        Vector lo, hi;
        for (int s = 0; s < cfg.samples; ++s) {
            const CayleyPoint x = CayleyPoint::from_vector(rng.unit_vector(16));
            const Matrix rx = cayley_jacobi(x, c.alpha);
            const Matrix basis = orthogonal_complement(x.to_vector());
            const Vector vals = sym_eigen(basis.transpose() * rx * basis, 1e-10).eigenvalues;
            if (s == 0) {
                lo = hi = vals;
                first = cluster_spectrum({vals.data(), static_cast<std::size_t>(vals.size())}, cfg.rel_tol);
            }
            lo = lo.cwiseMin(vals);
            hi = hi.cwiseMax(vals);
        }
        deviation = (hi - lo).maxCoeff();
        doc["spectrum"] = {{"profile", to_json(first)}, {"max_deviation", deviation}, {"samples", cfg.samples}};

        if (c.emit_tensor) {
            const std::string path = (cfg.out.empty() ? std::string("cayley") : cfg.out) + ".tensor.json";
            save_tensor(path, cayley_tensor(c.alpha));
            doc["files"] = {{"tensor", path}};
        }
        if (!c.obstruction.empty()) {
            if (cfg.samples < 32) throw Error(ErrorKind::InvalidArgument, "the obstruction check needs --samples >= 32");
            const auto which = c.obstruction == "alpha" ? CayleyEigenspace::Alpha : CayleyEigenspace::AlphaQuarter;
            const int dim = obstruction_nullspace(which, cfg.samples, 1e-8, cfg.seed);
            doc["obstruction"] = {{"eigenspace", c.obstruction}, {"nullspace_dim", dim}, {"certified", dim == 0}};
            if (dim != 0) code = kNegative;
        }

        if (cfg.structured()) {
            doc["status"] = "ok";
            doc["exit_code"] = code;
            out << doc.dump(2) << '\n';
        } else {
            out.precision(6);
            out << "Cayley plane, alpha = " << c.alpha << '\n'
                << "Jacobi profile:    " << profile_text(first) << " (max deviation " << deviation << " over "
                << cfg.samples << " samples)\n";
            if (doc.contains("files")) out << "tensor:            " << doc["files"]["tensor"].get<std::string>() << '\n';
            if (doc.contains("obstruction"))
                out << "obstruction (" << c.obstruction << "): nullspace dimension "
                    << doc["obstruction"]["nullspace_dim"].get<int>()
                    << (code == kOk ? ", no linear operator maps X into the eigenspace\n" : "\n");
        }
    } catch (const Error& e) {
        return report_error(cfg, e, kFileError, out, err);
    }
    return code;
}

int cmd_radon(const RunConfig& cfg, int n, std::ostream& out, std::ostream& err) {
    int rho = 0;
    try {
        rho = radon_number(n);
    } catch (const Error& e) {
        return report_error(cfg, e, kFileError, out, err);
    }
    if (cfg.structured()) {
        json doc = envelope(cfg);
        doc["status"] = "ok";
        doc["exit_code"] = kOk;
        doc["n"] = n;
        doc["radon_number"] = rho;
        out << doc.dump(2) << '\n';
    } else {
        out << rho << '\n';
    }
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    GenerateArgs gen;
    CayleyArgs cay;
    int radon_n = 0;

    CLI::App app{"Osserman curvature tensors and Clifford structures"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.add_option("--samples", cfg.samples, "number of sampled unit vectors")->check(CLI::Range(2, 1 << 30));
    app.add_option("--tol", cfg.rel_tol, "relative clustering tolerance")->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "sampler seed");
    app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "structured"}));
    app.add_flag("--force", cfg.force, "attempt recovery outside the size hypotheses");
    app.add_option("--out", cfg.out, "output path base");

    auto* generate = app.add_subcommand("generate", "build a Clifford system and its curvature tensor");
    generate->fallthrough();
    generate->add_option("--n", gen.n, "dimension")->required()->check(CLI::PositiveNumber);
    generate->add_option("--nu", gen.nu, "number of generators")->check(CLI::NonNegativeNumber);
    generate->add_option("--lambda0", gen.lambda0, "eigenvalue of the complement");
    generate->add_option("--mu", gen.mu, "comma-separated generator eigenvalues")->delimiter(',');
    generate->add_flag("--rotate", gen.rotate, "conjugate by a seeded random rotation");

    auto* verify = app.add_subcommand("verify", "check the Osserman property of a tensor file");
    verify->fallthrough();
    verify->add_option("input", cfg.input_path, "tensor file")->required();

    auto* recover = app.add_subcommand("recover", "recover a Clifford structure from a tensor file");
    recover->fallthrough();
    recover->add_option("input", cfg.input_path, "tensor file")->required();

    auto* cayley = app.add_subcommand("cayley", "Cayley plane spectrum, tensor and obstruction");
    cayley->fallthrough();
    cayley->add_option("--alpha", cay.alpha, "curvature scale");
    cayley->add_flag("--emit-tensor", cay.emit_tensor, "write the polarized tensor to <out>.tensor.json");
    cayley->add_option("--obstruction", cay.obstruction, "eigenspace to certify")->check(CLI::IsMember({"alpha", "alpha4"}));

    auto* radon = app.add_subcommand("radon", "print the Radon number rho(N)");
    radon->fallthrough();
    radon->add_option("N", radon_n, "dimension")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    if (*generate) {
        cfg.command = "generate";
        return cmd_generate(cfg, gen, out, err);
    }
    if (*verify) {
        cfg.command = "verify";
        return cmd_verify(cfg, out, err);
    }
    if (*recover) {
        cfg.command = "recover";
        return cmd_recover(cfg, out, err);
    }
    if (*cayley) {
        cfg.command = "cayley";
        return cmd_cayley(cfg, cay, out, err);
    }
    cfg.command = "radon";
    return cmd_radon(cfg, radon_n, out, err);
}

}  // namespace osserman::cli
