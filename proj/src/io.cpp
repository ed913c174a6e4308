#include "osserman/io.hpp"

#include "osserman/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace osserman {

using nlohmann::json;

namespace {

constexpr const char* kTensorFormat = "osserman.tensor";
constexpr const char* kCliffordFormat = "osserman.clifford";

std::string num(double v) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "cannot serialize a non-finite value");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_array(std::ostream& os, const double* data, std::size_t count, std::size_t per_line) {
    os << '[';
    for (std::size_t i = 0; i < count; ++i) {
        if (i) os << (per_line && i % per_line == 0 ? ",\n    " : ", ");
        os << num(data[i]);
    }
    os << ']';
}

json parse(std::istream& is) {
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, std::string("malformed document: ") + e.what());
    }
}

void expect_format(const json& doc, const char* format) {
    if (!doc.is_object()) throw Error(ErrorKind::Io, "document is not an object");
    if (doc.contains("format") && doc["format"] != format)
        throw Error(ErrorKind::Io, std::string("expected format ") + format);
    if (doc.contains("version") && doc["version"] != kSchemaVersion)
        throw Error(ErrorKind::Io, "unsupported document version");
}

template <typename T>
T field(const json& doc, const char* key) {
    if (!doc.contains(key)) throw Error(ErrorKind::Io, std::string("missing field '") + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorKind::Io, std::string("field '") + key + "' has the wrong type");
    }
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream os(p);
    if (!os) throw Error(ErrorKind::Io, "cannot open " + p.string() + " for writing");
    return os;
}

std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream is(p);
    if (!is) throw Error(ErrorKind::Io, "cannot open " + p.string());
    return is;
}

}  // namespace

void write_tensor(std::ostream& os, const CurvatureTensor& r) {
    const auto n = static_cast<std::size_t>(r.dim());
    os << "{\n  \"format\": \"" << kTensorFormat << "\",\n  \"version\": " << kSchemaVersion << ",\n  \"n\": " << n
       << ",\n  \"comps\": ";
    write_array(os, r.comps().data(), r.comps().size(), n);
    os << "\n}\n";
}

void write_clifford(std::ostream& os, const CliffordSystem& c) {
    const auto n = static_cast<std::size_t>(c.n);
    os << "{\n  \"format\": \"" << kCliffordFormat << "\",\n  \"version\": " << kSchemaVersion << ",\n  \"n\": " << n
       << ",\n  \"nu\": " << c.nu() << ",\n  \"lambda0\": " << num(c.lambda0) << ",\n  \"mu\": ";
    write_array(os, c.mu.data(), c.mu.size(), 0);
    os << ",\n  \"J\": [";
    for (std::size_t s = 0; s < c.J.size(); ++s) {
        // Eigen is column-major; files are row-major.
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = c.J[s];
        os << (s ? ",\n    " : "\n    ");
        write_array(os, rm.data(), n * n, n);
    }
    os << (c.J.empty() ? "]" : "\n  ]") << "\n}\n";
}

CurvatureTensor read_tensor(std::istream& is) {
    const json doc = parse(is);
    expect_format(doc, kTensorFormat);
    const int n = field<int>(doc, "n");
    if (n < 1) throw Error(ErrorKind::Io, "n must be positive");
    auto comps = field<std::vector<double>>(doc, "comps");
    for (double v : comps)
        if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "tensor has non-finite components");
    CurvatureTensor r(n, std::move(comps));
    const auto v = validate_tensor(r);
    if (!v.passed) throw Error(ErrorKind::InvalidTensor, "tensor fails symmetry validation (worst residual " + num(v.worst()) + ")");
    return r;
}

CliffordSystem read_clifford(std::istream& is) {
    const json doc = parse(is);
    expect_format(doc, kCliffordFormat);
    const int n = field<int>(doc, "n");
    if (n < 1) throw Error(ErrorKind::Io, "n must be positive");
    const auto lambda0 = field<double>(doc, "lambda0");
    auto mu = field<std::vector<double>>(doc, "mu");
    const auto flat = field<std::vector<std::vector<double>>>(doc, "J");
    if (doc.contains("nu") && field<int>(doc, "nu") != static_cast<int>(flat.size()))
        throw Error(ErrorKind::Io, "nu disagrees with the number of generators");
    std::vector<Matrix> J;
    for (const auto& f : flat) {
        if (f.size() != static_cast<std::size_t>(n) * n) throw Error(ErrorKind::Io, "generator has the wrong size");
        J.push_back(Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(f.data(), n, n));
    }
    return make_clifford_system(n, lambda0, std::move(mu), std::move(J));
}

void save_tensor(const std::filesystem::path& p, const CurvatureTensor& r) {
    auto os = open_out(p);
    write_tensor(os, r);
}

void save_clifford(const std::filesystem::path& p, const CliffordSystem& c) {
    auto os = open_out(p);
    write_clifford(os, c);
}

CurvatureTensor load_tensor(const std::filesystem::path& p) {
    auto is = open_in(p);
    return read_tensor(is);
}

CliffordSystem load_clifford(const std::filesystem::path& p) {
    auto is = open_in(p);
    return read_clifford(is);
}

json to_json(const SpectrumProfile& p) {
    json arr = json::array();
    for (const auto& c : p) arr.push_back({{"eigenvalue", c.value}, {"multiplicity", c.multiplicity}});
    return arr;
}

json to_json(const OssermanReport& r) {
    return {{"is_osserman", r.is_osserman},
            {"profile", to_json(r.profile)},
            {"max_deviation", r.max_deviation},
            {"samples_used", r.samples_used},
            {"m0", r.m0},
            {"nu", r.nu},
            {"prop1_hypotheses", {{"n_ge_3nu", r.prop1_hypotheses.n_ge_3nu}, {"n_gt_quarter_sq", r.prop1_hypotheses.n_gt_quarter_sq}}},
            {"radon_bound_ok", r.radon_bound_ok},
            {"prop2_class", std::string(to_string(r.prop2_class))}};
}

json to_json(const DualityReport& r) {
    json violations = json::array();
    for (const auto& v : r.violations)
        violations.push_back({{"sample", v.sample},
                              {"kernel_variant", v.kernel_variant},
                              {"eigenvalue", v.eigenvalue},
                              {"residual", v.residual}});
    return {{"passed", r.passed()},
            {"pairs_tested", r.pairs_tested},
            {"kernel_pairs_tested", r.kernel_pairs_tested},
            {"max_residual", r.max_residual},
            {"max_kernel_residual", r.max_kernel_residual},
            {"violations", violations}};
}

json to_json(const std::vector<TraceStage>& trace) {
    json arr = json::array();
    for (const auto& t : trace) {
        json metrics = json::object();
        for (const auto& [k, v] : t.metrics) metrics[k] = v;
        json entry = {{"stage", t.stage}, {"metrics", metrics}};
        if (!t.note.empty()) entry["note"] = t.note;
        arr.push_back(entry);
    }
    return arr;
}

}  // namespace osserman
