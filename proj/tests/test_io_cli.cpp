#include "cli.hpp"
#include "osserman/cayley.hpp"
#include "osserman/errors.hpp"
#include "osserman/io.hpp"
#include "support.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace osserman;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "osserman");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

// Fresh scratch directory per test case.
struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("osserman_test_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

}  // namespace

TEST_CASE("tensor documents round trip exactly") {
    const auto r = curvature_from_clifford(testing::random_system(8, 0.3, {1.7, -2.1}, 1));
    std::stringstream ss;
    write_tensor(ss, r);
    const auto back = read_tensor(ss);
    CHECK(back.dim() == 8);
    CHECK(back.comps() == r.comps());
}

TEST_CASE("Clifford documents round trip exactly") {
    const auto sys = testing::random_system(12, 0.25, {1.0, 3.0, 3.0}, 2);
    std::stringstream ss;
    write_clifford(ss, sys);
    const auto doc = nlohmann::json::parse(ss.str());
    CHECK(doc["nu"] == 3);
    CHECK(doc["J"][0].size() == 144u);
    // row-major: entry (0, 1) is the second number
    CHECK(doc["J"][1][1].get<double>() == sys.J[1](0, 1));
    const auto back = read_clifford(ss);
    CHECK(back.lambda0 == sys.lambda0);
    CHECK(back.mu == sys.mu);
    for (int s = 0; s < 3; ++s) CHECK(back.J[static_cast<std::size_t>(s)] == sys.J[static_cast<std::size_t>(s)]);
}

TEST_CASE("loader rejects malformed and asymmetric tensors") {
    auto kind = [](const std::string& text) {
        std::istringstream is(text);
        try {
            read_tensor(is);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidArgument;
    };
    CHECK(kind("{\"n\": 2, \"comps\": [1, 2") == ErrorKind::Io);
    CHECK(kind("{\"comps\": []}") == ErrorKind::Io);
    CHECK(kind("{\"n\": 2, \"comps\": [1, 2, 3]}") == ErrorKind::ShapeMismatch);
    std::string ones = "{\"n\": 2, \"comps\": [1";
    for (int i = 1; i < 16; ++i) ones += ", 1";
    CHECK(kind(ones + "]}") == ErrorKind::InvalidTensor);
    CHECK(kind("{\"format\": \"osserman.clifford\", \"n\": 1, \"comps\": [0]}") == ErrorKind::Io);
    CHECK_THROWS_AS(load_tensor("/nonexistent/file.json"), Error);
}

TEST_CASE("report documents use the report field names") {
    const auto rep = osserman_check(sphere_tensor(4), 10);
    const auto j = to_json(rep);
    for (const char* key : {"is_osserman", "profile", "max_deviation", "samples_used", "m0", "nu", "prop1_hypotheses",
                            "radon_bound_ok", "prop2_class"})
        CHECK(j.contains(key));
    CHECK(j["profile"][0]["multiplicity"] == 3);
}

TEST_CASE("cli generate") {
    Scratch tmp("generate");
    auto r = run_cli({"generate", "--n", "8", "--nu", "3", "--lambda0", "1", "--mu", "2,2,2", "--out", tmp / "c"});
    CHECK(r.code == 0);
    const auto t = load_tensor(tmp / "c.tensor.json");
    const auto s = load_clifford(tmp / "c.clifford.json");
    CHECK(validate_clifford(s).passed);
    CHECK(testing::max_abs_diff(curvature_from_clifford(s), t) == 0.0);

    CHECK(run_cli({"generate", "--n", "16", "--nu", "9", "--mu", "2,2,2,2,2,2,2,2,2", "--out", tmp / "x"}).code == 2);
    CHECK(run_cli({"generate", "--n", "4", "--nu", "1", "--lambda0", "1", "--mu", "1", "--out", tmp / "x"}).code == 3);
    CHECK(run_cli({"generate", "--n", "4", "--nu", "2", "--mu", "3", "--out", tmp / "x"}).code == 3);

    r = run_cli({"generate", "--n", "4", "--nu", "0", "--lambda0", "1", "--out", tmp / "s"});
    CHECK(r.code == 0);
    CHECK(testing::max_abs_diff(load_tensor(tmp / "s.tensor.json"), sphere_tensor(4)) == 0.0);
}

TEST_CASE("cli verify") {
    Scratch tmp("verify");
    save_tensor(tmp / "sphere.tensor.json", sphere_tensor(5));
    auto r = run_cli({"verify", tmp / "sphere.tensor.json", "--format", "structured"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["schema_version"] == kSchemaVersion);
    CHECK(doc["report"]["is_osserman"] == true);
    CHECK(doc["report"]["profile"][0]["multiplicity"] == 4);

    save_tensor(tmp / "block.tensor.json", testing::block_sphere(3, 3, 1.0, 2.0));
    CHECK(run_cli({"verify", tmp / "block.tensor.json"}).code == 1);

    std::ofstream(tmp / "bad.json") << "{\"n\": 3, \"comps\": [0, 1]}";
    CHECK(run_cli({"verify", tmp / "bad.json"}).code == 4);
    CHECK(run_cli({"verify", tmp / "missing.json"}).code == 4);

    // identical runs give identical documents
    CHECK(run_cli({"verify", tmp / "sphere.tensor.json", "--format", "structured"}).out == r.out);
}

TEST_CASE("cli cayley and verify of its tensor") {
    Scratch tmp("cayley");
    auto r = run_cli({"cayley", "--emit-tensor", "--out", tmp / "cay", "--samples", "20"});
    CHECK(r.code == 0);
    r = run_cli({"verify", tmp / "cay.tensor.json", "--format", "structured"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    const auto& prof = doc["report"]["profile"];
    REQUIRE(prof.size() == 2u);
    CHECK(prof[0]["eigenvalue"].get<double>() == doctest::Approx(0.25));
    CHECK(prof[0]["multiplicity"] == 8);
    CHECK(prof[1]["multiplicity"] == 7);
    CHECK(doc["report"]["nu"] == 7);

    r = run_cli({"cayley", "--obstruction", "alpha4", "--samples", "64", "--format", "structured"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["obstruction"]["nullspace_dim"] == 0);
    CHECK(run_cli({"cayley", "--obstruction", "alpha", "--samples", "10"}).code == 4);

    CHECK(run_cli({"recover", tmp / "cay.tensor.json", "--out", tmp / "rec"}).code == 1);
    r = run_cli({"recover", tmp / "cay.tensor.json", "--force", "--out", tmp / "rec", "--format", "structured"});
    CHECK(r.code == 5);
    CHECK(nlohmann::json::parse(r.out)["error"]["kind"] == "ObstructionDetected");
}

TEST_CASE("cli recover") {
    Scratch tmp("recover");
    CHECK(run_cli({"generate", "--n", "8", "--nu", "2", "--lambda0", "1", "--mu", "3,5", "--rotate", "--out", tmp / "c"}).code == 0);
    auto r = run_cli({"recover", tmp / "c.tensor.json", "--format", "structured"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["reconstruction_residual"].get<double>() < 1e-8);
    const auto sys = load_clifford(tmp / "c.recovered.clifford.json");
    CHECK(testing::max_abs_diff(curvature_from_clifford(sys, CliffordTolerance::uniform(1e-8)), load_tensor(tmp / "c.tensor.json")) < 1e-8);
    std::ifstream trace_file(tmp / "c.recovered.trace.json");
    const auto trace = nlohmann::json::parse(trace_file);
    CHECK(trace["trace"][0]["stage"] == "osserman_check");

    save_tensor(tmp / "zero.tensor.json", CurvatureTensor(4));
    r = run_cli({"recover", tmp / "zero.tensor.json", "--format", "structured"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["system"]["nu"] == 0);

    save_tensor(tmp / "block.tensor.json", testing::block_sphere(3, 3, 1.0, 2.0));
    r = run_cli({"recover", tmp / "block.tensor.json", "--format", "structured"});
    CHECK(r.code == 6);
    CHECK(nlohmann::json::parse(r.out)["error"]["stage"] == "osserman_check");
}

TEST_CASE("cli radon and argument errors") {
    auto r = run_cli({"radon", "16"});
    CHECK(r.code == 0);
    CHECK(r.out == "9\n");
    CHECK(run_cli({"radon", "0"}).code == 4);
    CHECK(run_cli({}).code != 0);
    CHECK(run_cli({"verify", "x.json", "--format", "yaml"}).code != 0);
    CHECK(run_cli({"verify", "x.json", "--samples", "1"}).code != 0);
}
