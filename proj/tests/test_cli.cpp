#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "monocensus/cli.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace monocensus;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Scratch directory, removed on scope exit.
struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("monocensus_cli_" + std::to_string(std::rand()) + "_" +
                                           std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(dir / name, std::ios::binary) << text;
        return (dir / name).string();
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::string registry_json(std::initializer_list<double> xs) {
    nlohmann::json sols = nlohmann::json::array();
    for (double x : xs) sols.push_back({{x, 0.0}});
    return nlohmann::json{{"base", {{1.0, 0.0}}}, {"dedup_tol", 1e-6}, {"solutions", sols}}.dump();
}

}  // namespace

TEST_CASE("estimate on x^2 - p from a user seed") {
    Scratch s;
    const auto sys = s.write("sqrt.json", testing::kSquareRootJson);
    const auto seed = s.write("seed.json", R"({"x": [[1, 0]], "p": [[1, 0]]})");
    Result r = invoke({"estimate", "--system", sys, "--seed-solution", seed, "--out-prefix", s.path("run"),
                       "--rng-seed", "3", "--threads", "1"});
    CHECK(r.code == cli::kExitComplete);
    CHECK(r.out.find("solutions: 2") != std::string::npos);
    CHECK(r.out.find("trace: Complete") != std::string::npos);

    auto reg = nlohmann::json::parse(slurp(s.path("run.registry.json")));
    CHECK(reg["solutions"].size() == 2);
    auto cert = nlohmann::json::parse(slurp(s.path("run.certificate.json")));
    CHECK(cert["verdict"] == "Complete");
    CHECK(cert["residual"].get<double>() < 1e-8);

    const std::string report = slurp(s.path("run.report.csv"));
    CHECK(report.rfind("loop_index,known_count,n_start,n_end,n_overlap,n_new,n_failures,lp_beta,", 0) == 0);
    CHECK(report.find("# stopping_reason=RunTraceTest") != std::string::npos);
    CHECK(report.find("# trace_verdict=Complete") != std::string::npos);
    CHECK(report.find("runtime") == std::string::npos);
}

TEST_CASE("reports are byte-identical for identical flags") {
    Scratch s;
    const auto sys = s.write("bezout.json", serialize_system(testing::dense_coefficient_system({2, 2})));
    auto run = [&](const std::string& prefix, const std::string& format) {
        return invoke({"estimate", "--system", sys, "--out-prefix", s.path(prefix), "--rng-seed", "11",
                       "--format", format, "--threads", "2"});
    };
    for (const std::string format : {"csv", "json"}) {
        Result a = run("a", format);
        Result b = run("b", format);
        CHECK(a.code == b.code);
        CHECK(slurp(s.path("a.report." + format)) == slurp(s.path("b.report." + format)));
        CHECK(slurp(s.path("a.registry.json")) == slurp(s.path("b.registry.json")));
        CHECK(slurp(s.path("a.certificate.json")) == slurp(s.path("b.certificate.json")));
    }
    auto doc = nlohmann::json::parse(slurp(s.path("a.report.json")));
    CHECK(doc["columns"].size() == 16);
    CHECK(doc["rows"].size() >= 1);
    int known = 0;
    for (const auto& row : doc["rows"]) {
        CHECK(row["known_count"].get<int>() >= known);
        known = row["known_count"].get<int>();
    }
    CHECK(known == 4);
}

TEST_CASE("runtime footer is opt-in") {
    Scratch s;
    const auto sys = s.write("sqrt.json", testing::kSquareRootJson);
    const auto seed = s.write("seed.json", R"({"x": [[1, 0]], "p": [[1, 0]]})");
    Result r = invoke({"estimate", "--system", sys, "--seed-solution", seed, "--out-prefix", s.path("t"),
                       "--rng-seed", "2", "--record-runtime"});
    CHECK(r.code == cli::kExitComplete);
    CHECK(slurp(s.path("t.report.csv")).find("# runtime_s=") != std::string::npos);
}

TEST_CASE("an early stop on a half fiber is reported as incomplete") {
    // With seed 1 the three loops after the seed all miss the other root.
    Scratch s;
    const auto sys = s.write("sqrt.json", testing::kSquareRootJson);
    const auto seed = s.write("seed.json", R"({"x": [[1, 0]], "p": [[1, 0]]})");
    Result r = invoke({"estimate", "--system", sys, "--seed-solution", seed, "--out-prefix", s.path("h"),
                       "--rng-seed", "1"});
    CHECK(r.out.find("solutions: 1") != std::string::npos);
    CHECK(r.code == cli::kExitIncomplete);
    CHECK(slurp(s.path("h.report.csv")).find("# trace_verdict=Incomplete") != std::string::npos);
}

TEST_CASE("estimate failure modes") {
    Scratch s;
    const auto bad = s.write("bad.json", R"({"vars": ["x"], "polys": [[{"c": [1, 0], "v": {"y": 1}}]]})");
    Result parse = invoke({"estimate", "--system", bad, "--out-prefix", s.path("p")});
    CHECK(parse.code == cli::kExitParse);
    CHECK(parse.err.find("polys[0][0].v.y") != std::string::npos);

    const auto junk = s.write("junk.json", "{not json");
    CHECK(invoke({"estimate", "--system", junk, "--out-prefix", s.path("j")}).code == cli::kExitParse);

    const auto sys = s.write("sqrt.json", testing::kSquareRootJson);
    const auto wrong = s.write("wrong.json", R"({"x": [[2, 0]], "p": [[1, 0]]})");
    CHECK(invoke({"estimate", "--system", sys, "--seed-solution", wrong, "--out-prefix", s.path("w")}).code ==
          cli::kExitSeed);
    CHECK(invoke({"estimate", "--system", sys, "--seed-strategy", "user", "--out-prefix", s.path("u")}).code ==
          cli::kExitSeed);

    // Six roots cannot all be found and confirmed in one loop.
    const auto bez = s.write("bez.json", serialize_system(testing::dense_coefficient_system({2, 3})));
    Result abort = invoke({"estimate", "--system", bez, "--max-loops", "1", "--out-prefix", s.path("a")});
    CHECK(abort.code == cli::kExitAbort);
    CHECK(slurp(s.path("a.report.csv")).find("# stopping_reason=Abort") != std::string::npos);

    CHECK(invoke({"estimate", "--system", s.path("missing.json")}).code == cli::kExitUsage);
    CHECK(invoke({"estimate", "--system", sys, "--format", "xml"}).code == cli::kExitUsage);
    CHECK(invoke({}).code == cli::kExitUsage);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("trace subcommand on the example fiber") {
    Scratch s;
    const auto sys = s.write("ex.json", testing::kTraceExampleJson);
    const double h = 1.0 / std::sqrt(2.0);
    const auto full = s.write("full.json", registry_json({h, -h}));
    const auto half = s.write("half.json", registry_json({h}));

    Result ok = invoke({"trace", "--system", sys, "--registry", full, "--out-prefix", s.path("full")});
    CHECK(ok.code == cli::kExitComplete);
    auto cert = nlohmann::json::parse(slurp(s.path("full.certificate.json")));
    CHECK(cert["verdict"] == "Complete");
    CHECK(cert["fiber_count"] == 2);
    CHECK(cert["other_count"] == 1);
    CHECK(cert["witness_size"] == 3);

    Result partial = invoke({"trace", "--system", sys, "--registry", half, "--out-prefix", s.path("half")});
    CHECK(partial.code == cli::kExitIncomplete);

    CHECK(invoke({"trace", "--system", sys, "--registry", s.path("none.json")}).code == cli::kExitUsage);
    const auto off = s.write("off.json", registry_json({0.5}));
    CHECK(invoke({"trace", "--system", sys, "--registry", off, "--out-prefix", s.path("off")}).code ==
          cli::kExitParse);
    const auto empty = s.write("empty.json", registry_json({}));
    CHECK(invoke({"trace", "--system", sys, "--registry", empty, "--out-prefix", s.path("e")}).code ==
          cli::kExitTraceFailure);
}

TEST_CASE("simulate subcommand") {
    Scratch s;
    Result r = invoke({"simulate", "--population", "1442", "--trials", "100", "--loops", "12", "--estimator",
                       "chapman", "--threads", "1"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("loop_index,coverage,median_rel_error,frac_known\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 13);

    Result again = invoke({"simulate", "--population", "1442", "--trials", "100", "--loops", "12", "--threads", "3"});
    CHECK(again.out == r.out);

    Result big = invoke({"simulate", "--population", "5754", "--trials", "100", "--loops", "5", "--estimator",
                         "schnabel", "--out", s.path("cov.csv")});
    CHECK(big.code == 0);
    CHECK(slurp(s.path("cov.csv")).rfind("loop_index,", 0) == 0);

    CHECK(invoke({"simulate", "--trials", "0"}).code == cli::kExitUsage);
    CHECK(invoke({"simulate", "--estimator", "bayes"}).code == cli::kExitUsage);
    CHECK(invoke({"simulate", "--population", "5", "--initial-known", "9", "--trials", "100"}).code ==
          cli::kExitUsage);
}
