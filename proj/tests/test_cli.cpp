#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmap/cli.hpp"

using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "qmap_cli");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = qmap::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<double> column(const std::string& csv, int index) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::vector<double> out;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string cell;
        for (int i = 0; i <= index; ++i) std::getline(row, cell, ',');
        out.push_back(std::stod(cell));
    }
    return out;
}

}  // namespace

TEST_CASE("verify the series") {
    const Result r = run({"verify", "--family", "series", "--n", "2", "--points", "10", "--seed", "7"});
    CHECK(r.code == qmap::cli::Ok);
    const json j = json::parse(r.out);
    CHECK(j["schema"] == "1");
    CHECK(j["pass"] == true);
    CHECK(j["checks"].contains("S_W:omega-closed"));
}

TEST_CASE("verify fails under an impossible tolerance") {
    const Result r = run({"verify", "--n", "1", "--points", "1", "--tol", "0"});
    CHECK(r.code == qmap::cli::VerificationFailed);
}

TEST_CASE("scan-sw n = 1 is constant") {
    const Result r = run({"scan-sw", "--n", "1", "--grid", "32", "--format", "csv"});
    CHECK(r.code == qmap::cli::Ok);
    CHECK(r.out.rfind("n,x,hval,scal,normR,S2,SW\n", 0) == 0);
    const std::vector<double> sw = column(r.out, 6);
    REQUIRE(sw.size() == 32);
    const auto [lo, hi] = std::minmax_element(sw.begin(), sw.end());
    CHECK(*hi - *lo <= 1e-12);
    const Result j = run({"scan-sw", "--n", "2", "--grid", "16"});
    CHECK(json::parse(j.out)["verdict"] == "nonconstant");
}

TEST_CASE("classify family d") {
    const Result r = run({"classify", "--family", "d", "--samples", "100"});
    CHECK(r.code == qmap::cli::Ok);
    const json j = json::parse(r.out);
    CHECK(j["all_hyperbolic"] == true);
    CHECK(j["points"].size() == 100);
}

TEST_CASE("aut-check") {
    const Result r = run({"aut-check", "--n", "2", "--points", "5"});
    CHECK(r.code == qmap::cli::Ok);
    const json j = json::parse(r.out);
    CHECK(j["orbit_rank"] == 11);
    CHECK(j["matrices"][0].contains("symplectic_residual"));
    CHECK(j["matrices"][0].contains("cone_residual"));
}

TEST_CASE("invariants from a cubic file and thread independence") {
    const std::string path = "qmap_cli_test_cubic.json";
    {
        std::ofstream f(path);
        f << R"({"n": 2, "monomials": [{"ijk": [0, 0, 0], "coeff": 1}, {"ijk": [0, 1, 1], "coeff": -1}],
                 "base_point": [1.0, 0.0]})";
    }
    setenv("QMAP_THREADS", "1", 1);
    const Result a = run({"invariants", "--cubic-file", path, "--points", "6", "--seed", "3"});
    setenv("QMAP_THREADS", "4", 1);
    const Result b = run({"invariants", "--cubic-file", path, "--points", "6", "--seed", "3"});
    unsetenv("QMAP_THREADS");
    std::remove(path.c_str());
    CHECK(a.code == qmap::cli::Ok);
    CHECK(a.out == b.out);
    const json j = json::parse(a.out);
    REQUIRE(j["reports"].size() == 6);
    for (const auto& rep : j["reports"])
        for (const char* key : {"point", "scal_psk", "norm_R_psk", "S2", "S_W", "norm_R_qk", "residuals"})
            CHECK(rep.contains(key));
}

TEST_CASE("configuration errors") {
    for (const auto& args : std::vector<std::vector<std::string>>{{},
                                                                  {"frobnicate"},
                                                                  {"verify", "--family", "zz"},
                                                                  {"classify", "--family", "I", "--n", "3", "--k", "1"},
                                                                  {"invariants", "--cubic-file", "/nonexistent.json"},
                                                                  {"scan-sw", "--grid", "4"},
                                                                  {"scan-sw", "--format", "xml"}}) {
        const Result r = run(args);
        CHECK(r.code == qmap::cli::ConfigError);
        const json e = json::parse(r.err.substr(0, r.err.find('\n')));
        CHECK(e.contains("error"));
        CHECK(e.contains("message"));
    }
}
