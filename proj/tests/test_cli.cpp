#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <algorithm>
#include <string>

#ifndef SNLP_CLI_PATH
#define SNLP_CLI_PATH "./snlp"
#endif
#ifndef SNLP_TEST_DATA
#define SNLP_TEST_DATA "."
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string out_file = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                                 "/snlp_cli_test_out.txt";
    const std::string cmd = std::string(SNLP_CLI_PATH) + " " + args + " >" + out_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(status);
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

std::string model(const char* name) { return std::string(SNLP_TEST_DATA) + "/" + name; }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("check subcommand passes on the bundled models", "[cli]") {
    for (const char* name : {"bm.json", "kou.json"}) {
        const RunResult r = run("check --model " + model(name));
        INFO(r.output);
        CHECK(r.exit_code == 0);
        CHECK(r.output.find("PASS") != std::string::npos);
        CHECK(r.output.find("FAIL") == std::string::npos);
    }
}

TEST_CASE("malformed or invalid model exits 1", "[cli]") {
    CHECK(run("check --model " + model("broken.json")).exit_code == 1);
    CHECK(run("check --model " + model("bad_weights.json")).exit_code == 1);
    CHECK(run("check --model /nonexistent/m.json").exit_code == 1);
}

TEST_CASE("unknown flags are hard errors", "[cli]") {
    CHECK(run("check --model " + model("bm.json") + " --frobnicate 3").exit_code != 0);
}

TEST_CASE("scale emits a W/Z grid", "[cli]") {
    const RunResult r = run("scale --model " + model("kou.json") + " --q 1 --xmax 2 --grid 5");
    CHECK(r.exit_code == 0);
    CHECK(r.output.rfind("x,W,Z\n", 0) == 0);
    CHECK(std::count(r.output.begin(), r.output.end(), '\n') == 6);
}

TEST_CASE("density emits metadata and is byte-identical across runs", "[cli]") {
    const std::string args = "density --model " + model("kou.json") +
                             " --p 1 --q 0.5 --b 0.4 --x 0.1 --grid 33";
    const RunResult r1 = run(args);
    const RunResult r2 = run(args);
    CHECK(r1.exit_code == 0);
    CHECK(r1.output == r2.output);
    CHECK(r1.output.find("# interval=(-inf,0.40000000000000002)\n") != std::string::npos);
    CHECK(r1.output.find("y,density\n") != std::string::npos);
    // finite-interval selection via --a
    const RunResult r3 = run("density --model " + model("kou.json") +
                             " --p 1 --q 0.5 --a 0 --b 1 --x 0.5 --grid 17");
    CHECK(r3.exit_code == 0);
    CHECK(r3.output.find("# interval=(0,1)\n") != std::string::npos);
}

TEST_CASE("price writes a curve CSV to a file", "[cli]") {
    const std::string out = "cli_price_out.csv";
    std::remove(out.c_str());
    const RunResult r = run("price --model " + model("rn_bm.json") +
                            " --spot 100 --strike 100 --barrier 80 --rho 2 --rate 0.05"
                            " --maturities 0.5,1 --out " + out);
    INFO(r.output);
    CHECK(r.exit_code == 0);
    const std::string text = slurp(out);
    CHECK(text.rfind("T,price,error_estimate,method\n", 0) == 0);
    CHECK(text.find("talbot") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    std::remove(out.c_str());
}

TEST_CASE("price against a non-martingale model warns on stderr", "[cli]") {
    const RunResult r = run("price --model " + model("kou.json") +
                            " --spot 100 --strike 100 --barrier 80 --rho 1 --rate 0.05"
                            " --maturities 1");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("not risk-neutral") != std::string::npos);
}

TEST_CASE("simulate is deterministic under a fixed seed", "[cli]") {
    const std::string args = "simulate --model " + model("rn_bm.json") +
                             " --spot 100 --strike 100 --barrier 90 --rho 1 --rate 0.05"
                             " --maturities 0.5 --paths 2000 --seed 42";
    const RunResult r1 = run(args);
    const RunResult r2 = run(args);
    CHECK(r1.exit_code == 0);
    CHECK(r1.output == r2.output);
    CHECK(r1.output.rfind("T,estimate,std_error,n_effective\n", 0) == 0);

    const RunResult joint = run("simulate --model " + model("bm.json") +
                                " --p 1 --q 0.5 --a 0 --b 1 --x 0.5 --grid 10 --paths 2000"
                                " --seed 7");
    CHECK(joint.exit_code == 0);
    CHECK(joint.output.rfind("y,density,std_error\n", 0) == 0);
}

TEST_CASE("price exits 2 on abscissa violations", "[cli]") {
    // maturities long enough that Gaver-Stehfest nodes would sit left of
    // psi(1): the shift prevents it, so instead force a numerical failure via
    // a noisy point without --force
    const RunResult r = run("price --model " + model("kou.json") +
                            " --spot 100 --strike 5000 --barrier 90 --rho 1"
                            " --maturities 0.02");
    CHECK(r.exit_code == 2);
    const RunResult forced = run("price --model " + model("kou.json") +
                                 " --spot 100 --strike 5000 --barrier 90 --rho 1"
                                 " --maturities 0.02 --force");
    CHECK(forced.exit_code == 0);
}
