#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

std::string g_cli;  // path to the casimir binary, passed as argv[1]
int g_seq = 0;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

std::string temp_dir() {
    const char* base = std::getenv("TMPDIR");
    std::string dir = std::string(base ? base : "/tmp") + "/casimir_cli_test_" +
                      std::to_string(getpid()) + "_" + std::to_string(g_seq++);
    std::string cmd = "mkdir -p " + dir;
    REQUIRE(std::system(cmd.c_str()) == 0);
    return dir;
}

RunResult run(const std::string& args, const std::string& dir,
              const std::string& env = "") {
    const std::string log = dir + "/run.log";
    const std::string cmd = env + " " + g_cli + " " + args + " > " + log + " 2>&1";
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    std::ifstream in(log, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(bool(in), "missing file: " << path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string basic_config(const std::string& out_dir, const std::string& extra = "") {
    return std::string("{\"alpha\":[0.4,0.3,0.3],\"lambda\":1.0,\"rho_offset\":1.0,"
                       "\"volumes\":{\"v0\":1000,\"count\":11},\"out\":\"") +
           out_dir + "\"" + (extra.empty() ? "" : "," + extra) + "}";
}

}  // namespace

TEST_CASE("solve-mu produces CSV + JSON sidecar and exits 0") {
    const std::string dir = temp_dir();
    write_file(dir + "/cfg.json", basic_config(dir + "/out"));
    const RunResult r = run("solve-mu --config " + dir + "/cfg.json", dir);
    CHECK_MESSAGE(r.exit_code == 0, r.output);

    const std::string csv = slurp(dir + "/out/solve_mu.csv");
    CHECK(csv.rfind("volume,beta_mu,minus_beta_mu_v_delta\n", 0) == 0);
    CHECK(csv.find('\r') == std::string::npos);  // LF only
    // header + 8 data rows, trailing newline
    int lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 12);
    CHECK(csv.back() == '\n');

    const nlohmann::json side = nlohmann::json::parse(slurp(dir + "/out/solve_mu.json"));
    CHECK(side["command"] == "solve-mu");
    CHECK(side["constant_fit"].contains("extrapolated_limit"));
    CHECK(side["constant_fit"]["converged"].get<bool>());
    CHECK(side["config"]["volumes"]["count"] == 11);
}

TEST_CASE("CSV values carry 17 significant digits and round-trip") {
    const std::string dir = temp_dir();
    write_file(dir + "/cfg.json", basic_config(dir + "/out"));
    REQUIRE(run("solve-mu --config " + dir + "/cfg.json", dir).exit_code == 0);
    std::istringstream csv(slurp(dir + "/out/solve_mu.csv"));
    std::string line;
    std::getline(csv, line);  // header
    int rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            const double v = std::stod(cell);
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            CHECK(cell == buf);  // shortest round-trip representation
        }
    }
    CHECK(rows == 11);
}

TEST_CASE("outputs are deterministic across runs and thread counts") {
    const std::string dir = temp_dir();
    write_file(dir + "/a.json", basic_config(dir + "/a"));
    write_file(dir + "/b.json", basic_config(dir + "/b"));
    REQUIRE(run("solve-mu --config " + dir + "/a.json", dir, "CASIMIR_THREADS=1").exit_code == 0);
    REQUIRE(run("solve-mu --config " + dir + "/b.json", dir, "CASIMIR_THREADS=7").exit_code == 0);
    CHECK(slurp(dir + "/a/solve_mu.csv") == slurp(dir + "/b/solve_mu.csv"));

    // sidecars differ only in the echoed out dir; compare fits
    const auto ja = nlohmann::json::parse(slurp(dir + "/a/solve_mu.json"));
    const auto jb = nlohmann::json::parse(slurp(dir + "/b/solve_mu.json"));
    CHECK(ja["constant_fit"] == jb["constant_fit"]);
    CHECK(ja["exponent_fit"] == jb["exponent_fit"]);
}

TEST_CASE("command-line overrides replace config values") {
    const std::string dir = temp_dir();
    write_file(dir + "/cfg.json", basic_config(dir + "/ignored"));
    const RunResult r = run("solve-mu --config " + dir + "/cfg.json --alpha 0.5,0.25,0.25 "
                            "--volumes 2000,11 --out " + dir + "/o2",
                            dir);
    CHECK_MESSAGE(r.exit_code == 0, r.output);
    const auto side = nlohmann::json::parse(slurp(dir + "/o2/solve_mu.json"));
    CHECK(side["config"]["alpha"][0] == 0.5);
    CHECK(side["config"]["volumes"]["v0"] == 2000);
    CHECK(side["delta_candidate"] == 1.0);
}

TEST_CASE("subcritical solve-mu works") {
    const std::string dir = temp_dir();
    write_file(dir + "/cfg.json",
               std::string("{\"alpha\":[0.5,0.25,0.25],\"rho\":0.5,"
                           "\"volumes\":[1000,8],\"out\":\"") +
                   dir + "/out\"}");
    const RunResult r = run("solve-mu --config " + dir + "/cfg.json", dir);
    CHECK_MESSAGE(r.exit_code == 0, r.output);
    const auto side = nlohmann::json::parse(slurp(dir + "/out/solve_mu.json"));
    CHECK(side.contains("beta_mu_fit"));
    CHECK(side["beta_mu_fit"]["extrapolated_limit"].get<double>() < 0.0);
}

TEST_CASE("classify reports the regime") {
    const std::string dir = temp_dir();
    write_file(dir + "/cfg.json",
               std::string("{\"alpha\":[0.6,0.2,0.2],\"rho_offset\":1.0,"
                           "\"volumes\":{\"v0\":1000,\"count\":11},\"out\":\"") +
                   dir + "/out\"}");
    const RunResult r = run("classify --config " + dir + "/cfg.json", dir);
    CHECK_MESSAGE(r.exit_code == 0, r.output);
    const auto side = nlohmann::json::parse(slurp(dir + "/out/classify.json"));
    CHECK(side["regime"] == "type-III");
    CHECK(side["conclusive"].get<bool>());
    const std::string csv = slurp(dir + "/out/classify.csv");
    CHECK(csv.rfind("volume,zero_mode_density,first_mode_density\n", 0) == 0);
}

TEST_CASE("cycles writes the window column when configured") {
    const std::string dir = temp_dir();
    write_file(dir + "/cfg.json",
               basic_config(dir + "/out",
                            "\"window\":{\"delta\":1.0,\"x\":0.5,\"y\":5.0},\"m_cut\":32"));
    const RunResult r = run("cycles --config " + dir + "/cfg.json", dir);
    CHECK_MESSAGE(r.exit_code == 0, r.output);
    const std::string csv = slurp(dir + "/out/cycles.csv");
    CHECK(csv.rfind("volume,short_cycle_density,long_cycle_density,window_density\n", 0) == 0);
    const auto side = nlohmann::json::parse(slurp(dir + "/out/cycles.json"));
    CHECK(side["m_cut"] == 32);
    CHECK(side["window_fit"].contains("converged"));
    CHECK(side["long_cycle_fit"]["extrapolated_limit"].get<double>() ==
          doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("correlate reports rejected volumes without clamping") {
    const std::string dir = temp_dir();
    // X = 0.45 V^0.4 fits under L1/2 = V^0.4/2 at every volume: all ok
    write_file(dir + "/ok.json",
               basic_config(dir + "/ok", "\"path\":{\"x\":[0.45,0,0],\"s\":[0.4,0,0]}"));
    const RunResult ok = run("correlate --config " + dir + "/ok.json", dir);
    CHECK_MESSAGE(ok.exit_code == 0, ok.output);
    const std::string csv = slurp(dir + "/ok/correlate.csv");
    CHECK(csv.rfind("volume,x1,x2,x3,sigma,status\n", 0) == 0);
    CHECK(csv.find(",ok\n") != std::string::npos);
    CHECK(csv.find("rejected") == std::string::npos);

    // a path violating the half-period bound everywhere is a config error
    write_file(dir + "/bad.json",
               basic_config(dir + "/bad", "\"path\":{\"x\":[1.0,0,0],\"s\":[0.5,0,0]}"));
    const RunResult bad = run("correlate --config " + dir + "/bad.json", dir);
    CHECK(bad.exit_code == 2);
}

TEST_CASE("config errors exit with code 2") {
    const std::string dir = temp_dir();

    CHECK(run("solve-mu --config " + dir + "/absent.json", dir).exit_code == 2);

    write_file(dir + "/broken.json", "{\"alpha\":[0.4,0.3,");
    CHECK(run("solve-mu --config " + dir + "/broken.json", dir).exit_code == 2);

    write_file(dir + "/unsorted.json",
               std::string("{\"alpha\":[0.3,0.4,0.3],\"out\":\"") + dir + "/x\"}");
    CHECK(run("solve-mu --config " + dir + "/unsorted.json", dir).exit_code == 2);

    write_file(dir + "/novol.json",
               std::string("{\"volumes\":{\"v0\":1000,\"count\":0},\"out\":\"") + dir + "/x\"}");
    CHECK(run("solve-mu --config " + dir + "/novol.json", dir).exit_code == 2);

    write_file(dir + "/cfg.json", basic_config(dir + "/x"));
    CHECK(run("solve-mu --config " + dir + "/cfg.json --alpha 0.4,0.3", dir).exit_code == 2);
    CHECK(run("solve-mu --config " + dir + "/cfg.json --volumes banana", dir).exit_code == 2);
    CHECK(run("no-such-command", dir).exit_code == 2);
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <path-to-casimir-binary>\n");
        return 1;
    }
    g_cli = argv[argc - 1];
    doctest::Context ctx;
    ctx.applyCommandLine(argc - 1, argv);
    return ctx.run();
}
