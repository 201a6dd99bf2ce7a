#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "barkley/cli.hpp"

namespace {

struct CaptureOut {
    std::stringstream ss;
    std::streambuf* old;
    CaptureOut() : old(std::cout.rdbuf(ss.rdbuf())) {}
    ~CaptureOut() { std::cout.rdbuf(old); }
};

int run(std::vector<const char*> args, std::string* out = nullptr) {
    args.insert(args.begin(), "barkley");
    CaptureOut cap;
    int rc = barkley::cli::dispatch((int)args.size(), args.data());
    if (out) *out = cap.ss.str();
    return rc;
}

} // namespace

TEST_CASE("find-beta prints the twist boundary") {
    std::string out;
    int rc = run({"find-beta", "--tol", "1e-5"}, &out);
    CHECK(rc == 0);
    CHECK(out.find("beta = 0.7294") != std::string::npos);
}

TEST_CASE("equilibria output and validation") {
    std::string out;
    CHECK(run({"equilibria", "--r", "1.2"}, &out) == 0);
    CHECK(out.find("u_b") != std::string::npos);
    CHECK(out.find("1.24016") != std::string::npos);

    CHECK(run({"equilibria", "--r", "0.5"}) == 2);
    CHECK(run({"equilibria"}) == 2);           // missing required flag
    CHECK(run({"no-such-command"}) == 2);
}

TEST_CASE("verify validation and exit codes") {
    CHECK(run({"verify", "--r", "0.5"}) == 2);  // r <= 2/3 rejected
}

TEST_CASE("spectra subcommand reports the ordering verdict") {
    std::string out;
    int rc = run({"spectra", "--r", "0.7", "--eps", "1e-3"}, &out);
    CHECK(rc == 0);
    CHECK(out.find("H0/H1 pass") != std::string::npos);
    CHECK(out.find("beta1") != std::string::npos);
}

TEST_CASE("melnikov-scan: header, row count, round-trip, determinism") {
    std::string path1 = "/tmp/barkley_scan_a.csv";
    std::string path2 = "/tmp/barkley_scan_b.csv";
    CHECK(run({"melnikov-scan", "--r-min", "0.68", "--r-max", "0.9", "--steps", "5", "--out",
               path1.c_str()}) == 0);
    CHECK(run({"melnikov-scan", "--r-min", "0.68", "--r-max", "0.9", "--steps", "5", "--out",
               path2.c_str()}) == 0);

    std::ifstream f1(path1);
    std::string header;
    std::getline(f1, header);
    CHECK(header == "r,Mhat_f,M_f,Mhat_b,M_b,Mtilde_f,Mhat,dQf_du,dQb_du,dQf_dmu,dQb_dmu,quad_err");
    int rows = 0;
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(f1, line)) {
        if (!line.empty()) {
            ++rows;
            lines.push_back(line);
        }
    }
    CHECK(rows == 5);

    // locale-independent doubles round-trip exactly
    std::stringstream ss(lines[0]);
    std::string tok;
    std::getline(ss, tok, ',');
    double r = std::stod(tok);
    CHECK(r == 0.68);

    // identical invocations are byte-identical
    std::ifstream a(path1), b(path2);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    std::remove(path1.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("melnikov-scan validates the grid") {
    CHECK(run({"melnikov-scan", "--r-min", "0.5", "--r-max", "0.9", "--steps", "3", "--out",
               "/tmp/x.csv"}) == 2);
    CHECK(run({"melnikov-scan", "--r-min", "0.9", "--r-max", "0.7", "--steps", "3", "--out",
               "/tmp/x.csv"}) == 2);
}

TEST_CASE("config file supplies defaults under the flag precedence") {
    std::string cfg_path = "/tmp/barkley_test_cfg.ini";
    {
        std::ofstream os(cfg_path);
        os << "[find-beta]\n" << "tol = 1e-3\n";
    }
    std::string out;
    int rc = run({"--config", cfg_path.c_str(), "find-beta"}, &out);
    CHECK(rc == 0);
    CHECK(out.find("beta = 0.72") != std::string::npos);
    std::remove(cfg_path.c_str());
}

TEST_CASE("nfront-times arguments are validated") {
    CHECK(run({"nfront-times", "--N", "1", "--rho", "0.01", "--r", "0.7"}) == 2);
    CHECK(run({"nfront-times", "--N", "3", "--rho", "1.5", "--r", "0.7"}) == 2);
}

TEST_CASE("simulate writes snapshots in the documented format") {
    std::string out;
    int rc = run({"simulate", "--kind", "uniform-turbulent", "--r", "0.8", "--eps", "1e-2",
                  "--L", "30", "--n", "200", "--T", "0.5", "--snap-every", "1", "--out",
                  "/tmp/barkley_snap"},
                 &out);
    CHECK(rc == 0);
    std::ifstream is("/tmp/barkley_snap_0.dat");
    REQUIRE(is.good());
    std::string header;
    std::getline(is, header);
    CHECK(header.rfind("# t=", 0) == 0);
    CHECK(header.find("n=200") != std::string::npos);
    int rows = 0;
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 200);
    std::remove("/tmp/barkley_snap_0.dat");
    std::remove("/tmp/barkley_snap_1.dat");
}

TEST_CASE("scan output is identical under a different worker count") {
    std::string p1 = "/tmp/barkley_scan_t1.csv", p2 = "/tmp/barkley_scan_t4.csv";
    setenv("BARKLEY_THREADS", "1", 1);
    CHECK(run({"melnikov-scan", "--r-min", "0.7", "--r-max", "1.1", "--steps", "7", "--out",
               p1.c_str()}) == 0);
    setenv("BARKLEY_THREADS", "4", 1);
    CHECK(run({"melnikov-scan", "--r-min", "0.7", "--r-max", "1.1", "--steps", "7", "--out",
               p2.c_str()}) == 0);
    unsetenv("BARKLEY_THREADS");
    std::ifstream a(p1), b(p2);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(!sa.str().empty());
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}
