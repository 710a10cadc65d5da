// Runs the levy-dividend-opt binary and checks exit codes, summaries and CSVs.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "levydiv/model_io.hpp"
#include "levydiv/optimizer_sn.hpp"
#include "levydiv/refracted_sn.hpp"

namespace fs = std::filesystem;
using namespace levydiv;

namespace {

struct Run {
    int rc;
    std::string out;
};

const std::string kModels = LEVYDIV_MODELS_DIR;

fs::path work_dir(const std::string& name) {
    fs::path p = fs::path(LEVYDIV_CLI_WORK) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// stdout only; stderr is folded in when err is set
Run run(const std::string& args, bool err = false) {
    std::string cmd = std::string("LEVYDIV_THREADS=2 \"") + LEVYDIV_CLI + "\" " + args + (err ? " 2>&1" : " 2>/dev/null");
    Run r{-1, {}};
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.rc = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string model(const char* name) { return "-m \"" + kModels + "/" + name + "\""; }

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

struct Csv {
    std::string banner;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        ADD_FAILURE() << "no column " << name;
        return 0;
    }
    double num(std::size_t r, const std::string& name) const { return std::stod(rows[r][col(name)]); }
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

Csv read_csv(const fs::path& p) {
    Csv c;
    std::ifstream f(p);
    std::string line;
    std::getline(f, c.banner);
    std::getline(f, line);
    c.header = split(line);
    while (std::getline(f, line)) c.rows.push_back(split(line));
    return c;
}

// value of key=... in a summary line
double field(const std::string& out, const std::string& key) {
    auto pos = out.find(key + "=");
    if (pos == std::string::npos) {
        ADD_FAILURE() << key << " missing from: " << out;
        return 0.0;
    }
    return std::stod(out.substr(pos + key.size() + 1));
}

}  // namespace

TEST(Cli, SolveLagrangianCaseOne) {
    auto dir = work_dir("lag1");
    auto r = run("solve-lagrangian " + model("case1.json") + " -l 1 -o " + dir.string());
    ASSERT_EQ(r.rc, 0) << r.out;
    EXPECT_NE(r.out.find("hjb=pass"), std::string::npos);
    EXPECT_NE(r.out.find("boundary=interior"), std::string::npos);
    EXPECT_NEAR(field(r.out, "b_opt"), 4.7233176195208373975, 1e-9);
    auto curve = read_csv(dir / "curve.csv");
    EXPECT_EQ(curve.banner.rfind("# levy-dividend-opt v", 0), 0u);
    EXPECT_NE(curve.banner.find("schema="), std::string::npos);
    EXPECT_EQ(curve.rows.size(), 401u);
    // optimal curve dominates the three comparison thresholds
    auto opt = read_csv(dir / "optimality.csv");
    std::map<std::string, std::vector<double>> v;
    for (std::size_t i = 0; i < opt.rows.size(); ++i) v[opt.rows[i][0]].push_back(opt.num(i, "v"));
    ASSERT_EQ(v.size(), 4u);
    for (const auto& [label, vals] : v)
        for (std::size_t i = 0; i < vals.size(); ++i) EXPECT_LE(vals[i], v["optimal"][i] + 1e-10) << label;
}

TEST(Cli, SolveLagrangianCaseTwoZeroThreshold) {
    auto dir = work_dir("lag2");
    auto r = run("solve-lagrangian " + model("case2.json") + " -l 1 -o " + dir.string());
    ASSERT_EQ(r.rc, 0);
    EXPECT_EQ(field(r.out, "b_opt"), 0.0);
    EXPECT_NE(r.out.find("boundary=at_zero"), std::string::npos);
}

TEST(Cli, CeilingRateNeedsFlag) {
    auto dir = work_dir("fallback");
    auto r = run("solve-lagrangian " + model("case1.json") + " -l -20 -o " + dir.string(), true);
    EXPECT_EQ(r.rc, 2);
    EXPECT_NE(r.out.find("error:"), std::string::npos);
    auto ok = run("solve-lagrangian " + model("case1.json") + " -l -20 --allow-fallback -o " + dir.string());
    EXPECT_EQ(ok.rc, 0);
    EXPECT_NE(ok.out.find("boundary=ceiling_rate_fallback"), std::string::npos);
}

TEST(Cli, InputErrors) {
    EXPECT_EQ(run("solve-lagrangian -m /nonexistent.json").rc, 1);
    EXPECT_EQ(run("no-such-command").rc, 1);
    EXPECT_EQ(run("").rc, 1);
    auto dir = work_dir("bad");
    std::ofstream(dir / "bad.json") << R"({"drift": 1, "sigma": 1, "delta": 0.5, "levy_density": "stable"})";
    EXPECT_EQ(run("print-model -m " + (dir / "bad.json").string()).rc, 1);
    EXPECT_EQ(run("sweep-xi " + model("case1.json") + " --b-grid 1:0:x -o " + dir.string()).rc, 1);
    EXPECT_EQ(run("--version").rc, 0);
}

TEST(Cli, SweepXiArgmaxIsTheThreshold) {
    auto dir = work_dir("xi");
    auto r = run("sweep-xi " + model("case1.json") + " -l 1 --b-grid 0:15:1501 -o " + dir.string());
    ASSERT_EQ(r.rc, 0);
    auto c = read_csv(dir / "xi.csv");
    ASSERT_EQ(c.rows.size(), 1501u);
    std::size_t best = 0;
    for (std::size_t i = 1; i < c.rows.size(); ++i)
        if (c.num(i, "xi") > c.num(best, "xi")) best = i;
    EXPECT_NEAR(c.num(best, "b"), 4.7233176195208373975, 0.01 + 1e-12);
    EXPECT_GT(best, 0u);
    EXPECT_LT(best, c.rows.size() - 1);
}

TEST(Cli, SweepXiCaseTwoDecreasing) {
    auto dir = work_dir("xi2");
    ASSERT_EQ(run("sweep-xi " + model("case2.json") + " -l 1 --b-grid 0:15:301 -o " + dir.string()).rc, 0);
    auto c = read_csv(dir / "xi.csv");
    for (std::size_t i = 1; i < c.rows.size(); ++i) EXPECT_LT(c.num(i, "xi"), c.num(i - 1, "xi")) << i;
    auto sp = work_dir("xi_sp");
    ASSERT_EQ(run("sweep-xi " + model("desk_sp.json") + " -l 1 --b-grid 0:10:11 -o " + sp.string()).rc, 0);
    EXPECT_EQ(read_csv(sp / "xi.csv").header.back(), "lambda_tilde_minus_lambda");
}

TEST(Cli, SolveConstrainedFeasibleRegion) {
    auto dir = work_dir("con");
    auto r = run("solve-constrained " + model("case1.json") + " --x-grid 0:10:41 --k-grid 0.5 -o " + dir.string());
    ASSERT_EQ(r.rc, 0);
    auto c = read_csv(dir / "constrained.csv");
    ASSERT_EQ(c.rows.size(), 41u);
    SnFunctionals f(load_model(kModels + "/case1.json"));
    double prev_ls = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.rows.size(); ++i) {
        const double x = c.num(i, "x");
        const bool feasible = std::isfinite(c.num(i, "value"));
        // finite exactly where K_x <= K (x = 0 is degenerate when sigma > 0)
        if (x > 0.0) EXPECT_EQ(feasible, f.K_x(x) <= 0.5) << x;
        const std::string br = c.rows[i][c.col("branch")];
        if (br == "infeasible") EXPECT_EQ(c.rows[i][c.col("value")], "-inf");
        if (br == "interior") {
            const double ls = c.num(i, "lambda_star");
            EXPECT_LT(ls, prev_ls) << "multiplier decreasing in x, x = " << x;
            prev_ls = ls;
        }
    }
}

TEST(Cli, DualProfileWeakDuality) {
    auto dir = work_dir("dual");
    auto r = run("dual-profile " + model("case1.json") + " -x 1 -K 0.5 -o " + dir.string());
    ASSERT_EQ(r.rc, 0);
    EXPECT_EQ(field(r.out, "argmin_lambda"), 5.0);
    EXPECT_GE(field(r.out, "dual_min"), field(r.out, "primal") - 1e-8);
    EXPECT_NE(r.out.find("branch=interior"), std::string::npos);
    auto c = read_csv(dir / "dual_profile.csv");
    EXPECT_EQ(c.rows.size(), 48u);
}

TEST(Cli, SimulateAndNoDividends) {
    auto dir = work_dir("sim");
    auto r = run("simulate " + model("case2.json") + " -b 1 -x 2 -n 2000 --paths-csv " + (dir / "p.csv").string());
    ASSERT_EQ(r.rc, 0) << r.out;
    EXPECT_NE(r.out.find("analytic="), std::string::npos);
    EXPECT_EQ(read_csv(dir / "p.csv").rows.size(), 2000u);
    auto nd = run("simulate " + model("case2.json") + " --no-dividends -x 2 -n 500");
    ASSERT_EQ(nd.rc, 0);
    EXPECT_EQ(field(nd.out, "dividends mean"), 0.0);
    auto inf = run("simulate " + model("case2.json") + " -b inf -x 2 -n 500");
    ASSERT_EQ(inf.rc, 0);
    EXPECT_EQ(field(inf.out, "dividends mean"), 0.0);
    EXPECT_EQ(run("simulate " + model("case2.json") + " -b -1 -n 10").rc, 1);
}

TEST(Cli, ByteIdenticalReruns) {
    const std::vector<std::pair<std::string, std::string>> cmds = {
        {"solve-lagrangian " + model("case1.json") + " -l 1", "curve.csv"},
        {"sweep-xi " + model("case1.json") + " --b-grid 0:10:101", "xi.csv"},
        {"solve-constrained " + model("case1.json") + " --x-grid 0:5:11 --k-grid 0:1:11", "constrained.csv"},
        {"dual-profile " + model("desk_sp.json") + " -x 1 -K 0.7", "dual_profile.csv"},
        {"solve-constrained " + model("desk_sp.json") + " --x-grid 0.5:5:10 --k-grid 0:1:11", "constrained.csv"},
    };
    int k = 0;
    for (const auto& [cmd, file] : cmds) {
        auto a = work_dir("rep_a" + std::to_string(k)), b = work_dir("rep_b" + std::to_string(k));
        ASSERT_EQ(run(cmd + " -o " + a.string()).rc, 0) << cmd;
        ASSERT_EQ(run(cmd + " -o " + b.string()).rc, 0) << cmd;
        EXPECT_EQ(slurp(a / file), slurp(b / file)) << cmd;
        EXPECT_FALSE(slurp(a / file).empty());
        ++k;
    }
    auto d = work_dir("rep_sim");
    const std::string sim = "simulate " + model("case1.json") + " -b 2 -x 1 -n 200 --horizon 20 --paths-csv ";
    ASSERT_EQ(run(sim + (d / "a.csv").string()).rc, 0);
    ASSERT_EQ(run(sim + (d / "b.csv").string() + " --threads 1").rc, 0);
    EXPECT_EQ(slurp(d / "a.csv"), slurp(d / "b.csv"));
}

TEST(Cli, TagPrefixesOutputs) {
    auto dir = work_dir("tag");
    ASSERT_EQ(run("sweep-xi " + model("case1.json") + " --b-grid 1,2,3 --tag c1 -o " + dir.string()).rc, 0);
    EXPECT_TRUE(fs::exists(dir / "c1_xi.csv"));
}

TEST(Cli, PrintModelRoundTrip) {
    auto r = run("print-model " + model("erlang_mix.json"));
    ASSERT_EQ(r.rc, 0);
    EXPECT_EQ(print_model(parse_model(r.out)), print_model(load_model(kModels + "/erlang_mix.json")));
}

TEST(Cli, CheckInvariants) {
    for (const char* m : {"case1.json", "case2.json", "bm.json", "desk_sp.json", "sp_bounded.json", "erlang_mix.json"}) {
        auto r = run("check-invariants " + model(m) + " -l 1");
        EXPECT_EQ(r.rc, 0) << m << "\n" << r.out;
        EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << m;
        EXPECT_NE(r.out.find("PASS"), std::string::npos) << m;
    }
}
