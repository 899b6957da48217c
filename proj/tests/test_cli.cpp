#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <gtest/gtest.h>

#include "hemostab/cli.hpp"

namespace {

using hemostab::cli::json;

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("hemostab_test_" + std::to_string(getpid()) + "_" + name)).string();
}

RunResult run(const std::string& args)
{
    const std::string err_file = temp_path("stderr.txt");
    const std::string cmd = std::string(HEMOSTAB_CLI) + " " + args + " 2>" + err_file;
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream ef(err_file);
    std::stringstream ss;
    ss << ef.rdbuf();
    r.err = ss.str();
    return r;
}

std::vector<std::string> lines(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string l; std::getline(ss, l);) out.push_back(l);
    return out;
}

std::vector<std::string> split(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
    return out;
}

}  // namespace

TEST(Cli, ThresholdsCsv)
{
    const auto r = run("thresholds --model mackey-glass --beta 0.8 --gamma 0.3 --n 10");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 3u);
    EXPECT_EQ(ls[0].rfind("# config: {", 0), 0u);
    EXPECT_EQ(ls[1], "tau,tau_noc,tau_suff,tau_c,period");
    const auto f = split(ls[2]);
    EXPECT_NEAR(std::stod(f[3]), 1.14, 5e-3);
    EXPECT_NEAR(std::stod(f[4]), 4.06, 5e-3);
}

TEST(Cli, NoEquilibriumExitCode)
{
    const auto r = run("thresholds --model mackey-glass --beta 0.3 --gamma 0.3 --n 10");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("no positive equilibrium"), std::string::npos);
}

TEST(Cli, NoHopfExitCode)
{
    const auto r = run("hopf --model lasota --beta 0.4 --gamma 0.3 --n 0.1 --tau 2");
    EXPECT_EQ(r.code, 4);
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(run("thresholds --model mackey-glass --beta 0.8").code, 1);
    EXPECT_EQ(run("thresholds --model logistic --beta 0.8 --gamma 0.3 --n 10").code, 1);
    EXPECT_EQ(run("--preset fig99").code, 1);
    EXPECT_EQ(run("chart --model lasota --beta 0.9 --gamma 0.1 --n 0.1 --sweep b --from 0 --to 1").code, 1);
    EXPECT_NE(run("--bogus").code, 0);
}

TEST(Cli, StepTooLargeIsDomainError)
{
    EXPECT_EQ(run("simulate --model mackey-glass --beta 0.8 --gamma 0.3 --n 10 --tau 0.1 --h 0.05").code, 2);
}

TEST(Cli, HopfJsonReport)
{
    const auto r = run("hopf --model mackey-glass --beta 0.8 --gamma 0.3 --n 10 --tau 1.14 --eta 1.05 --format json");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_EQ(doc["config"]["command"], "hopf");
    EXPECT_NEAR(doc["report"]["mu2"].get<double>(), 29.3, 0.1);
    EXPECT_LT(doc["report"]["beta2"].get<double>(), 0.0);
    EXPECT_EQ(doc["report"]["bifurcation_type"], "supercritical");
    EXPECT_EQ(doc["report"]["orbit_stable"], true);
    EXPECT_EQ(doc["report"]["g20"].size(), 2u);
}

TEST(Cli, ChartSentinels)
{
    const auto r = run("chart --model mackey-glass --beta 0.8 --gamma 0.3 --n 10 --sweep beta --from 0.1 --to 0.5 --steps 5");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    EXPECT_EQ(ls[1], "beta,tau_noc,tau_suff,tau_c,period");
    EXPECT_EQ(ls[2], "0.1,none,none,none,none");
    const auto g = run("chart --generic --a 0.5 --sweep b --from 0.1 --to 1 --steps 4");
    ASSERT_EQ(g.code, 0) << g.err;
    EXPECT_NE(lines(g.out)[2].find("unbounded"), std::string::npos);
}

TEST(Cli, CsvHeaders)
{
    const std::vector<std::pair<std::string, std::string>> cases{
        {"--preset fig7a --stride 1000", "x_t,x_t_minus_tau"},
        {"--preset fig3a --stride 1000", "t,x"},
        {"--preset fig4a", "tau,sigma,branch"},
        {"--preset fig5a", "n_hi,tau_rob,b_wc,x_star_wc,tau_rob_nominal,x_star_nominal"},
        {"--preset fig1", "a,b_noc,b_suff,b_c"},
        {"bifurcate --model mackey-glass --beta 0.8 --gamma 0.3 --n 10 --eta-from 0.95 --eta-to 1.05 --steps 3",
         "eta,x_min,x_max"},
    };
    for (const auto& [args, header] : cases) {
        const auto r = run(args);
        ASSERT_EQ(r.code, 0) << args << "\n" << r.err;
        EXPECT_EQ(lines(r.out)[1], header) << args;
    }
}

TEST(Cli, ReplayReproducesOutput)
{
    const std::vector<std::string> cases{
        "--preset fig2a",
        "--preset fig4b --format json",
        "--preset fig5b",
        "--preset fig10a --stride 50",
        "hopf --model lasota --beta 0.9 --gamma 0.1 --n 0.1 --tau 17.69 --eta 1.05 --format json",
        "equilibrium --model lasota --beta 1 --gamma 0.1 --n 2",
        "verify --model mackey-glass --beta 0.8 --gamma 0.3 --n 10",
    };
    for (const auto& args : cases) {
        const std::string path = temp_path("replay.out");
        const auto first = run(args + " --output " + path);
        ASSERT_EQ(first.code, 0) << args << "\n" << first.err;
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        const auto second = run("--from-file " + path);
        ASSERT_EQ(second.code, 0) << args << "\n" << second.err;
        EXPECT_EQ(second.out, ss.str()) << args;
    }
}

TEST(Cli, PresetsMatchFigureCaptions)
{
    const auto& all = hemostab::cli::presets();
    EXPECT_EQ(all.at("fig2a")["beta"], 0.8);
    EXPECT_EQ(all.at("fig2a")["from"], 0.5);
    EXPECT_EQ(all.at("fig4b")["beta"], 0.4);
    EXPECT_EQ(all.at("fig5a")["to"], 20.0);
    EXPECT_EQ(all.at("fig6")["n"], 10.0);
    EXPECT_EQ(all.at("fig9")["gamma"], 0.1);
    EXPECT_EQ(all.at("fig10a")["tau"], 13.69);
    EXPECT_EQ(all.at("fig10b")["tau"], 21.69);
    EXPECT_EQ(all.at("fig7b")["tau"], 1.3);
    for (const auto& [name, cfg] : all) {
        EXPECT_NO_THROW((void)hemostab::cli::resolve_config(cfg)) << name;
    }
}

TEST(Cli, OutputIsStableAcrossWorkerCounts)
{
    setenv("HEMOSTAB_WORKERS", "1", 1);
    const auto serial = run("--preset fig2d");
    setenv("HEMOSTAB_WORKERS", "6", 1);
    const auto parallel = run("--preset fig2d");
    unsetenv("HEMOSTAB_WORKERS");
    ASSERT_EQ(serial.code, 0);
    EXPECT_EQ(serial.out, parallel.out);
}

TEST(Cli, VerifyPasses)
{
    for (const std::string model : {"--model mackey-glass --beta 0.8 --gamma 0.3 --n 10",
                                    "--model lasota --beta 0.9 --gamma 0.1 --n 0.1", "--generic --a 0.4 --b 1.1"}) {
        const auto r = run("verify " + model);
        EXPECT_EQ(r.code, 0) << model << "\n" << r.out << r.err;
        EXPECT_EQ(r.out.find(",false"), std::string::npos) << r.out;
    }
}

TEST(Cli, NumbersUseTwelveSignificantDigits)
{
    const auto r = run("equilibrium --model mackey-glass --beta 0.8 --gamma 0.3 --n 10");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(split(lines(r.out)[2])[0], "1.05240977915");
}
