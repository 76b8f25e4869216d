#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "cqed/app.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::initializer_list<std::string> args) {
    std::vector<std::string> storage{"cqed"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : storage) argv.push_back(s.c_str());
    std::ostringstream out, err;
    const int code = cqed::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "cqed_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_file(const fs::path& path, const std::string& text) {
    std::ofstream(path) << text;
    return path.string();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> data_lines(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    }
    return lines;
}

std::vector<double> split_numbers(const std::string& line) {
    std::vector<double> v;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) v.push_back(std::stod(cell));
    return v;
}

} // namespace

TEST_CASE("unknown configuration key exits with code 2") {
    const auto dir = scratch("unknown");
    const auto cfg = write_file(dir / "c.json", R"({"params": {"detuning": 1}})");
    const auto r = cli({"--config", cfg, "--out", (dir / "o").string(), "simulate"});
    CHECK(r.code == 2);
    CHECK(r.err.find("params.detuning") != std::string::npos);
}

TEST_CASE("command-line errors exit with code 2") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"teleport"}).code == 2);
    CHECK(cli({"figure", "9"}).code == 2);
    CHECK(cli({"--variant", "other", "simulate"}).code == 2);
    const auto dir = scratch("syntax");
    const auto cfg = write_file(dir / "c.json", "{ not json");
    CHECK(cli({"--config", cfg, "simulate"}).code == 2);
    CHECK(cli({"--config", (dir / "missing.json").string(), "simulate"}).code == 2);
}

TEST_CASE("simulate: resonant free precession keeps spin columns constant with an empty cavity") {
    const auto dir = scratch("simulate");
    const auto cfg = write_file(dir / "c.json", R"({
        "params": {"delta": 0},
        "initial": {"p": 0, "x": 1.5707963267948966, "ax": 0, "ay": 0},
        "integration": {"t_end": 5, "sample_every": 0.5}})");
    const auto r = cli({"--config", cfg, "--out", dir.string(), "simulate"});
    REQUIRE(r.code == 0);
    const auto lines = data_lines(dir / "trajectory.csv");
    REQUIRE(lines.size() == 12);
    CHECK(lines[0] == "tau,x,p,sx,sy,sz,ax,ay,E,N,snorm");
    const auto first = split_numbers(lines[1]);
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const auto row = split_numbers(lines[i]);
        for (int c : {3, 4, 5}) CHECK(std::abs(row[c] - first[c]) < 1e-15);
    }
    const auto text = slurp(dir / "trajectory.csv");
    CHECK(text.rfind("# cqed ", 0) == 0);
    CHECK(text.find("# variant: consistent") != std::string::npos);
    CHECK(text.find("# seed: 1") != std::string::npos);
    CHECK(text.find("# config: {") != std::string::npos);
    CHECK(fs::exists(dir / "config.json"));
}

TEST_CASE("thermal trajectory headers follow the variant") {
    const auto dir = scratch("headers");
    const auto cfg = write_file(dir / "c.json", R"({
        "params": {"temperature": {"beta": 2}},
        "integration": {"t_end": 1, "sample_every": 0.5}})");
    REQUIRE(cli({"--config", cfg, "--out", (dir / "c").string(), "simulate"}).code == 0);
    CHECK(data_lines(dir / "c" / "trajectory.csv")[0] ==
          "tau,x,p,p_tilde,sx,sy,sz,ax,ay,atx,aty,E,N,snorm");
    REQUIRE(cli({"--config", cfg, "--variant", "literal", "--out", (dir / "l").string(),
                 "simulate"})
                .code == 0);
    CHECK(data_lines(dir / "l" / "trajectory.csv")[0] ==
          "tau,x,p,p_tilde,sx,sy,sz,ax,ay,atx,aty,snorm");
    CHECK(slurp(dir / "l" / "trajectory.csv").find("# variant: literal") != std::string::npos);
}

TEST_CASE("re-running the echoed configuration reproduces every output byte") {
    const auto dir = scratch("roundtrip");
    const auto cfg = write_file(dir / "c.json", R"({
        "params": {"delta": 1.92, "temperature": {"beta": 3}},
        "initial": {"p": 2, "sz": 0},
        "lyapunov": {"n_renorm": 100, "transient": 5}})");
    const auto out = dir / "run";
    REQUIRE(cli({"--config", cfg, "--out", out.string(), "--seed", "5", "lyapunov"}).code == 0);
    const auto first = slurp(out / "lyapunov.csv");
    CHECK(first.find("# seed: 5") != std::string::npos);
    fs::copy_file(out / "config.json", dir / "echo.json");
    const auto echo_before = slurp(out / "config.json");
    REQUIRE(cli({"--config", (dir / "echo.json").string(), "lyapunov"}).code == 0);
    CHECK(slurp(out / "lyapunov.csv") == first);
    CHECK(slurp(out / "config.json") == echo_before);
}

TEST_CASE("poincare and flights subcommands write their tables") {
    const auto dir = scratch("diagnostics");
    const auto cfg = write_file(dir / "c.json", R"({
        "params": {"delta": 1.2},
        "initial": {"p": 40},
        "section": {"n_points": 5, "transient": 0},
        "integration": {"t_end": 1000}})");
    REQUIRE(cli({"--config", cfg, "--out", dir.string(), "poincare"}).code == 0);
    const auto sec = data_lines(dir / "section.csv");
    CHECK(sec[0] == "u,v,tau");
    CHECK(sec.size() == 6);
    REQUIRE(cli({"--config", cfg, "--out", dir.string(), "flights"}).code == 0);
    const auto fl = data_lines(dir / "flights.csv");
    CHECK(fl[0] == "tau_start,tau_end,dx");
    CHECK(fl.size() == 2);
}

TEST_CASE("sweep: 2x2 grid gives four rows independent of thread count") {
    const auto dir = scratch("sweep");
    const auto cfg = write_file(dir / "c.json", R"({
        "initial": {"p": 2, "sz": 0},
        "lyapunov": {"n_renorm": 100, "transient": 10},
        "sweep": {"axes": [{"name": "delta", "values": [0, 1.92]},
                           {"name": "beta", "values": ["inf", 1]}]}})");
    REQUIRE(cli({"--config", cfg, "--out", (dir / "t1").string(), "--threads", "1", "sweep"})
                .code == 0);
    REQUIRE(cli({"--config", cfg, "--out", (dir / "t4").string(), "--threads", "4", "sweep"})
                .code == 0);
    const auto a = data_lines(dir / "t1" / "sweep.csv");
    const auto b = data_lines(dir / "t4" / "sweep.csv");
    REQUIRE(a.size() == 5);
    CHECK(a[0] == "delta,beta,value,status");
    CHECK(a == b);
    CHECK(a[1].rfind("0,inf,", 0) == 0);
    CHECK(a[2].rfind("0,1,", 0) == 0);
}

TEST_CASE("sweep with a failing cell exits with code 3 and keeps the other rows") {
    const auto dir = scratch("sweep_fail");
    const auto cfg = write_file(dir / "c.json", R"({
        "initial": {"p": 2, "sz": 0},
        "integration": {"step": 0.5},
        "lyapunov": {"n_renorm": 100, "transient": 0},
        "sweep": {"axes": [{"name": "beta", "values": [0.000001, "inf"]}]}})");
    const auto r = cli({"--config", cfg, "--out", dir.string(), "sweep"});
    CHECK(r.code == 3);
    CHECK(r.err.find("warning: beta") != std::string::npos);
    CHECK(r.err.find("failed") != std::string::npos);
    const auto rows = data_lines(dir / "sweep.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[2].find(",ok") != std::string::npos);
}

TEST_CASE("installed binary runs") {
    const auto dir = scratch("binary");
    const std::string cmd = std::string("\"") + CQED_CLI_PATH + "\" --out \"" + dir.string() +
                            "\" figure 7 > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 2);
    const std::string help = std::string("\"") + CQED_CLI_PATH + "\" --help > /dev/null";
    CHECK(std::system(help.c_str()) == 0);
}
