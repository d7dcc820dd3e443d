#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kCli = DUOPOLY_CLI;
const std::string kReference = std::string(DUOPOLY_CONFIG_DIR) + "/reference.cfg";

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("duopoly_cli_" + std::to_string(::getpid()) + "_" + std::to_string(count++));
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    static inline int count = 0;
};

int run(const std::string& args, const fs::path& out) {
    const std::string cmd = kCli + " " + args + " --out " + out.string() + " > " + (out / "stdout.txt").string() +
                            " 2> " + (out / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "model.cfg";
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("solve writes roots and thresholds") {
    Scratch s;
    REQUIRE(run("--config " + kReference + " solve", s.dir) == 0);
    const json j = read_json(s.dir / "solution.json");
    CHECK(j["roots"]["gamma"].get<double>() == doctest::Approx(2.14462869177799));
    CHECK(j["follower_low"]["z3"].get<double>() == doctest::Approx(14.1226391785912));
    CHECK(j["root_residuals"]["gamma"].get<double>() < 1e-12);
}

TEST_CASE("malformed configs exit with code 2") {
    Scratch s;
    const fs::path bad = write_config(s.dir, "alpha=0.1\nsigma=0.8\nr=1\npi_low=1\npi_high=2\ntheta=0.7\ninv_cost=10\nbogus=1\n");
    CHECK(run("--config " + bad.string() + " solve", s.dir) == 2);
    CHECK(slurp(s.dir / "stderr.txt").find("bogus") != std::string::npos);

    const fs::path neg = write_config(s.dir, "alpha=0.1\nsigma=-1\nr=1\npi_low=1\npi_high=2\ntheta=0.7\ninv_cost=1\n");
    CHECK(run("--config " + neg.string() + " curves", s.dir) == 2);
    CHECK(slurp(s.dir / "stderr.txt").find("sigma") != std::string::npos);

    CHECK(run("--config " + (s.dir / "nope.cfg").string() + " solve", s.dir) == 2);
    CHECK(run("--config " + kReference + " frobnicate", s.dir) == 2);
    CHECK(run("--config " + kReference + " --paths 0 simulate --z0 1", s.dir) == 2);
}

TEST_CASE("curves CSV schema") {
    Scratch s;
    REQUIRE(run("--config " + kReference + " --grid 50 curves", s.dir) == 0);
    std::ifstream f(s.dir / "curves.csv");
    std::string header;
    std::getline(f, header);
    CHECK(header == "z,C,F,L,F_L,F_H,L_L,L_H,alpha_i,alpha_j,region_label");
    int rows = 0;
    for (std::string line; std::getline(f, line);) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 10);
    }
    CHECK(rows == 50);
}

TEST_CASE("curves flags a market outside the scenario") {
    Scratch s;
    const fs::path low_xi =
        write_config(s.dir, "alpha=0.1\nsigma=0.8\nr=1\npi_low=1\npi_high=2\ntheta=0.7\ninv_cost=10\nxi=1\n");
    REQUIRE(run("--config " + low_xi.string() + " --grid 10 curves", s.dir) == 0);
    const std::string csv = slurp(s.dir / "curves.csv");
    CHECK(csv.rfind("# scenario check:", 0) == 0);
}

TEST_CASE("intervals and bsets") {
    Scratch s;
    REQUIRE(run("--config " + kReference + " intervals", s.dir) == 0);
    const json a = read_json(s.dir / "intervals.json");
    CHECK(a["intervals"]["A1"][0].get<double>() == doctest::Approx(0.141130376136));
    CHECK(a["endpoints"].size() == 4);

    REQUIRE(run("--config " + kReference + " bsets", s.dir) == 0);
    const json b = read_json(s.dir / "bsets.json");
    CHECK(b["vacuum"].get<bool>());
    CHECK(b["B2"]["intervals"].empty());
    CHECK(b["B3"]["intervals"][0][1] == "inf");
}

TEST_CASE("simulate and deviate") {
    Scratch s;
    REQUIRE(run("--config " + kReference + " --paths 2000 simulate --z0 8 --z0 16", s.dir) == 0);
    const json j = read_json(s.dir / "simulate.json");
    REQUIRE(j["runs"].size() == 2);
    CHECK(j["runs"][0]["region_label"] == "vacuum");
    CHECK_FALSE(j["runs"][0]["immediate"].get<bool>());
    CHECK(j["runs"][1]["roles"] == "i_leads");
    CHECK(run("--config " + kReference + " simulate", s.dir) == 2);

    REQUIRE(run("--config " + kReference + " --paths 500 deviate --z0 8", s.dir) == 0);
    const json d = read_json(s.dir / "deviations.json");
    CHECK(d["reports"].size() == 2);
    CHECK(d["symmetric_counterexample"]["found"].get<bool>());
}

TEST_CASE("verify subset") {
    Scratch s;
    CHECK(run("--config " + kReference + " verify --only 1 --only 2 --only 11", s.dir) == 0);
    CHECK(slurp(s.dir / "stdout.txt").find("PASS   1") != std::string::npos);
    CHECK(run("--config " + kReference + " verify --only 3", s.dir) == 1);
}

TEST_CASE("reruns are byte-identical") {
    Scratch a;
    Scratch b;
    const std::string args = "--config " + kReference + " --paths 1000 --grid 40 ";
    for (const char* cmd : {"curves", "bsets", "simulate --z0 0.05 --z0 8"}) {
        REQUIRE(run(args + cmd, a.dir) == 0);
        REQUIRE(run(args + cmd, b.dir) == 0);
    }
    for (const char* f : {"curves.csv", "bsets.json", "simulate.json"}) {
        CAPTURE(f);
        CHECK(slurp(a.dir / f) == slurp(b.dir / f));
    }
}
