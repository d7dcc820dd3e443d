// Runs the twelve acceptance checks and prints one line per check.
// Exit status is 0 when every failing check is listed in --expect-fail.

#include <algorithm>
#include <iostream>

#include "CLI11.hpp"

#include "duopoly/errors.hpp"
#include "duopoly/verification.hpp"

using namespace duopoly;

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::string config;
    std::vector<int> expect_fail;
    std::vector<int> only;
    VerifyOptions opt;
    app.add_option("--config", config, "model config")->required()->check(CLI::ExistingFile);
    app.add_option("--expect-fail", expect_fail, "check ids known to fail")->delimiter(',');
    app.add_option("--only", only, "check ids to run")->delimiter(',');
    app.add_option("--paths", opt.paths, "Monte Carlo paths for every check");
    CLI11_PARSE(app, argc, argv);
    opt.only = only;

    ModelConfig cfg;
    try {
        cfg = load_config(config);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    const VerificationReport rep = run_verification(cfg, opt);
    int unexpected = 0;
    for (const auto& r : rep.criteria) {
        std::cout << format_line(r) << "\n";
        const bool expected = std::find(expect_fail.begin(), expect_fail.end(), r.id) != expect_fail.end();
        if (!r.passed() && !expected) ++unexpected;
        if (r.passed() && expected) std::cout << "      (listed as expected to fail, but passed)\n";
    }
    const auto passed = std::count_if(rep.criteria.begin(), rep.criteria.end(), [](const auto& r) { return r.passed(); });
    std::cout << passed << "/" << rep.criteria.size() << " passed";
    if (!expect_fail.empty()) std::cout << "; " << unexpected << " unexpected failure(s)";
    std::cout << "\n";
    return unexpected == 0 ? 0 : 1;
}
