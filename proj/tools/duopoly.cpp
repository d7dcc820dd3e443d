// Command-line front end: solve, curves, intervals, bsets, simulate, deviate, verify.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "duopoly/equilibrium.hpp"
#include "duopoly/errors.hpp"
#include "duopoly/follower.hpp"
#include "duopoly/game.hpp"
#include "duopoly/leader.hpp"
#include "duopoly/params.hpp"
#include "duopoly/verification.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace duopoly;

namespace {

enum Exit { ok = 0, verify_failed = 1, config_error = 2, solver_error = 3 };

struct Options {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<double> dt;
    std::size_t grid = 400;
    std::optional<double> zlo;
    std::optional<double> zhi;
    std::vector<double> z0;
    std::vector<int> only;
};

ModelConfig load(const Options& o) {
    ModelConfig c = load_config(o.config);
    if (o.seed) c.sim.seed = *o.seed;
    if (o.paths) c.sim.n_paths = *o.paths;
    if (o.dt) c.sim.dt = *o.dt;
    c.sim.validate();
    return c;
}

fs::path out_file(const Options& o, const std::string& name) {
    fs::create_directories(o.out);
    return fs::path(o.out) / name;
}

void write_json(const Options& o, const std::string& name, const json& j) {
    const fs::path p = out_file(o, name);
    std::ofstream f(p);
    if (!f) throw ConfigError("out: cannot write '" + p.string() + "'");
    f << j.dump(2) << "\n";
    std::cout << p.string() << "\n";
}

struct Geometry {
    std::optional<PreemptionIntervals> a;
    std::optional<EquilibriumProfile> profile;
    std::string problem;
};

Geometry try_geometry(const PayoffModel& m) {
    Geometry g;
    try {
        const ScenarioReport sc = check_scenario(m);
        if (!sc.holds()) g.problem = "scenario conditions fail (L > F below z1: " + std::string(sc.below_z1 ? "yes" : "no") +
                                     ", in (z2, z3): " + (sc.in_band ? "yes" : "no") + ")";
        const PreemptionIntervals a = find_intervals(m);
        g.a = a;
        g.profile = build_profile(m, a, compute_b_sets(m, a));
    } catch (const GeometryError& e) {
        if (g.problem.empty()) g.problem = e.what();
    }
    return g;
}

int cmd_solve(const Options& o) {
    const ModelConfig c = load(o);
    json j;
    try {
        const PayoffModel m = build_model(c.market, c.econ);
        j = {{"config", {{"market", c.market}, {"econ", c.econ}}},
             {"roots", m.roots},
             {"root_residuals",
              {{"gamma", relative_root_residual(c.market, m.roots.gamma)},
               {"beta", relative_root_residual(c.market, m.roots.beta)}}},
             {"coeffs", derive_coeffs(c.market, c.econ)},
             {"follower_low", m.follower_low},
             {"follower_high", m.follower_high},
             {"leader", m.leader}};
    } catch (const SolverError& e) {
        write_json(o, "solve_error.json", {{"error", e.what()}, {"config", {{"market", c.market}, {"econ", c.econ}}}});
        std::cerr << "solver failure: " << e.what() << "\n";
        return solver_error;
    }
    write_json(o, "solution.json", j);
    return ok;
}

int cmd_curves(const Options& o) {
    const ModelConfig c = load(o);
    const PayoffModel m = build_model(c.market, c.econ);
    const double zlo = o.zlo.value_or(m.follower_high.z_h / 20.0);
    const double zhi = o.zhi.value_or(3.0 * m.follower_low.z3);
    if (!(zlo > 0.0 && zhi > zlo)) throw DomainError("curves: need 0 < zlo < zhi");
    if (o.grid < 2) throw DomainError("curves: grid must be >= 2");
    const Geometry g = try_geometry(m);

    const fs::path p = out_file(o, "curves.csv");
    std::ofstream f(p);
    if (!f) throw ConfigError("out: cannot write '" + p.string() + "'");
    f.precision(12);
    if (!g.problem.empty()) f << "# scenario check: " << g.problem << "\n";
    f << "z,C,F,L,F_L,F_H,L_L,L_H,alpha_i,alpha_j,region_label\n";
    for (std::size_t k = 0; k < o.grid; ++k) {
        const double z = zlo * std::pow(zhi / zlo, static_cast<double>(k) / static_cast<double>(o.grid - 1));
        f << z << ',' << m.C(z) << ',' << m.F(z) << ',' << m.L(z) << ',' << eval_low(z, m.follower_low) << ','
          << eval_high(z, m.follower_high) << ',' << m.leader.low_value(z) << ',' << m.leader.high_value(z) << ',';
        if (g.profile) {
            f << g.profile->alpha_i(z) << ',' << g.profile->alpha_j(z) << ',' << to_string(classify_demand(z, *g.profile));
        } else {
            f << "nan,nan,unavailable";
        }
        f << "\n";
    }
    std::cout << p.string() << "\n";
    return ok;
}

int cmd_intervals(const Options& o) {
    const ModelConfig c = load(o);
    const PayoffModel m = build_model(c.market, c.econ);
    const ScenarioReport sc = check_scenario(m);
    const PreemptionIntervals a = find_intervals(m, o.grid < 4096 ? 4096 : o.grid);
    json ends = json::array();
    for (double z : {a.a1_lo, a.a1_hi, a.a2_lo, a.a2_hi}) {
        ends.push_back({{"z", z}, {"L", m.L(z)}, {"F", m.F(z)}, {"alpha", alpha_at(z, m)}});
    }
    write_json(o, "intervals.json", {{"scenario", sc}, {"intervals", a}, {"endpoints", ends}});
    return ok;
}

int cmd_bsets(const Options& o) {
    const ModelConfig c = load(o);
    const PayoffModel m = build_model(c.market, c.econ);
    const PreemptionIntervals a = find_intervals(m);
    const BSets b = compute_b_sets(m, a);
    const EquilibriumProfile prof = build_profile(m, a, b);
    json j = b;
    j["intervals"] = a;
    j["vacuum"] = prof.has_vacuum();
    j["vacuum_intervals"] = prof.vacuum();
    write_json(o, "bsets.json", j);
    return ok;
}

int cmd_simulate(const Options& o) {
    const ModelConfig c = load(o);
    if (o.z0.empty()) throw DomainError("simulate: --z0 is required");
    const PayoffModel m = build_model(c.market, c.econ);
    const PreemptionIntervals a = find_intervals(m);
    const EquilibriumProfile prof = build_profile(m, a, compute_b_sets(m, a));
    const StrategySpec si = eager_strategy(prof);
    const StrategySpec sj = patient_strategy(prof);
    const IntervalSet stop = si.active_set().unite(sj.active_set());
    json runs = json::array();
    for (double z0 : o.z0) {
        const SubgameValue v = simulate_subgame(z0, 0.0, si, sj, c.sim, m);
        json r = v;
        r["z0"] = z0;
        r["region_label"] = to_string(classify_demand(z0, prof));
        r["immediate"] = stop.contains(z0);
        if (stop.contains(z0)) r["roles"] = to_string(resolve_stop(z0, si, sj, m).roles);
        runs.push_back(r);
    }
    write_json(o, "simulate.json", {{"profile", {{"i", si}, {"j", sj}}}, {"sim", c.sim}, {"runs", runs}});
    return ok;
}

int cmd_deviate(const Options& o) {
    const ModelConfig c = load(o);
    const PayoffModel m = build_model(c.market, c.econ);
    const PreemptionIntervals a = find_intervals(m);
    const EquilibriumProfile prof = build_profile(m, a, compute_b_sets(m, a));
    const StrategySpec si = eager_strategy(prof);
    const StrategySpec sj = patient_strategy(prof);
    std::vector<double> z0s = o.z0;
    if (z0s.empty()) z0s = {a.a1_lo / 2.0, 0.5 * (a.a1_lo + a.a1_hi), 0.5 * (a.a1_hi + a.a2_lo),
                            0.5 * (a.a2_lo + a.a2_hi), 2.0 * a.a2_hi};
    const auto family = threshold_family(0.5 * a.a1_lo, 3.0 * a.a2_hi);
    const auto reports = deviation_test(si, sj, "ij", family, z0s, c.sim, m);
    bool holds = true;
    for (const auto& r : reports) holds = holds && r.holds();
    write_json(o, "deviations.json",
               {{"profile", {{"i", si}, {"j", sj}}},
                {"sim", c.sim},
                {"holds", holds},
                {"reports", reports},
                {"symmetric_counterexample", symmetric_counterexample(prof, c.sim)}});
    return ok;
}

int cmd_verify(const Options& o) {
    const ModelConfig c = load(o);
    VerifyOptions v;
    v.paths = o.paths;
    v.dt = o.dt;
    v.only = o.only;
    const VerificationReport rep = run_verification(c, v);
    for (const auto& r : rep.criteria) std::cout << format_line(r) << "\n";
    write_json(o, "verification.json", rep);
    return rep.all_passed() ? ok : verify_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Duopoly investment timing game under GBM demand"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--config", o.config, "model config (key=value)")->required()->check(CLI::ExistingFile);
    app.add_option("--out", o.out, "output directory");
    app.add_option("--seed", o.seed, "Monte Carlo seed");
    app.add_option("--paths", o.paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
    app.add_option("--dt", o.dt, "Monte Carlo time step")->check(CLI::PositiveNumber);
    app.add_option("--grid", o.grid, "grid points");
    app.add_option("--zlo", o.zlo, "lowest demand level");
    app.add_option("--zhi", o.zhi, "highest demand level");
    app.add_option("--z0", o.z0, "starting demand level(s)");

    int (*handler)(const Options&) = nullptr;
    auto sub = [&](const char* name, const char* help, int (*fn)(const Options&)) {
        auto* s = app.add_subcommand(name, help);
        s->callback([&handler, fn] { handler = fn; });
        return s;
    };
    sub("solve", "roots, thresholds, coefficients and pasting residuals", cmd_solve);
    sub("curves", "C, F, L and alpha on a geometric grid (CSV)", cmd_curves);
    sub("intervals", "scenario check and preemption intervals", cmd_intervals);
    sub("bsets", "B-sets and vacuum report", cmd_bsets);
    sub("simulate", "subgame values of the asymmetric profile", cmd_simulate);
    sub("deviate", "unilateral deviation tests", cmd_deviate);
    sub("verify", "acceptance checks", cmd_verify)->add_option("--only", o.only, "check ids to run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }
    try {
        return handler(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const DomainError& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return config_error;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return solver_error;
    } catch (const GeometryError& e) {
        std::cerr << "geometry failure: " << e.what() << "\n";
        return solver_error;
    }
}
