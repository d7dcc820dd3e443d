#include "duopoly/params.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "duopoly/errors.hpp"

namespace duopoly {

void MarketParams::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma: must be > 0");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha: must be >= 0");
    if (!(alpha < r) || !std::isfinite(r)) throw ConfigError("r: must exceed alpha");
}

void EconParams::validate() const {
    if (!(pi_low > 0.0)) throw ConfigError("pi_low: must be > 0");
    if (!(pi_high > pi_low) || !std::isfinite(pi_high)) throw ConfigError("pi_high: must exceed pi_low");
    if (!(xi >= 0.0) || !std::isfinite(xi)) throw ConfigError("xi: must be >= 0");
    if (!(inv_cost > 0.0) || !std::isfinite(inv_cost)) throw ConfigError("inv_cost: must be > 0");
    if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta: must lie in (0,1)");
    if (!(p_high > 0.0 && p_high < 1.0)) throw ConfigError("p_high: must lie in (0,1)");
}

void SimConfig::validate() const {
    if (n_paths < 1) throw ConfigError("n_paths: must be >= 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt: must be > 0");
    if (!(horizon > dt) || !std::isfinite(horizon)) throw ConfigError("horizon: must exceed dt");
}

std::size_t SimConfig::n_steps() const {
    return static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
}

CharRoots char_roots(const MarketParams& m) {
    const double s2 = m.sigma * m.sigma;
    const double b = 0.5 - m.alpha / s2;
    const double disc = std::sqrt(b * b + 2.0 * m.r / s2);
    const double product = -2.0 * m.r / s2;
    // Compute the larger-magnitude root directly and recover the other from
    // the product of roots to avoid cancellation.
    CharRoots roots;
    if (b >= 0.0) {
        roots.gamma = b + disc;
        roots.beta = product / roots.gamma;
    } else {
        roots.beta = b - disc;
        roots.gamma = product / roots.beta;
    }
    return roots;
}

double relative_root_residual(const MarketParams& m, double x) {
    const double quad = 0.5 * m.sigma * m.sigma * x * (x - 1.0);
    const double lin = m.alpha * x;
    const double q = quad + lin - m.r;
    return std::abs(q) / (std::abs(quad) + std::abs(lin) + std::abs(m.r));
}

DerivedCoeffs derive_coeffs(const MarketParams& m, const EconParams& e) {
    const double growth = m.r - m.alpha;
    return DerivedCoeffs{
        .a1 = e.pi_low / growth,
        .a2 = e.expected_profit() / growth,
        .k1 = (1.0 - e.theta) * e.inv_cost,
        .k2 = e.inv_cost,
    };
}

double cournot_value(double z, const MarketParams& m, const EconParams& e) {
    return e.expected_profit() * z / (m.r - m.alpha) - e.inv_cost;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, std::string_view value) {
    double out = 0.0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
        throw ConfigError(key + ": expected a finite number, got '" + std::string(value) + "'");
    }
    return out;
}

std::uint64_t parse_uint(const std::string& key, std::string_view value) {
    std::uint64_t out = 0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + std::string(value) + "'");
    }
    return out;
}

const std::set<std::string> kRequired = {"alpha", "sigma", "r", "pi_low", "pi_high", "inv_cost", "theta"};

}  // namespace

ModelConfig parse_config(std::string_view text) {
    std::map<std::string, std::string> kv;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value, got '" + std::string(line) + "'");
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (kv.count(key)) throw ConfigError(key + ": duplicate key");
        kv.emplace(std::move(key), std::move(value));
    }

    for (const auto& key : kRequired) {
        if (!kv.count(key)) throw ConfigError(key + ": missing required key");
    }

    ModelConfig cfg;
    for (const auto& [key, value] : kv) {
        if (key == "alpha") cfg.market.alpha = parse_double(key, value);
        else if (key == "sigma") cfg.market.sigma = parse_double(key, value);
        else if (key == "r") cfg.market.r = parse_double(key, value);
        else if (key == "pi_low") cfg.econ.pi_low = parse_double(key, value);
        else if (key == "pi_high") cfg.econ.pi_high = parse_double(key, value);
        else if (key == "xi") cfg.econ.xi = parse_double(key, value);
        else if (key == "inv_cost") cfg.econ.inv_cost = parse_double(key, value);
        else if (key == "theta") cfg.econ.theta = parse_double(key, value);
        else if (key == "p_high") cfg.econ.p_high = parse_double(key, value);
        else if (key == "n_paths") cfg.sim.n_paths = parse_uint(key, value);
        else if (key == "dt") cfg.sim.dt = parse_double(key, value);
        else if (key == "horizon") cfg.sim.horizon = parse_double(key, value);
        else if (key == "seed") cfg.sim.seed = parse_uint(key, value);
        else if (key == "monitoring") {
            if (value == "bridge") cfg.sim.monitoring = Monitoring::bridge;
            else if (value == "grid") cfg.sim.monitoring = Monitoring::grid;
            else throw ConfigError("monitoring: expected 'bridge' or 'grid', got '" + value + "'");
        } else {
            throw ConfigError(key + ": unknown key");
        }
    }
    cfg.market.validate();
    cfg.econ.validate();
    cfg.sim.validate();
    return cfg;
}

ModelConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string format_config(const ModelConfig& c) {
    std::ostringstream out;
    out.precision(17);
    out << "alpha=" << c.market.alpha << "\n"
        << "sigma=" << c.market.sigma << "\n"
        << "r=" << c.market.r << "\n"
        << "pi_low=" << c.econ.pi_low << "\n"
        << "pi_high=" << c.econ.pi_high << "\n"
        << "xi=" << c.econ.xi << "\n"
        << "inv_cost=" << c.econ.inv_cost << "\n"
        << "theta=" << c.econ.theta << "\n"
        << "p_high=" << c.econ.p_high << "\n"
        << "n_paths=" << c.sim.n_paths << "\n"
        << "dt=" << c.sim.dt << "\n"
        << "horizon=" << c.sim.horizon << "\n"
        << "seed=" << c.sim.seed << "\n"
        << "monitoring=" << (c.sim.monitoring == Monitoring::bridge ? "bridge" : "grid") << "\n";
    return out.str();
}

void to_json(nlohmann::json& j, const MarketParams& m) {
    j = {{"alpha", m.alpha}, {"sigma", m.sigma}, {"r", m.r}};
}

void to_json(nlohmann::json& j, const EconParams& e) {
    j = {{"pi_low", e.pi_low}, {"pi_high", e.pi_high}, {"xi", e.xi},
         {"inv_cost", e.inv_cost}, {"theta", e.theta}, {"p_high", e.p_high}};
}

void to_json(nlohmann::json& j, const CharRoots& c) {
    j = {{"gamma", c.gamma}, {"beta", c.beta}};
}

void to_json(nlohmann::json& j, const DerivedCoeffs& d) {
    j = {{"a1", d.a1}, {"a2", d.a2}, {"k1", d.k1}, {"k2", d.k2}};
}

void to_json(nlohmann::json& j, const SimConfig& s) {
    j = {{"n_paths", s.n_paths}, {"dt", s.dt}, {"horizon", s.horizon}, {"seed", s.seed},
         {"monitoring", s.monitoring == Monitoring::bridge ? "bridge" : "grid"}};
}

nlohmann::json derived_summary(const MarketParams& market, const EconParams& econ) {
    const CharRoots roots = char_roots(market);
    return {
        {"market", market},
        {"econ", econ},
        {"roots", roots},
        {"root_residuals", {{"gamma", relative_root_residual(market, roots.gamma)},
                            {"beta", relative_root_residual(market, roots.beta)}}},
        {"coeffs", derive_coeffs(market, econ)},
        {"expected_profit", econ.expected_profit()},
    };
}

}  // namespace duopoly
