#include "duopoly/monte_carlo.hpp"

#include <algorithm>
#include <cmath>

#include "duopoly/errors.hpp"
#include "path_stepper.hpp"

namespace duopoly {

bool McEstimate::agrees_with(double reference, double k) const {
    return std::abs(estimate - reference) <= k * std_error + 1e-12 * (1.0 + std::abs(reference));
}

double McEstimate::z_score(double reference) const {
    const double diff = estimate - reference;
    if (std_error > 0.0) return diff / std_error;
    return std::abs(diff) <= 1e-12 * (1.0 + std::abs(reference)) ? 0.0 : std::copysign(kInf, diff);
}

void to_json(nlohmann::json& j, const McEstimate& e) {
    j = {{"estimate", e.estimate}, {"stderr", e.std_error}, {"n_paths", e.n_paths}, {"cap_fraction", e.cap_fraction}};
}

PathEnsemble simulate_paths(double z0, const SimConfig& cfg, const MarketParams& market) {
    if (!(z0 > 0.0)) throw DomainError("simulate_paths: z0 must be > 0");
    cfg.validate();
    PathEnsemble out;
    out.z0 = z0;
    out.dt = cfg.dt;
    out.n_paths = cfg.n_paths;
    out.n_steps = cfg.n_steps();
    out.values.resize(out.n_paths * (out.n_steps + 1));
    const auto n = static_cast<std::int64_t>(out.n_paths);
#pragma omp parallel for schedule(static)
    for (std::int64_t p = 0; p < n; ++p) {
        detail::PathStepper s(cfg, market, static_cast<std::uint64_t>(p));
        double* row = out.values.data() + static_cast<std::size_t>(p) * (out.n_steps + 1);
        row[0] = z0;
        for (std::size_t k = 1; k <= out.n_steps; ++k) {
            s.advance();
            row[k] = z0 * std::exp(s.x());
        }
    }
    return out;
}

PathPayoff discounted_reward(std::function<double(double)> reward, double r) {
    return [reward = std::move(reward), r](const StopEvent& e) {
        return e.capped ? 0.0 : std::exp(-r * e.tau) * reward(e.z);
    };
}

namespace {

struct Target {
    double z0 = 0.0;
    double up = kInf;     // log offset of the upper gap end
    double down = -kInf;  // log offset of the lower gap end
    double hi_z = kInf;
    double lo_z = 0.0;
    bool inside = false;  // z0 already in the stop set
};

std::vector<Target> make_targets(std::span<const double> z0s, const IntervalSet& stop) {
    if (stop.empty()) throw DomainError("mc_policy_values: stopping region is empty");
    std::vector<Target> out;
    out.reserve(z0s.size());
    for (double z0 : z0s) {
        if (!(z0 > 0.0)) throw DomainError("mc_policy_values: z0 must be > 0");
        Target t;
        t.z0 = z0;
        if (stop.contains(z0)) {
            t.inside = true;
        } else {
            const Gap g = stop.gap_around(z0);
            t.hi_z = g.hi;
            t.lo_z = g.lo;
            t.up = std::isfinite(g.hi) ? std::log(g.hi / z0) : kInf;
            t.down = g.lo > 0.0 ? std::log(g.lo / z0) : -kInf;
        }
        out.push_back(t);
    }
    return out;
}

// Running trapezoid of exp(x - r t) over whole steps, in units of z0.
struct Integral {
    bool on = false;
    double r = 0.0;
    double cum = 0.0;
    double left = 1.0;  // exp(x_prev - r t_prev)

    void step(double x, double t) {
        if (!on) return;
        const double right = std::exp(x - r * t);
        cum += 0.5 * (t - last_t) * (left + right);
        left = right;
        last_t = t;
    }
    // Integral up to a crossing at level x_hit, time tau inside the last step.
    double until(double x_hit, double tau, double prev_cum, double prev_left, double prev_t) const {
        if (!on) return 0.0;
        return prev_cum + 0.5 * (tau - prev_t) * (prev_left + std::exp(x_hit - r * tau));
    }
    double last_t = 0.0;
};

StopEvent crossing_event(const detail::PathStepper& s, const Target& t, bool upper, const Integral& before) {
    const double level = upper ? t.up : t.down;
    StopEvent e;
    e.tau = s.crossing_time();
    if (s.bridge()) {
        e.z = upper ? t.hi_z : t.lo_z;
    } else {
        // grid value, kept inside the stop set under rounding
        e.z = t.z0 * std::exp(s.x());
        e.z = upper ? std::max(e.z, t.hi_z) : std::min(e.z, t.lo_z);
    }
    const double x_hit = s.bridge() ? level : s.x();
    e.disc_integral = t.z0 * before.until(x_hit, e.tau, before.cum, before.left, before.last_t);
    return e;
}

StopEvent capped_event(const detail::PathStepper& s, const Target& t, const Integral& in, double horizon) {
    StopEvent e;
    e.tau = horizon;
    e.z = t.z0 * std::exp(s.x());
    e.disc_integral = t.z0 * in.cum;
    e.capped = true;
    return e;
}

StopEvent immediate_event(double z0) {
    StopEvent e;
    e.z = z0;
    return e;
}

struct ChunkResult {
    std::vector<detail::Moments> moments;  // [target * n_payoffs + payoff]
    std::vector<double> capped;            // per target
};

// Steps one path and resolves every still-running target against it.
void run_path(std::uint64_t path_id, const std::vector<Target>& targets, std::span<const PathPayoff> payoffs,
              const SimConfig& cfg, const MarketParams& market, IntegralTracking tracking, ChunkResult& acc,
              std::vector<std::size_t>& active) {
    const std::size_t np = payoffs.size();
    auto record = [&](std::size_t ti, const StopEvent& e) {
        for (std::size_t p = 0; p < np; ++p) acc.moments[ti * np + p].add(payoffs[p](e));
        if (e.capped) acc.capped[ti] += 1.0;
    };

    active.clear();
    double next_up = kInf;
    double next_down = -kInf;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i].inside) continue;
        active.push_back(i);
        next_up = std::min(next_up, targets[i].up);
        next_down = std::max(next_down, targets[i].down);
    }
    if (active.empty()) return;

    detail::PathStepper s(cfg, market, path_id);
    Integral integral;
    integral.on = tracking == IntegralTracking::on;
    integral.r = market.r;
    const std::size_t n_steps = cfg.n_steps();
    const double reach = s.reach();

    for (std::size_t k = 0; k < n_steps && !active.empty(); ++k) {
        s.advance();
        const Integral before = integral;
        bool changed = false;
        if (std::max(s.x(), s.x_prev()) > next_up - reach) {
            const double m = s.step_max();
            if (m >= next_up) {
                for (std::size_t& ti : active) {
                    if (ti != SIZE_MAX && targets[ti].up <= m) {
                        record(ti, crossing_event(s, targets[ti], true, before));
                        ti = SIZE_MAX;
                        changed = true;
                    }
                }
            }
        }
        if (std::min(s.x(), s.x_prev()) < next_down + reach) {
            const double m = s.step_min();
            if (m <= next_down) {
                for (std::size_t& ti : active) {
                    if (ti != SIZE_MAX && targets[ti].down >= m) {
                        record(ti, crossing_event(s, targets[ti], false, before));
                        ti = SIZE_MAX;
                        changed = true;
                    }
                }
            }
        }
        if (changed) {
            std::erase(active, SIZE_MAX);
            next_up = kInf;
            next_down = -kInf;
            for (std::size_t ti : active) {
                next_up = std::min(next_up, targets[ti].up);
                next_down = std::max(next_down, targets[ti].down);
            }
        }
        integral.step(s.x(), static_cast<double>(k + 1) * cfg.dt);
    }
    for (std::size_t ti : active) record(ti, capped_event(s, targets[ti], integral, static_cast<double>(n_steps) * cfg.dt));
}

std::vector<std::vector<McEstimate>> finish(const std::vector<Target>& targets, std::span<const PathPayoff> payoffs,
                                            const ChunkResult& total, std::size_t n_paths) {
    const std::size_t np = payoffs.size();
    std::vector<std::vector<McEstimate>> out(targets.size(), std::vector<McEstimate>(np));
    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
        for (std::size_t p = 0; p < np; ++p) {
            McEstimate& e = out[ti][p];
            e.n_paths = n_paths;
            if (targets[ti].inside) {
                e.estimate = payoffs[p](immediate_event(targets[ti].z0));
                continue;
            }
            const detail::Moments& m = total.moments[ti * np + p];
            e.estimate = m.mean;
            e.std_error = m.std_error();
            e.cap_fraction = total.capped[ti] / static_cast<double>(n_paths);
        }
    }
    return out;
}

ChunkResult empty_result(std::size_t n_targets, std::size_t n_payoffs) {
    return ChunkResult{std::vector<detail::Moments>(n_targets * n_payoffs), std::vector<double>(n_targets, 0.0)};
}

void merge_into(ChunkResult& into, const ChunkResult& from) {
    for (std::size_t i = 0; i < into.moments.size(); ++i) into.moments[i].merge(from.moments[i]);
    for (std::size_t i = 0; i < into.capped.size(); ++i) into.capped[i] += from.capped[i];
}

}  // namespace

std::vector<std::vector<McEstimate>> mc_policy_values(std::span<const double> z0s, const IntervalSet& stop,
                                                      std::span<const PathPayoff> payoffs, const SimConfig& cfg,
                                                      const MarketParams& market, IntegralTracking tracking) {
    cfg.validate();
    const std::vector<Target> targets = make_targets(z0s, stop);
    const std::size_t n_chunks = (cfg.n_paths + detail::kChunkPaths - 1) / detail::kChunkPaths;
    std::vector<ChunkResult> chunks(n_chunks);

#pragma omp parallel
    {
        std::vector<std::size_t> active;
        active.reserve(targets.size());
#pragma omp for schedule(dynamic, 1)
        for (std::int64_t c = 0; c < static_cast<std::int64_t>(n_chunks); ++c) {
            ChunkResult acc = empty_result(targets.size(), payoffs.size());
            const std::size_t first = static_cast<std::size_t>(c) * detail::kChunkPaths;
            const std::size_t last = std::min(first + detail::kChunkPaths, cfg.n_paths);
            for (std::size_t p = first; p < last; ++p) run_path(p, targets, payoffs, cfg, market, tracking, acc, active);
            chunks[static_cast<std::size_t>(c)] = std::move(acc);
        }
    }

    ChunkResult total = empty_result(targets.size(), payoffs.size());
    for (const ChunkResult& c : chunks) merge_into(total, c);
    return finish(targets, payoffs, total, cfg.n_paths);
}

McEstimate mc_policy_value(double z0, const IntervalSet& stop, const PathPayoff& payoff, const SimConfig& cfg,
                           const MarketParams& market, IntegralTracking tracking) {
    const double z[] = {z0};
    const PathPayoff p[] = {payoff};
    return mc_policy_values(z, stop, p, cfg, market, tracking)[0][0];
}

namespace reference {

std::vector<std::vector<McEstimate>> mc_policy_values(std::span<const double> z0s, const IntervalSet& stop,
                                                      std::span<const PathPayoff> payoffs, const SimConfig& cfg,
                                                      const MarketParams& market, IntegralTracking tracking) {
    cfg.validate();
    const std::vector<Target> targets = make_targets(z0s, stop);
    const std::size_t np = payoffs.size();
    const std::size_t n_steps = cfg.n_steps();
    const double horizon = static_cast<double>(n_steps) * cfg.dt;
    ChunkResult total = empty_result(targets.size(), np);

    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
        const Target& t = targets[ti];
        if (t.inside) continue;
        const double lo = t.lo_z;
        const double hi = t.hi_z;
        for (std::size_t p = 0; p < cfg.n_paths; ++p) {
            detail::PathStepper s(cfg, market, p);
            const bool bridge = cfg.monitoring == Monitoring::bridge;
            double cum = 0.0;
            double left = t.z0;
            double t_prev = 0.0;
            StopEvent e;
            e.capped = true;
            for (std::size_t k = 0; k < n_steps; ++k) {
                s.advance();
                const double t_now = static_cast<double>(k + 1) * cfg.dt;
                const double z_now = t.z0 * std::exp(s.x());
                const bool up = s.step_max() >= t.up;
                const bool down = !up && s.step_min() <= t.down;
                if (up || down) {
                    e.capped = false;
                    e.tau = bridge ? t_prev + 0.5 * cfg.dt : t_now;
                    e.z = bridge ? (up ? hi : lo) : (up ? std::max(z_now, hi) : std::min(z_now, lo));
                    if (tracking == IntegralTracking::on) {
                        e.disc_integral = cum + 0.5 * (e.tau - t_prev) * (left + e.z * std::exp(-market.r * e.tau));
                    }
                    break;
                }
                const double right = z_now * std::exp(-market.r * t_now);
                if (tracking == IntegralTracking::on) cum += 0.5 * cfg.dt * (left + right);
                left = right;
                t_prev = t_now;
            }
            if (e.capped) {
                e.tau = horizon;
                e.z = t.z0 * std::exp(s.x());
                e.disc_integral = tracking == IntegralTracking::on ? cum : 0.0;
            }
            for (std::size_t q = 0; q < np; ++q) total.moments[ti * np + q].add(payoffs[q](e));
            if (e.capped) total.capped[ti] += 1.0;
        }
    }
    return finish(targets, payoffs, total, cfg.n_paths);
}

}  // namespace reference

}  // namespace duopoly
