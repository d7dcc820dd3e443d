#pragma once

// Shared log-path generator for the Monte Carlo kernels. Every path owns its
// own engine seeded from (master seed, path id), so a path's increments do not
// depend on how long other paths ran or on how paths are split across threads.
// Bridge uniforms are counter-based on (seed, path, step), so two kernels that
// visit the same step see the same bridge extreme.

#include <cmath>
#include <cstdint>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "duopoly/params.hpp"

namespace duopoly::detail {

inline constexpr std::size_t kChunkPaths = 256;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform on (0, 1].
inline double counter_uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t step, std::uint64_t lane) {
    const std::uint64_t h = splitmix64(splitmix64(seed ^ splitmix64(path)) + 2 * step + lane);
    return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

class PathStepper {
public:
    PathStepper(const SimConfig& cfg, const MarketParams& m, std::uint64_t path_id)
        : seed_(cfg.seed),
          path_(path_id),
          dt_(cfg.dt),
          drift_((m.alpha - 0.5 * m.sigma * m.sigma) * cfg.dt),
          vol_(m.sigma * std::sqrt(cfg.dt)),
          bridge_var2_(2.0 * m.sigma * m.sigma * cfg.dt),
          bridge_(cfg.monitoring == Monitoring::bridge),
          engine_(splitmix64(cfg.seed ^ splitmix64(path_id + 0x5851f42d4c957f2dULL))) {}

    /// Advance one step: x_prev <- x, x <- x + drift + vol * N(0,1).
    void advance() {
        x_prev_ = x_;
        x_ = x_prev_ + drift_ + vol_ * normal_(engine_);
        ++step_;
    }

    double x() const { return x_; }
    double x_prev() const { return x_prev_; }
    /// Index of the step just taken (covers [t_{k}, t_{k+1}] with k = step() - 1).
    std::size_t step() const { return step_; }
    double reach() const { return 8.0 * vol_; }
    double dt() const { return dt_; }
    bool bridge() const { return bridge_; }

    /// Maximum of the log path over the last step (exact Brownian-bridge
    /// sample in bridge mode, larger grid endpoint in grid mode).
    double step_max() const {
        if (!bridge_) return std::max(x_prev_, x_);
        const double u = counter_uniform(seed_, path_, step_ - 1, 0);
        const double d = x_ - x_prev_;
        return 0.5 * (x_prev_ + x_ + std::sqrt(d * d - bridge_var2_ * std::log(u)));
    }

    double step_min() const {
        if (!bridge_) return std::min(x_prev_, x_);
        const double u = counter_uniform(seed_, path_, step_ - 1, 1);
        const double d = x_ - x_prev_;
        return 0.5 * (x_prev_ + x_ - std::sqrt(d * d - bridge_var2_ * std::log(u)));
    }

    /// Time assigned to a crossing detected during the last step.
    double crossing_time() const {
        const double k = static_cast<double>(step_ - 1);
        return bridge_ ? (k + 0.5) * dt_ : (k + 1.0) * dt_;
    }

private:
    std::uint64_t seed_;
    std::uint64_t path_;
    double dt_;
    double drift_;
    double vol_;
    double bridge_var2_;
    bool bridge_;
    boost::random::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_;
    double x_ = 0.0;
    double x_prev_ = 0.0;
    std::size_t step_ = 0;
};

/// Running mean / M2 accumulator (Welford) with Chan's pairwise merge.
struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double v) {
        n += 1.0;
        const double d = v - mean;
        mean += d / n;
        m2 += d * (v - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0.0) return;
        if (n == 0.0) {
            *this = o;
            return;
        }
        const double total = n + o.n;
        const double d = o.mean - mean;
        mean += d * o.n / total;
        m2 += o.m2 + d * d * n * o.n / total;
        n = total;
    }

    double std_error() const { return n > 1.0 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0; }
};

}  // namespace duopoly::detail
