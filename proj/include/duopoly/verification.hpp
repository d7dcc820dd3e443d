#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "duopoly/params.hpp"

namespace duopoly {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool ok = false;         // the numerical check itself
    double seconds = 0.0;
    double budget = 0.0;     // runtime limit in seconds, 0 = none
    std::string summary;
    nlohmann::json details;

    bool within_budget() const { return budget <= 0.0 || seconds < budget; }
    bool passed() const { return ok && within_budget(); }
};

struct VerifyOptions {
    /// Overrides the per-check Monte Carlo path counts and step when set.
    std::optional<std::size_t> paths;
    std::optional<double> dt;
    /// Checks to run (1..12); empty runs all.
    std::vector<int> only;
};

struct VerificationReport {
    std::vector<CriterionResult> criteria;
    bool all_passed() const;
};

/// Runs the acceptance suite against `config` (its sim block supplies seed,
/// horizon and monitoring).
VerificationReport run_verification(const ModelConfig& config, const VerifyOptions& opt = {});

CriterionResult check_roots(std::uint64_t seed, std::size_t n = 1000);
CriterionResult check_pasting(const ModelConfig& config);
CriterionResult check_hjb(const ModelConfig& config);
CriterionResult check_mc_oracles(const ModelConfig& config, const SimConfig& sim);
CriterionResult check_geometry(const ModelConfig& config, std::uint64_t seed, std::size_t n_random = 200);
CriterionResult check_alpha_bounds(const ModelConfig& config);
CriterionResult check_hitting(const ModelConfig& config, const SimConfig& sim);
CriterionResult check_b_sets(const ModelConfig& config, std::uint64_t seed);
CriterionResult check_deviations(const ModelConfig& config, const SimConfig& sim);
CriterionResult check_counterexample(const ModelConfig& config, const SimConfig& sim);
CriterionResult check_indifference();
CriterionResult check_vacuum(const ModelConfig& config);

/// One line per criterion: "PASS  3  HJB residuals  (0.01 s)  ...".
std::string format_line(const CriterionResult& r);

void to_json(nlohmann::json& j, const CriterionResult& r);
void to_json(nlohmann::json& j, const VerificationReport& r);

}  // namespace duopoly
