#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "idp/model.hpp"

namespace idp {

/// One experiment, fully determined: instance shape, prior, algorithm set,
/// horizons, Monte Carlo budget and seed. Serializes to a flat key = value
/// text block that parses back losslessly, so a logged config is sufficient
/// to reproduce a run exactly.
struct ExperimentConfig {
    int n_actions = 3;
    int n_incentives = 5;
    double eta = 1.0;
    double default_cost = 2.0;
    std::vector<int> horizons = {20};
    double gamma = 1.0;
    std::string prior = "uniform"; ///< "uniform" or inline "(t1,..,tN):w;..." (1-based)
    std::vector<std::string> algorithms = {"exact", "seq", "greedy", "daa"};
    long runs = 1000;
    int rounds = 10;
    std::uint64_t seed = 1;
    std::string output;
    std::vector<int> grid_actions;    ///< bench grid over N; empty = none
    std::vector<int> grid_incentives; ///< bench grid over K; empty = none

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses "key = value" lines ('#' starts a comment). Unknown keys and
/// malformed values raise ValidationError naming the offender.
ExperimentConfig parse_config(const std::string& text);

std::string serialize_config(const ExperimentConfig& config);

/// "1,2,5" or the range form "1-20"; both may be mixed ("1-3,10").
std::vector<int> parse_int_list(const std::string& text);

/// Builds the configured instance: action costs (n/N)^eta, ladder k/K, the
/// configured default cost and discount.
IdpModel config_model(const ExperimentConfig& config);

/// Builds the configured prior ("uniform" or the inline table).
JointPrior config_prior(const ExperimentConfig& config);

} // namespace idp
