#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "idp/model.hpp"

namespace idp {

/// Uniform stateful policy interface driven by the episode loop. A decider's
/// choice must be a deterministic function of the observation history since
/// the last reset.
class Decider {
  public:
    virtual ~Decider() = default;

    virtual void reset(const IdpModel& model, const JointPrior& prior) = 0;
    virtual Offer decide(int remaining_horizon) = 0;
    virtual void observe(Outcome outcome) = 0;
};

/// The myopic agent: accepts exactly when the offered ladder index reaches
/// its hidden threshold for the offered action.
inline Outcome respond(const TrueIncentives& truth, Offer offer) {
    return offer.incentive >= truth.thresholds[offer.action] ? Outcome::Accept
                                                             : Outcome::Reject;
}

struct EpisodeStep {
    int step;
    Offer offer;
    Outcome outcome;
    double cost; ///< undiscounted per-step cost
};

struct EpisodeTrace {
    std::vector<EpisodeStep> steps;
    double total_cost = 0.0; ///< discount-weighted sum of step costs
};

/// Runs `horizon` decide -> respond -> observe interactions. The decider must
/// already be reset for this model and prior.
EpisodeTrace run_episode(const IdpModel& model, Decider& decider,
                         const TrueIncentives& truth, int horizon);

struct McStats {
    std::vector<double> round_means;
    double grand_mean = 0.0;
    double round_std = 0.0; ///< sample std across round means (0 when rounds == 1)
    long runs = 0;
    int rounds = 0;
    std::uint64_t seed = 0;

    double std_error() const {
        return rounds > 1 ? round_std / std::sqrt(static_cast<double>(rounds)) : 0.0;
    }
};

using DeciderFactory = std::function<std::unique_ptr<Decider>()>;

/// Monte Carlo policy evaluation: `rounds` rounds of `runs` episodes each,
/// every episode against a fresh threshold tuple drawn from the prior.
/// Episode seeds derive from (seed, round, run), so the statistics do not
/// depend on execution order.
McStats monte_carlo(const IdpModel& model, const JointPrior& prior,
                    const DeciderFactory& make_decider, int horizon, long runs,
                    int rounds, std::uint64_t seed);

struct BenchRow {
    std::string algorithm;
    int n_actions;
    int n_incentives;
    double median_ms;
};

using Planner = std::function<void(const IdpModel&, const JointPrior&)>;

/// Wall-clock planning time per (algorithm, instance); median of
/// `repetitions` runs, episode execution excluded.
std::vector<BenchRow> bench_planning(
    const std::vector<std::pair<IdpModel, JointPrior>>& grid,
    const std::vector<std::pair<std::string, Planner>>& algorithms,
    int repetitions = 5);

} // namespace idp
