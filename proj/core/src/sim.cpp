#include "idp/sim.hpp"

#include <algorithm>
#include <chrono>

namespace idp {

EpisodeTrace run_episode(const IdpModel& model, Decider& decider,
                         const TrueIncentives& truth, int horizon) {
    if (horizon < 1) throw InvalidHorizon("episode horizon must be at least 1");
    EpisodeTrace trace;
    trace.steps.reserve(horizon);
    double weight = 1.0;
    for (int step = 0; step < horizon; ++step) {
        const Offer offer = decider.decide(horizon - step);
        const Outcome outcome = respond(truth, offer);
        const double cost = model.step_cost(offer, outcome);
        trace.steps.push_back({step, offer, outcome, cost});
        trace.total_cost += weight * cost;
        weight *= model.discount();
        decider.observe(outcome);
    }
    return trace;
}

McStats monte_carlo(const IdpModel& model, const JointPrior& prior,
                    const DeciderFactory& make_decider, int horizon, long runs,
                    int rounds, std::uint64_t seed) {
    if (runs < 1 || rounds < 1)
        throw ValidationError("monte_carlo needs at least one run and one round");
    McStats stats;
    stats.runs = runs;
    stats.rounds = rounds;
    stats.seed = seed;
    stats.round_means.reserve(rounds);
    for (int round = 0; round < rounds; ++round) {
        double sum = 0.0;
        for (long run = 0; run < runs; ++run) {
            SplitMix64 rng(derive_stream_seed(seed, static_cast<std::uint64_t>(round),
                                              static_cast<std::uint64_t>(run)));
            const TrueIncentives truth = sample_true_incentives(prior, rng);
            auto decider = make_decider();
            decider->reset(model, prior);
            sum += run_episode(model, *decider, truth, horizon).total_cost;
        }
        stats.round_means.push_back(sum / static_cast<double>(runs));
    }
    double grand = 0.0;
    for (double m : stats.round_means) grand += m;
    stats.grand_mean = grand / static_cast<double>(rounds);
    if (rounds > 1) {
        double ss = 0.0;
        for (double m : stats.round_means) {
            const double d = m - stats.grand_mean;
            ss += d * d;
        }
        stats.round_std = std::sqrt(ss / static_cast<double>(rounds - 1));
    }
    return stats;
}

std::vector<BenchRow> bench_planning(
    const std::vector<std::pair<IdpModel, JointPrior>>& grid,
    const std::vector<std::pair<std::string, Planner>>& algorithms,
    int repetitions) {
    using clock = std::chrono::steady_clock;
    if (repetitions < 1) throw ValidationError("bench needs at least one repetition");
    std::vector<BenchRow> rows;
    for (const auto& [name, plan] : algorithms) {
        for (const auto& [model, prior] : grid) {
            std::vector<double> times_ms;
            times_ms.reserve(repetitions);
            for (int rep = 0; rep < repetitions; ++rep) {
                const auto t0 = clock::now();
                plan(model, prior);
                const auto t1 = clock::now();
                times_ms.push_back(
                    std::chrono::duration<double, std::milli>(t1 - t0).count());
            }
            std::sort(times_ms.begin(), times_ms.end());
            rows.push_back({name, model.num_actions(), model.num_incentives(),
                            times_ms[times_ms.size() / 2]});
        }
    }
    return rows;
}

} // namespace idp
