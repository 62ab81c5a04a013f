#pragma once

#include <utility>
#include <vector>

#include "idp/model.hpp"
#include "idp/rng.hpp"
#include "idp/sim.hpp"

namespace idp::test {

/// Repeats one offer forever; the simplest deterministic decider.
class FixedOfferPolicy final : public Decider {
  public:
    explicit FixedOfferPolicy(Offer offer) : offer_(offer) {}
    void reset(const IdpModel&, const JointPrior&) override {}
    Offer decide(int) override { return offer_; }
    void observe(Outcome) override {}

  private:
    Offer offer_;
};

/// Random prior over the monotone tuples with weights bounded away from
/// zero, so every observation branch stays live.
inline JointPrior random_prior(int n_actions, int n_incentives, SplitMix64& rng) {
    JointPrior uniform = uniform_monotone_prior(n_actions, n_incentives);
    std::vector<JointPrior::Entry> entries = uniform.entries();
    double total = 0.0;
    for (auto& e : entries) {
        e.weight = 0.05 + rng.next_double();
        total += e.weight;
    }
    for (auto& e : entries) e.weight /= total;
    return JointPrior(n_actions, n_incentives, std::move(entries));
}

/// Valid ranges guaranteed to contain `truth`: a few random observations of
/// an agent with those thresholds, applied to the full ranges.
inline IncentiveRanges random_consistent_ranges(const TrueIncentives& truth,
                                                int n_incentives, SplitMix64& rng,
                                                int n_observations) {
    const int n_actions = static_cast<int>(truth.thresholds.size());
    IncentiveRanges ranges = IncentiveRanges::full(n_actions, n_incentives);
    for (int i = 0; i < n_observations; ++i) {
        const int action = static_cast<int>(rng.next() % n_actions);
        const int incentive = static_cast<int>(rng.next() % n_incentives);
        const Offer offer{action, incentive};
        const Outcome outcome = incentive >= truth.thresholds[action] ? Outcome::Accept
                                                                      : Outcome::Reject;
        ranges = update_ranges(ranges, offer, outcome);
    }
    return ranges;
}

/// Independent belief oracle: enumerate all tuples, zero those outside the
/// box, renormalize.
inline std::vector<double> direct_conditioning(const JointPrior& prior,
                                               const IncentiveRanges& ranges,
                                               int action) {
    std::vector<double> probs(prior.num_incentives(), 0.0);
    double total = 0.0;
    for (const auto& e : prior.entries()) {
        bool inside = true;
        for (int n = 0; n < ranges.num_actions(); ++n)
            if (e.thresholds[n] < ranges.lower(n) || e.thresholds[n] > ranges.upper(n))
                inside = false;
        if (!inside) continue;
        probs[e.thresholds[action]] += e.weight;
        total += e.weight;
    }
    for (double& p : probs) p /= total;
    return probs;
}

} // namespace idp::test
