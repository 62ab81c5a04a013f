#include "idp/baselines.hpp"

#include <limits>
#include <utility>

namespace idp {

Offer greedy_decide(const IdpModel& model, const JointPrior& prior,
                    const IncentiveRanges& ranges) {
    const int n_actions = model.num_actions();
    std::vector<BeliefVector> beliefs;
    beliefs.reserve(n_actions);
    for (int n = 0; n < n_actions; ++n) beliefs.push_back(marginal(prior, ranges, n));

    double best = std::numeric_limits<double>::infinity();
    Offer choice{};
    for (int k = 0; k < model.num_incentives(); ++k) {
        for (int n = 0; n < n_actions; ++n) {
            if (k < ranges.lower(n) || k > ranges.upper(n)) continue;
            double p_acc = 0.0;
            for (int j = ranges.lower(n); j <= k; ++j) p_acc += beliefs[n].probs[j];
            p_acc = std::min(p_acc, 1.0);
            const double cost =
                p_acc * (model.incentive(k) + model.action_cost(n)) +
                (1.0 - p_acc) * model.default_cost();
            if (cost < best) {
                best = cost;
                choice = Offer{n, k};
            }
        }
    }
    return choice;
}

GreedyPolicy::GreedyPolicy(IdpModel model, JointPrior prior)
    : model_(std::move(model)), prior_(std::move(prior)),
      ranges_(IncentiveRanges::full(model_.num_actions(), model_.num_incentives())) {}

void GreedyPolicy::reset(const IdpModel& model, const JointPrior& prior) {
    if (model.num_actions() != model_.num_actions() ||
        model.num_incentives() != model_.num_incentives())
        throw ValidationError("greedy policy built for a different instance shape");
    (void)prior;
    ranges_ = IncentiveRanges::full(model_.num_actions(), model_.num_incentives());
}

Offer GreedyPolicy::decide(int) {
    return last_offer_ = greedy_decide(model_, prior_, ranges_);
}

void GreedyPolicy::observe(Outcome outcome) {
    ranges_ = update_ranges(ranges_, last_offer_, outcome);
}

DaaPolicy::DaaPolicy(IdpModel model)
    : model_(std::move(model)),
      ranges_(IncentiveRanges::full(model_.num_actions(), model_.num_incentives())) {}

void DaaPolicy::reset(const IdpModel& model, const JointPrior& prior) {
    if (model.num_actions() != model_.num_actions() ||
        model.num_incentives() != model_.num_incentives())
        throw ValidationError("daa policy built for a different instance shape");
    (void)prior;
    ranges_ = IncentiveRanges::full(model_.num_actions(), model_.num_incentives());
    diagnosing_ = 0;
    acting_.reset();
}

Offer DaaPolicy::decide(int) {
    if (!acting_) {
        // Cross-action clamps may have collapsed later intervals already.
        while (diagnosing_ < model_.num_actions() && ranges_.collapsed(diagnosing_))
            ++diagnosing_;
        if (diagnosing_ >= model_.num_actions()) {
            // Every threshold identified: act on the cheapest pair.
            int best = 0;
            double best_cost = model_.action_cost(0) + model_.incentive(ranges_.lower(0));
            for (int n = 1; n < model_.num_actions(); ++n) {
                const double cost =
                    model_.action_cost(n) + model_.incentive(ranges_.lower(n));
                if (cost < best_cost) {
                    best = n;
                    best_cost = cost;
                }
            }
            acting_ = Offer{best, ranges_.lower(best)};
        }
    }
    if (acting_) return last_offer_ = *acting_;
    const int n = diagnosing_;
    const int mid = (ranges_.lower(n) + ranges_.upper(n)) / 2;
    return last_offer_ = Offer{n, mid};
}

void DaaPolicy::observe(Outcome outcome) {
    if (acting_) return;
    ranges_ = update_ranges(ranges_, last_offer_, outcome);
}

} // namespace idp
