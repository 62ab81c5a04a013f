#pragma once

#include <optional>

#include "idp/model.hpp"
#include "idp/sim.hpp"

namespace idp {

/// One-step greedy choice: the (action, incentive) pair minimizing expected
/// immediate cost under the current belief. Ties break toward the lower
/// incentive index, then the lower action index.
Offer greedy_decide(const IdpModel& model, const JointPrior& prior,
                    const IncentiveRanges& ranges);

/// Recomputes the greedy argmin from updated ranges at every step; no value
/// of information enters the choice.
class GreedyPolicy final : public Decider {
  public:
    GreedyPolicy(IdpModel model, JointPrior prior);

    void reset(const IdpModel& model, const JointPrior& prior) override;
    Offer decide(int remaining_horizon) override;
    void observe(Outcome outcome) override;

  private:
    IdpModel model_;
    JointPrior prior_;
    IncentiveRanges ranges_;
    Offer last_offer_{};
};

/// Diagnose-and-act: binary-searches every threshold in action order, then
/// commits to the cheapest identified pair for all remaining steps. With a
/// short horizon it may never leave the diagnosis phase.
class DaaPolicy final : public Decider {
  public:
    DaaPolicy(IdpModel model);

    void reset(const IdpModel& model, const JointPrior& prior) override;
    Offer decide(int remaining_horizon) override;
    void observe(Outcome outcome) override;

    bool acting() const { return acting_.has_value(); }

  private:
    IdpModel model_;
    IncentiveRanges ranges_;
    int diagnosing_ = 0; ///< current diagnosis action; N once all collapse
    std::optional<Offer> acting_;
    Offer last_offer_{};
};

} // namespace idp
