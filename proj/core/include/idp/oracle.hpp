#pragma once

#include "idp/model.hpp"
#include "idp/sim.hpp"

namespace idp {

/// Candidate set used by the history expectimax.
enum class OfferPruning {
    None,          ///< every (action, incentive) pair at every node
    SupportBounds, ///< only offers inside the posterior's per-action support
};

/// Optimal expected cost by brute-force search over full observation
/// histories. The posterior is recomputed from the raw history by direct
/// conditioning of the prior table at every node; the range reduction is
/// never used, which makes this an independent check of it. Supports both
/// undiscounted and discounted costs. Hard-guarded by instance size.
double expectimax_value(const IdpModel& model, const JointPrior& prior, int horizon,
                        OfferPruning pruning = OfferPruning::None);

/// Horizon-indexed backward induction over all reachable range boxes with
/// every offer (informative or not) legal at every step and no commit
/// shortcut. Undiscounted only.
double full_dp_value(const IdpModel& model, const JointPrior& prior, int horizon);

/// Exact expected cost of a deterministic decider: sums the discounted cost
/// of the unique trajectory against each prior support tuple, weighted by
/// the prior. Replaces Monte Carlo for deterministic policies.
double policy_expected_cost(const IdpModel& model, const JointPrior& prior,
                            Decider& decider, int horizon);

} // namespace idp
