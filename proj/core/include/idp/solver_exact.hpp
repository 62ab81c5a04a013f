#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "idp/model.hpp"
#include "idp/sim.hpp"

namespace idp {

/// A planner's move: either an informative probe or the absorbing commit
/// offer, repeated for every remaining step.
struct Decision {
    bool commit = false;
    Offer offer{};

    friend bool operator==(const Decision&, const Decision&) = default;
};

struct PlanResult {
    double value = 0.0;
    Decision decision{};
};

namespace detail {

/// One belief node of the range-reduced MDP, with its pre-computed action set.
struct ExactCandidate {
    Offer offer;
    double p_accept;
    int accept_node; ///< -1 when the branch has zero probability
    int reject_node;
};

struct ExactNode {
    IncentiveRanges ranges;
    std::vector<ExactCandidate> offers; ///< informative probes, ordered (k, n)
    Offer commit_offer;                 ///< cheapest guaranteed-accept pair
    double commit_step_cost;
};

/// Closure of the range-update rules over all informative offers with
/// positive probability, starting from the full-range node.
struct ReachableSet {
    std::vector<ExactNode> nodes; ///< nodes[0] is the root
    std::unordered_map<std::uint64_t, int> index;
};

ReachableSet build_reachable(const IdpModel& model, const JointPrior& prior);

struct ValueEntry {
    double value;
    Decision decision;
};

} // namespace detail

/// Solved undiscounted finite-horizon policy: optimal value and move for
/// every reachable belief node at every remaining horizon.
class ExactFiniteSolution {
  public:
    ExactFiniteSolution(IdpModel model, JointPrior prior, int horizon);

    const IdpModel& model() const { return model_; }
    const JointPrior& prior() const { return prior_; }
    int horizon() const { return horizon_; }

    PlanResult root() const;
    double value(const IncentiveRanges& ranges, int remaining) const;
    Decision decision(const IncentiveRanges& ranges, int remaining) const;

    std::size_t state_count() const { return reachable_.nodes.size(); }

  private:
    int node_index(const IncentiveRanges& ranges) const;
    const detail::ValueEntry& entry(int node, int remaining) const;

    IdpModel model_;
    JointPrior prior_;
    int horizon_;
    detail::ReachableSet reachable_;
    std::vector<std::vector<detail::ValueEntry>> table_; ///< [h][node]
};

/// Optimal finite-horizon plan. Requires discount == 1 and horizon >= 1.
ExactFiniteSolution solve_finite(const IdpModel& model, const JointPrior& prior,
                                 int horizon);

/// Solved discounted infinite-horizon policy (stationary).
class ExactInfiniteSolution {
  public:
    ExactInfiniteSolution(IdpModel model, JointPrior prior);

    const IdpModel& model() const { return model_; }
    const JointPrior& prior() const { return prior_; }

    PlanResult root() const;
    double value(const IncentiveRanges& ranges) const;
    Decision decision(const IncentiveRanges& ranges) const;

    std::size_t state_count() const { return reachable_.nodes.size(); }

  private:
    int node_index(const IncentiveRanges& ranges) const;

    IdpModel model_;
    JointPrior prior_;
    detail::ReachableSet reachable_;
    std::vector<detail::ValueEntry> table_; ///< [node]
};

/// Optimal discounted plan. Requires discount < 1.
ExactInfiniteSolution solve_infinite(const IdpModel& model, const JointPrior& prior);

/// Number of distinct belief nodes reachable from the full-range node.
std::size_t enumerate_reachable_states(const IdpModel& model, const JointPrior& prior);

/// Executes a solved finite-horizon policy during episodes.
class ExactFinitePolicy final : public Decider {
  public:
    explicit ExactFinitePolicy(std::shared_ptr<const ExactFiniteSolution> solution);

    void reset(const IdpModel& model, const JointPrior& prior) override;
    Offer decide(int remaining_horizon) override;
    void observe(Outcome outcome) override;

  private:
    std::shared_ptr<const ExactFiniteSolution> solution_;
    IncentiveRanges ranges_;
    std::optional<Offer> committed_;
    Offer last_offer_{};
};

class ExactInfinitePolicy final : public Decider {
  public:
    explicit ExactInfinitePolicy(std::shared_ptr<const ExactInfiniteSolution> solution);

    void reset(const IdpModel& model, const JointPrior& prior) override;
    Offer decide(int remaining_horizon) override;
    void observe(Outcome outcome) override;

  private:
    std::shared_ptr<const ExactInfiniteSolution> solution_;
    IncentiveRanges ranges_;
    std::optional<Offer> committed_;
    Offer last_offer_{};
};

} // namespace idp
