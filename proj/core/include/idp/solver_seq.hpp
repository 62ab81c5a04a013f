#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "idp/model.hpp"
#include "idp/sim.hpp"
#include "idp/solver_exact.hpp"

namespace idp {

/// State of the sequential (probe-in-cost-order) process: every action below
/// probe_action has its threshold pinned exactly, the current action carries
/// an interval, and later actions are untouched. The cheapest resolved
/// (action, threshold) pair is carried along as the standing fallback.
struct SeqState {
    int probe_action = 0; ///< == N once every threshold is resolved
    int best_action = -1;
    int best_incentive = -1;
    int lo = 0;
    int hi = 0;
    std::vector<int> resolved; ///< thresholds of actions < probe_action

    bool done(int n_actions) const { return probe_action >= n_actions; }
    bool has_best() const { return best_action >= 0; }

    friend bool operator==(const SeqState&, const SeqState&) = default;
};

/// Starting state: probing the cheapest action over the full ladder.
/// Degenerate ladders resolve immediately (cascading).
SeqState seq_initial_state(const IdpModel& model);

/// Applies one probe outcome. When the interval collapses the threshold is
/// recorded, the fallback pair updated (strict improvement only), and probing
/// advances to the next action with its interval capped by the value just
/// resolved; zero-width intervals cascade through.
SeqState seq_step(const IdpModel& model, const SeqState& state, int probe_incentive,
                  Outcome outcome);

struct SeqBound {
    enum class Direction { Forward, Reverse };
    double slack;
    Direction direction;
};

/// Forward sequential suboptimality slack: sum_k (delta_k - delta_1) +
/// N * (c_default - c_1). The optimal sequential value never exceeds the
/// unrestricted optimum by more than this.
SeqBound seq_bound(const IdpModel& model);

/// Reverse-order slack: K * (c_default - c_1) + sum_n (c_N - c_n).
SeqBound seq_bound_alt(const IdpModel& model);

namespace detail {
struct SeqGraph;
}

class SeqFiniteSolution {
  public:
    SeqFiniteSolution(IdpModel model, JointPrior prior, int horizon);

    const IdpModel& model() const { return model_; }
    const JointPrior& prior() const { return prior_; }
    int horizon() const { return horizon_; }

    PlanResult root() const;
    double value(const SeqState& state, int remaining) const;
    Decision decision(const SeqState& state, int remaining) const;

    /// Number of distinct memoized states.
    std::size_t state_count() const;

  private:
    IdpModel model_;
    JointPrior prior_;
    int horizon_;
    std::shared_ptr<const detail::SeqGraph> graph_;
    std::vector<std::vector<detail::ValueEntry>> table_; ///< [h][state]
};

/// Optimal finite-horizon plan within the sequential policy class.
/// Requires discount == 1 and horizon >= 1.
SeqFiniteSolution solve_seq_finite(const IdpModel& model, const JointPrior& prior,
                                   int horizon);

class SeqInfiniteSolution {
  public:
    SeqInfiniteSolution(IdpModel model, JointPrior prior);

    const IdpModel& model() const { return model_; }
    const JointPrior& prior() const { return prior_; }

    PlanResult root() const;
    double value(const SeqState& state) const;
    Decision decision(const SeqState& state) const;

    std::size_t state_count() const;

  private:
    IdpModel model_;
    JointPrior prior_;
    std::shared_ptr<const detail::SeqGraph> graph_;
    std::vector<detail::ValueEntry> table_;
};

/// Optimal discounted plan within the sequential policy class; discount < 1.
SeqInfiniteSolution solve_seq_infinite(const IdpModel& model, const JointPrior& prior);

class SeqFinitePolicy final : public Decider {
  public:
    explicit SeqFinitePolicy(std::shared_ptr<const SeqFiniteSolution> solution);

    void reset(const IdpModel& model, const JointPrior& prior) override;
    Offer decide(int remaining_horizon) override;
    void observe(Outcome outcome) override;

  private:
    std::shared_ptr<const SeqFiniteSolution> solution_;
    SeqState state_;
    std::optional<Offer> committed_;
    Offer last_offer_{};
};

class SeqInfinitePolicy final : public Decider {
  public:
    explicit SeqInfinitePolicy(std::shared_ptr<const SeqInfiniteSolution> solution);

    void reset(const IdpModel& model, const JointPrior& prior) override;
    Offer decide(int remaining_horizon) override;
    void observe(Outcome outcome) override;

  private:
    std::shared_ptr<const SeqInfiniteSolution> solution_;
    SeqState state_;
    std::optional<Offer> committed_;
    Offer last_offer_{};
};

/// The constructive sequential prober: offers one ladder step below the
/// current upper endpoint until each threshold is pinned, action by action,
/// then repeats the cheapest resolved pair. Realizes the forward slack bound
/// on every instance.
class DescendProbePolicy final : public Decider {
  public:
    DescendProbePolicy() = default;

    void reset(const IdpModel& model, const JointPrior& prior) override;
    Offer decide(int remaining_horizon) override;
    void observe(Outcome outcome) override;

  private:
    std::optional<IdpModel> model_;
    SeqState state_;
    int last_probe_ = -1;
    bool probing_ = false;
};

} // namespace idp
