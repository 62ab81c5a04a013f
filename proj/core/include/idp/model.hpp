#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "idp/errors.hpp"
#include "idp/rng.hpp"

namespace idp {

/// Tolerance for probability-vector normalization checks.
inline constexpr double kProbTolerance = 1e-12;

/// Action and incentive indices are 0-based throughout the library; the
/// command-line frontend converts to the conventional 1-based labels.
struct Offer {
    int action = 0;    ///< alternate action index in [0, N)
    int incentive = 0; ///< incentive ladder index in [0, K)

    friend bool operator==(const Offer&, const Offer&) = default;
};

enum class Outcome { Accept, Reject };

/// The environment constants of an incentive decision process: principal
/// costs per agent action, the incentive ladder, and the discount factor.
///
/// Invariants established at construction:
///   - action costs strictly increasing,
///   - incentives strictly increasing,
///   - cheapest guaranteed-accept pair never beats the default action:
///     action_cost(N-1) + incentive(K-1) <= default_cost,
///   - discount in (0, 1].
class IdpModel {
  public:
    IdpModel(std::vector<double> action_costs, double default_cost,
             std::vector<double> incentives, double discount);

    int num_actions() const { return static_cast<int>(action_costs_.size()); }
    int num_incentives() const { return static_cast<int>(incentives_.size()); }

    double action_cost(int action) const { return action_costs_[action]; }
    double default_cost() const { return default_cost_; }
    double incentive(int k) const { return incentives_[k]; }
    double discount() const { return discount_; }

    const std::vector<double>& action_costs() const { return action_costs_; }
    const std::vector<double>& incentives() const { return incentives_; }

    /// Immediate cost to the principal of one interaction.
    double step_cost(Offer offer, Outcome outcome) const {
        return outcome == Outcome::Accept
                   ? action_costs_[offer.action] + incentives_[offer.incentive]
                   : default_cost_;
    }

  private:
    std::vector<double> action_costs_;
    double default_cost_;
    std::vector<double> incentives_;
    double discount_;
};

/// Validates and builds a model; throws ValidationError naming the violated
/// invariant otherwise.
IdpModel build_model(std::vector<double> action_costs, double default_cost,
                     std::vector<double> incentives, double discount);

/// The simulation-study parameterization: action costs (n/N)^eta, incentive
/// ladder k/K, default cost 2, undiscounted.
IdpModel experiment_model(int n_actions, int n_incentives, double eta);

/// Hidden agent thresholds: the least acceptable ladder index per alternate
/// action, nonincreasing in the action index.
struct TrueIncentives {
    std::vector<int> thresholds;
};

/// Validates monotonicity and bounds; throws ValidationError.
TrueIncentives make_true_incentives(std::vector<int> thresholds, int n_incentives);

/// Probability table over the hidden threshold tuples. Keys are monotone
/// nonincreasing index tuples (the agent prefers higher-indexed actions, so
/// earlier actions need at-least-as-large incentives); entries are kept in
/// lexicographic order so that iteration and sampling are deterministic.
class JointPrior {
  public:
    struct Entry {
        std::vector<int> thresholds;
        double weight;
    };

    JointPrior(int n_actions, int n_incentives, std::vector<Entry> entries);

    int num_actions() const { return n_actions_; }
    int num_incentives() const { return n_incentives_; }
    const std::vector<Entry>& entries() const { return entries_; }

  private:
    int n_actions_;
    int n_incentives_;
    std::vector<Entry> entries_;
};

/// Equal weight on every monotone nonincreasing tuple; C(K+N-1, N) of them.
JointPrior uniform_monotone_prior(int n_actions, int n_incentives);

/// Inverse-CDF draw over the canonically ordered tuple table.
TrueIncentives sample_true_incentives(const JointPrior& prior, SplitMix64& rng);

/// Per-action index interval [s_n, e_n] still consistent with every observed
/// accept and reject; the sufficient statistic of the observation history.
/// Both endpoints are nonincreasing in the action index.
class IncentiveRanges {
  public:
    IncentiveRanges(std::vector<std::pair<int, int>> bounds, int n_incentives);

    /// The uninformed starting point: [0, K-1] for every action.
    static IncentiveRanges full(int n_actions, int n_incentives);

    int num_actions() const { return static_cast<int>(bounds_.size()); }
    int num_incentives() const { return n_incentives_; }

    int lower(int action) const { return bounds_[action].first; }
    int upper(int action) const { return bounds_[action].second; }
    bool collapsed(int action) const {
        return bounds_[action].first == bounds_[action].second;
    }
    bool all_collapsed() const;

    /// Sum of interval widths; informative observations strictly reduce it.
    int total_width() const;

    /// Canonical integer key; injective for all range tuples of this shape.
    /// Callers must check packable() for the instance shape first.
    std::uint64_t packed() const;
    static bool packable(int n_actions, int n_incentives);

    friend bool operator==(const IncentiveRanges&, const IncentiveRanges&) = default;

  private:
    std::vector<std::pair<int, int>> bounds_;
    int n_incentives_;
};

/// Applies one observation. Accepting an offer on action n caps the upper
/// endpoint of every action >= n at the offered index; rejecting raises the
/// lower endpoint of every action <= n past it. Throws
/// InconsistentObservation if any interval would become empty.
IncentiveRanges update_ranges(const IncentiveRanges& ranges, Offer offer,
                              Outcome outcome);

/// Exact posterior over one action's threshold given the prior and the
/// current range box: zero outside [s_n, e_n], renormalized inside.
struct BeliefVector {
    int action = 0;
    std::vector<double> probs;
};

/// Marginal of threshold t_n under the prior restricted to the range box.
/// Throws EmptySupport when the box carries no prior mass.
BeliefVector marginal(const JointPrior& prior, const IncentiveRanges& ranges,
                      int action);

/// Total prior weight of tuples inside the range box.
double posterior_support_mass(const JointPrior& prior, const IncentiveRanges& ranges);

} // namespace idp
