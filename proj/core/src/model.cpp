#include "idp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace idp {

namespace {

std::string tuple_to_string(const std::vector<int>& t) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) os << ',';
        os << t[i] + 1; // 1-based in diagnostics
    }
    os << ')';
    return os.str();
}

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i - 1] < v[i])) return false;
    return true;
}

bool inside_box(const std::vector<int>& thresholds, const IncentiveRanges& ranges) {
    for (int n = 0; n < ranges.num_actions(); ++n)
        if (thresholds[n] < ranges.lower(n) || thresholds[n] > ranges.upper(n))
            return false;
    return true;
}

} // namespace

IdpModel::IdpModel(std::vector<double> action_costs, double default_cost,
                   std::vector<double> incentives, double discount)
    : action_costs_(std::move(action_costs)), default_cost_(default_cost),
      incentives_(std::move(incentives)), discount_(discount) {
    if (action_costs_.empty()) throw ValidationError("action costs must be nonempty");
    if (incentives_.empty()) throw ValidationError("incentives must be nonempty");
    if (!strictly_increasing(action_costs_))
        throw ValidationError("action costs must be strictly increasing");
    if (!strictly_increasing(incentives_))
        throw ValidationError("incentives must be strictly increasing");
    // Nonstrict on purpose: the simulation-study parameterization sits exactly
    // at c_N + delta_K == default cost.
    if (action_costs_.back() + incentives_.back() > default_cost_)
        throw ValidationError(
            "costliest accepted pair exceeds the default-action cost");
    if (!(discount_ > 0.0) || discount_ > 1.0)
        throw ValidationError("discount must lie in (0, 1]");
}

IdpModel build_model(std::vector<double> action_costs, double default_cost,
                     std::vector<double> incentives, double discount) {
    return IdpModel(std::move(action_costs), default_cost, std::move(incentives),
                    discount);
}

IdpModel experiment_model(int n_actions, int n_incentives, double eta) {
    if (n_actions < 1 || n_incentives < 1)
        throw ValidationError("experiment model needs at least one action and incentive");
    if (!(eta > 0.0)) throw ValidationError("eta must be positive");
    std::vector<double> costs(n_actions);
    for (int n = 0; n < n_actions; ++n)
        costs[n] = std::pow(static_cast<double>(n + 1) / n_actions, eta);
    std::vector<double> ladder(n_incentives);
    for (int k = 0; k < n_incentives; ++k)
        ladder[k] = static_cast<double>(k + 1) / n_incentives;
    return IdpModel(std::move(costs), 2.0, std::move(ladder), 1.0);
}

TrueIncentives make_true_incentives(std::vector<int> thresholds, int n_incentives) {
    if (thresholds.empty()) throw ValidationError("thresholds must be nonempty");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (thresholds[i] < 0 || thresholds[i] >= n_incentives)
            throw ValidationError("threshold index out of range");
        if (i > 0 && thresholds[i] > thresholds[i - 1])
            throw ValidationError("thresholds must be nonincreasing in the action index");
    }
    return TrueIncentives{std::move(thresholds)};
}

JointPrior::JointPrior(int n_actions, int n_incentives, std::vector<Entry> entries)
    : n_actions_(n_actions), n_incentives_(n_incentives), entries_(std::move(entries)) {
    if (n_actions_ < 1 || n_incentives_ < 1)
        throw ValidationError("prior dimensions must be positive");
    if (entries_.empty()) throw ValidationError("prior must have at least one entry");
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.thresholds < b.thresholds; });
    double total = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const Entry& e = entries_[i];
        if (static_cast<int>(e.thresholds.size()) != n_actions_)
            throw ValidationError("prior tuple arity does not match the action count");
        for (std::size_t j = 0; j < e.thresholds.size(); ++j) {
            if (e.thresholds[j] < 0 || e.thresholds[j] >= n_incentives_)
                throw ValidationError("prior tuple index out of range: " +
                                      tuple_to_string(e.thresholds));
            if (j > 0 && e.thresholds[j] > e.thresholds[j - 1])
                throw ValidationError("prior tuple not monotone nonincreasing: " +
                                      tuple_to_string(e.thresholds));
        }
        if (i > 0 && entries_[i - 1].thresholds == e.thresholds)
            throw ValidationError("duplicate prior tuple: " + tuple_to_string(e.thresholds));
        if (e.weight < 0.0) throw ValidationError("prior weights must be nonnegative");
        total += e.weight;
    }
    if (std::abs(total - 1.0) > kProbTolerance)
        throw ValidationError("prior weights must sum to one");
}

JointPrior uniform_monotone_prior(int n_actions, int n_incentives) {
    if (n_actions < 1 || n_incentives < 1)
        throw ValidationError("prior dimensions must be positive");
    double tuple_count = 1.0; // C(K+N-1, N)
    for (int i = 1; i <= n_actions; ++i)
        tuple_count *= static_cast<double>(n_incentives - 1 + i) / i;
    if (tuple_count > 5e6)
        throw InstanceTooLarge("monotone tuple table would exceed 5e6 entries");
    std::vector<JointPrior::Entry> entries;
    std::vector<int> tuple(n_actions, 0);
    // Enumerate every monotone nonincreasing tuple in lexicographic order.
    while (true) {
        entries.push_back({tuple, 0.0});
        int pos = n_actions - 1;
        while (pos >= 0) {
            int cap = pos == 0 ? n_incentives - 1 : tuple[pos - 1];
            if (tuple[pos] < cap) {
                ++tuple[pos];
                for (int j = pos + 1; j < n_actions; ++j) tuple[j] = 0;
                break;
            }
            --pos;
        }
        if (pos < 0) break;
    }
    const double w = 1.0 / static_cast<double>(entries.size());
    for (auto& e : entries) e.weight = w;
    return JointPrior(n_actions, n_incentives, std::move(entries));
}

TrueIncentives sample_true_incentives(const JointPrior& prior, SplitMix64& rng) {
    const double u = rng.next_double();
    double cum = 0.0;
    for (const auto& e : prior.entries()) {
        cum += e.weight;
        if (u < cum) return TrueIncentives{e.thresholds};
    }
    return TrueIncentives{prior.entries().back().thresholds};
}

IncentiveRanges::IncentiveRanges(std::vector<std::pair<int, int>> bounds,
                                 int n_incentives)
    : bounds_(std::move(bounds)), n_incentives_(n_incentives) {
    if (bounds_.empty()) throw ValidationError("ranges must be nonempty");
    if (n_incentives_ < 1) throw ValidationError("ranges need a positive ladder size");
    for (std::size_t n = 0; n < bounds_.size(); ++n) {
        const auto [s, e] = bounds_[n];
        if (s < 0 || e >= n_incentives_ || s > e)
            throw ValidationError("range endpoints out of order or out of bounds");
        if (n > 0 && (s > bounds_[n - 1].first || e > bounds_[n - 1].second))
            throw ValidationError("range endpoints must be nonincreasing in the action index");
    }
}

IncentiveRanges IncentiveRanges::full(int n_actions, int n_incentives) {
    return IncentiveRanges(
        std::vector<std::pair<int, int>>(n_actions, {0, n_incentives - 1}),
        n_incentives);
}

bool IncentiveRanges::all_collapsed() const {
    for (const auto& [s, e] : bounds_)
        if (s != e) return false;
    return true;
}

int IncentiveRanges::total_width() const {
    int w = 0;
    for (const auto& [s, e] : bounds_) w += e - s;
    return w;
}

std::uint64_t IncentiveRanges::packed() const {
    const std::uint64_t tri =
        static_cast<std::uint64_t>(n_incentives_) * (n_incentives_ + 1) / 2;
    std::uint64_t key = 0;
    for (const auto& [s, e] : bounds_) {
        const std::uint64_t pair_index =
            static_cast<std::uint64_t>(e) * (e + 1) / 2 + static_cast<std::uint64_t>(s);
        key = key * tri + pair_index;
    }
    return key;
}

bool IncentiveRanges::packable(int n_actions, int n_incentives) {
    const double tri = static_cast<double>(n_incentives) * (n_incentives + 1) / 2.0;
    return static_cast<double>(n_actions) * std::log2(tri) <= 62.0;
}

IncentiveRanges update_ranges(const IncentiveRanges& ranges, Offer offer,
                              Outcome outcome) {
    const int n_actions = ranges.num_actions();
    if (offer.action < 0 || offer.action >= n_actions || offer.incentive < 0 ||
        offer.incentive >= ranges.num_incentives())
        throw ValidationError("offer indices out of bounds");
    std::vector<std::pair<int, int>> bounds(n_actions);
    for (int n = 0; n < n_actions; ++n) bounds[n] = {ranges.lower(n), ranges.upper(n)};
    if (outcome == Outcome::Accept) {
        // t_m <= t_n <= k for every action the agent likes at least as much.
        for (int m = offer.action; m < n_actions; ++m)
            bounds[m].second = std::min(bounds[m].second, offer.incentive);
    } else {
        // t_m >= t_n > k for every action the agent likes at most as much.
        for (int m = 0; m <= offer.action; ++m)
            bounds[m].first = std::max(bounds[m].first, offer.incentive + 1);
    }
    for (int n = 0; n < n_actions; ++n)
        if (bounds[n].first > bounds[n].second)
            throw InconsistentObservation(
                "outcome contradicts previously established bounds");
    return IncentiveRanges(std::move(bounds), ranges.num_incentives());
}

namespace {

void check_box_dims(const JointPrior& prior, const IncentiveRanges& ranges) {
    if (prior.num_actions() != ranges.num_actions() ||
        prior.num_incentives() != ranges.num_incentives())
        throw ValidationError("prior and ranges dimensions do not match");
}

} // namespace

BeliefVector marginal(const JointPrior& prior, const IncentiveRanges& ranges,
                      int action) {
    check_box_dims(prior, ranges);
    if (action < 0 || action >= ranges.num_actions())
        throw ValidationError("marginal action index out of bounds");
    std::vector<double> probs(prior.num_incentives(), 0.0);
    double total = 0.0;
    for (const auto& e : prior.entries()) {
        if (e.weight == 0.0 || !inside_box(e.thresholds, ranges)) continue;
        probs[e.thresholds[action]] += e.weight;
        total += e.weight;
    }
    if (total == 0.0)
        throw EmptySupport("no prior mass inside the range box");
    for (double& p : probs) p /= total;
    return BeliefVector{action, std::move(probs)};
}

double posterior_support_mass(const JointPrior& prior, const IncentiveRanges& ranges) {
    check_box_dims(prior, ranges);
    double total = 0.0;
    for (const auto& e : prior.entries())
        if (inside_box(e.thresholds, ranges)) total += e.weight;
    return total;
}

} // namespace idp
