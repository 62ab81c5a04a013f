#include "idp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

namespace idp {

namespace {

constexpr double kExpectimaxWorkGuard = 1e7;
constexpr std::size_t kFullDpStateGuard = 200000;

struct HistoryItem {
    Offer offer;
    Outcome outcome;
};

bool consistent(const std::vector<int>& thresholds, const std::vector<HistoryItem>& hist) {
    for (const auto& [offer, outcome] : hist) {
        const bool accepts = offer.incentive >= thresholds[offer.action];
        if (accepts != (outcome == Outcome::Accept)) return false;
    }
    return true;
}

struct ExpectimaxSearch {
    const IdpModel& model;
    const JointPrior& prior;
    OfferPruning pruning;
    std::vector<HistoryItem> history;

    double value(int h) {
        if (h == 0) return 0.0;
        const int n_actions = model.num_actions();
        const int n_incentives = model.num_incentives();

        // Posterior by direct conditioning of the prior on the raw history.
        std::vector<double> weight(prior.entries().size(), 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < prior.entries().size(); ++i) {
            const auto& e = prior.entries()[i];
            if (e.weight > 0.0 && consistent(e.thresholds, history)) {
                weight[i] = e.weight;
                total += e.weight;
            }
        }

        std::vector<int> lo(n_actions, 0), hi(n_actions, n_incentives - 1);
        if (pruning == OfferPruning::SupportBounds) {
            for (int n = 0; n < n_actions; ++n) {
                lo[n] = n_incentives;
                hi[n] = -1;
            }
            for (std::size_t i = 0; i < prior.entries().size(); ++i) {
                if (weight[i] == 0.0) continue;
                const auto& t = prior.entries()[i].thresholds;
                for (int n = 0; n < n_actions; ++n) {
                    lo[n] = std::min(lo[n], t[n]);
                    hi[n] = std::max(hi[n], t[n]);
                }
            }
        }

        double best = std::numeric_limits<double>::infinity();
        for (int n = 0; n < n_actions; ++n) {
            for (int k = lo[n]; k <= hi[n]; ++k) {
                double mass_acc = 0.0;
                for (std::size_t i = 0; i < prior.entries().size(); ++i)
                    if (weight[i] > 0.0 && prior.entries()[i].thresholds[n] <= k)
                        mass_acc += weight[i];
                const double p_acc = std::min(mass_acc / total, 1.0);
                double q = 0.0;
                if (p_acc > 0.0) {
                    history.push_back({Offer{n, k}, Outcome::Accept});
                    q += p_acc * (model.incentive(k) + model.action_cost(n) +
                                  model.discount() * value(h - 1));
                    history.pop_back();
                }
                if (p_acc < 1.0) {
                    history.push_back({Offer{n, k}, Outcome::Reject});
                    q += (1.0 - p_acc) *
                         (model.default_cost() + model.discount() * value(h - 1));
                    history.pop_back();
                }
                best = std::min(best, q);
            }
        }
        return best;
    }
};

} // namespace

double expectimax_value(const IdpModel& model, const JointPrior& prior, int horizon,
                        OfferPruning pruning) {
    if (model.num_actions() != prior.num_actions() ||
        model.num_incentives() != prior.num_incentives())
        throw ValidationError("prior dimensions do not match the model");
    if (horizon < 0) throw InvalidHorizon("horizon must be nonnegative");
    const double states = std::pow(model.num_incentives(), model.num_actions());
    const double branching =
        static_cast<double>(model.num_actions()) * model.num_incentives();
    if (states * std::pow(branching, horizon) > kExpectimaxWorkGuard)
        throw InstanceTooLarge("expectimax guard K^N * (N*K)^H exceeded");
    ExpectimaxSearch search{model, prior, pruning, {}};
    return search.value(horizon);
}

double full_dp_value(const IdpModel& model, const JointPrior& prior, int horizon) {
    if (model.num_actions() != prior.num_actions() ||
        model.num_incentives() != prior.num_incentives())
        throw ValidationError("prior dimensions do not match the model");
    if (horizon < 1) throw InvalidHorizon("horizon must be at least 1");
    if (model.discount() < 1.0)
        throw DiscountedFiniteUnsupported("full DP is defined undiscounted only");
    if (!IncentiveRanges::packable(model.num_actions(), model.num_incentives()))
        throw InstanceTooLarge("range tuples of this shape exceed the 64-bit state key");

    const int n_actions = model.num_actions();
    const int n_incentives = model.num_incentives();

    // Reachable closure over every offer; uninformative offers self-loop.
    struct Node {
        IncentiveRanges ranges;
        std::vector<double> p_acc;  ///< per flat (n, k)
        std::vector<int> acc, rej;  ///< successor indices, -1 for zero branches
    };
    std::vector<Node> nodes;
    std::unordered_map<std::uint64_t, int> index;
    std::deque<int> frontier;
    auto intern = [&](IncentiveRanges r) {
        const std::uint64_t key = r.packed();
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        const int idx = static_cast<int>(nodes.size());
        if (nodes.size() >= kFullDpStateGuard)
            throw InstanceTooLarge("full DP reachable-state guard exceeded");
        index.emplace(key, idx);
        nodes.push_back({std::move(r), {}, {}, {}});
        frontier.push_back(idx);
        return idx;
    };
    intern(IncentiveRanges::full(n_actions, n_incentives));
    while (!frontier.empty()) {
        const int idx = frontier.front();
        frontier.pop_front();
        const IncentiveRanges ranges = nodes[idx].ranges;
        // Raw in-box masses per (action, rung); exact zero tests on them
        // decide which outcome branches exist.
        std::vector<std::vector<double>> mass(n_actions,
                                              std::vector<double>(n_incentives, 0.0));
        for (const auto& e : prior.entries()) {
            if (e.weight == 0.0) continue;
            bool inside = true;
            for (int n = 0; n < n_actions && inside; ++n)
                inside = e.thresholds[n] >= ranges.lower(n) &&
                         e.thresholds[n] <= ranges.upper(n);
            if (!inside) continue;
            for (int n = 0; n < n_actions; ++n) mass[n][e.thresholds[n]] += e.weight;
        }
        std::vector<double> p_acc(n_actions * n_incentives, 0.0);
        std::vector<int> acc(n_actions * n_incentives, -1);
        std::vector<int> rej(n_actions * n_incentives, -1);
        for (int n = 0; n < n_actions; ++n) {
            for (int k = 0; k < n_incentives; ++k) {
                double below = 0.0, above = 0.0;
                for (int j = 0; j <= k; ++j) below += mass[n][j];
                for (int j = k + 1; j < n_incentives; ++j) above += mass[n][j];
                if (below + above == 0.0)
                    throw EmptySupport("no prior mass inside the range box");
                const int flat = n * n_incentives + k;
                p_acc[flat] =
                    above > 0.0
                        ? (below > 0.0
                               ? std::min(std::max(below / (below + above), 0.0), 1.0)
                               : 0.0)
                        : 1.0;
                if (below > 0.0)
                    acc[flat] = intern(update_ranges(ranges, Offer{n, k}, Outcome::Accept));
                if (above > 0.0)
                    rej[flat] = intern(update_ranges(ranges, Offer{n, k}, Outcome::Reject));
            }
        }
        nodes[idx].p_acc = std::move(p_acc);
        nodes[idx].acc = std::move(acc);
        nodes[idx].rej = std::move(rej);
    }

    std::vector<double> prev(nodes.size(), 0.0), cur(nodes.size(), 0.0);
    for (int h = 1; h <= horizon; ++h) {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int n = 0; n < n_actions; ++n) {
                for (int k = 0; k < n_incentives; ++k) {
                    const int flat = n * n_incentives + k;
                    const double p = nodes[i].p_acc[flat];
                    double q = 0.0;
                    if (nodes[i].acc[flat] >= 0)
                        q += p * (model.incentive(k) + model.action_cost(n) +
                                  prev[nodes[i].acc[flat]]);
                    if (nodes[i].rej[flat] >= 0)
                        q += (1.0 - p) * (model.default_cost() + prev[nodes[i].rej[flat]]);
                    best = std::min(best, q);
                }
            }
            cur[i] = best;
        }
        std::swap(prev, cur);
    }
    return prev[0];
}

double policy_expected_cost(const IdpModel& model, const JointPrior& prior,
                            Decider& decider, int horizon) {
    if (horizon < 1) throw InvalidHorizon("horizon must be at least 1");
    double total = 0.0;
    for (const auto& e : prior.entries()) {
        if (e.weight == 0.0) continue;
        decider.reset(model, prior);
        const TrueIncentives truth{e.thresholds};
        total += e.weight * run_episode(model, decider, truth, horizon).total_cost;
    }
    return total;
}

} // namespace idp
