#include "idp/solver_exact.hpp"

#include <algorithm>
#include <deque>

namespace idp {

namespace {

void check_dims(const IdpModel& model, const JointPrior& prior) {
    if (model.num_actions() != prior.num_actions() ||
        model.num_incentives() != prior.num_incentives())
        throw ValidationError("prior dimensions do not match the model");
    if (!IncentiveRanges::packable(model.num_actions(), model.num_incentives()))
        throw InstanceTooLarge("range tuples of this shape exceed the 64-bit state key");
}

/// Cheapest guaranteed-accept pair at this node; lower action index on ties.
std::pair<Offer, double> best_commit(const IdpModel& model,
                                     const IncentiveRanges& ranges) {
    Offer best{0, ranges.upper(0)};
    double best_cost = model.action_cost(0) + model.incentive(ranges.upper(0));
    for (int n = 1; n < model.num_actions(); ++n) {
        const double cost = model.action_cost(n) + model.incentive(ranges.upper(n));
        if (cost < best_cost) {
            best = Offer{n, ranges.upper(n)};
            best_cost = cost;
        }
    }
    return {best, best_cost};
}

} // namespace

namespace detail {

ReachableSet build_reachable(const IdpModel& model, const JointPrior& prior) {
    const int n_actions = model.num_actions();
    ReachableSet set;
    std::deque<int> frontier;

    auto intern = [&](IncentiveRanges r) {
        const std::uint64_t key = r.packed();
        auto it = set.index.find(key);
        if (it != set.index.end()) return it->second;
        const int idx = static_cast<int>(set.nodes.size());
        set.index.emplace(key, idx);
        auto [commit_offer, commit_cost] = best_commit(model, r);
        set.nodes.push_back({std::move(r), {}, commit_offer, commit_cost});
        frontier.push_back(idx);
        return idx;
    };

    const int n_incentives = model.num_incentives();
    intern(IncentiveRanges::full(n_actions, n_incentives));
    while (!frontier.empty()) {
        const int idx = frontier.front();
        frontier.pop_front();
        const IncentiveRanges ranges = set.nodes[idx].ranges; // copy: nodes reallocates

        // In-box prior mass per (action, rung). Branch existence must come
        // from exact zero tests on these raw masses, not from renormalized
        // probabilities, whose sums can miss 0 or 1 by an ulp.
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

        // Probes below the range are certain rejects and probes at or above
        // the upper endpoint are dominated by the commit offer, so only
        // k in [s_n, e_n) is searched. Candidate order (k, then n) fixes the
        // tie-break among equal-value probes.
        std::vector<ExactCandidate> cands;
        for (int k = 0; k < n_incentives; ++k) {
            for (int n = 0; n < n_actions; ++n) {
                if (k < ranges.lower(n) || k >= ranges.upper(n)) continue;
                double below = 0.0, above = 0.0;
                for (int j = ranges.lower(n); j <= k; ++j) below += mass[n][j];
                for (int j = k + 1; j <= ranges.upper(n); ++j) above += mass[n][j];
                if (below + above == 0.0)
                    throw EmptySupport("no prior mass inside the range box");
                const double p_acc =
                    std::min(std::max(below / (below + above), 0.0), 1.0);
                const Offer offer{n, k};
                int acc = -1, rej = -1;
                if (below > 0.0) acc = intern(update_ranges(ranges, offer, Outcome::Accept));
                if (above > 0.0) rej = intern(update_ranges(ranges, offer, Outcome::Reject));
                cands.push_back({offer, below > 0.0 ? (above > 0.0 ? p_acc : 1.0) : 0.0,
                                 acc, rej});
            }
        }
        set.nodes[idx].offers = std::move(cands);
    }
    return set;
}

} // namespace detail

ExactFiniteSolution::ExactFiniteSolution(IdpModel model, JointPrior prior, int horizon)
    : model_(std::move(model)), prior_(std::move(prior)), horizon_(horizon) {
    if (horizon_ < 1) throw InvalidHorizon("finite horizon must be at least 1");
    if (model_.discount() < 1.0)
        throw DiscountedFiniteUnsupported(
            "finite-horizon planning is only defined undiscounted");
    check_dims(model_, prior_);
    reachable_ = detail::build_reachable(model_, prior_);

    const std::size_t n_nodes = reachable_.nodes.size();
    table_.assign(horizon_ + 1,
                  std::vector<detail::ValueEntry>(n_nodes, {0.0, Decision{}}));
    // Backward induction over horizon planes; per node the options are every
    // informative probe plus committing to the cheapest guaranteed-accept
    // pair for all h remaining steps. Order of comparison realizes the
    // tie-break: lower incentive, then lower action, then probe over commit.
    for (int h = 1; h <= horizon_; ++h) {
        const auto& prev = table_[h - 1];
        auto& cur = table_[h];
        for (std::size_t i = 0; i < n_nodes; ++i) {
            const detail::ExactNode& node = reachable_.nodes[i];
            double best = 0.0;
            Decision move{};
            bool have = false;
            for (const auto& cand : node.offers) {
                double q = 0.0;
                if (cand.accept_node >= 0)
                    q += cand.p_accept * (model_.incentive(cand.offer.incentive) +
                                          model_.action_cost(cand.offer.action) +
                                          prev[cand.accept_node].value);
                if (cand.reject_node >= 0)
                    q += (1.0 - cand.p_accept) *
                         (model_.default_cost() + prev[cand.reject_node].value);
                if (!have || q < best) {
                    best = q;
                    move = Decision{false, cand.offer};
                    have = true;
                }
            }
            const double commit_value = h * node.commit_step_cost;
            if (!have || commit_value < best) {
                best = commit_value;
                move = Decision{true, node.commit_offer};
            }
            cur[i] = {best, move};
        }
    }
}

int ExactFiniteSolution::node_index(const IncentiveRanges& ranges) const {
    auto it = reachable_.index.find(ranges.packed());
    if (it == reachable_.index.end())
        throw UnreachableNode("belief node was never produced by the solver");
    return it->second;
}

const detail::ValueEntry& ExactFiniteSolution::entry(int node, int remaining) const {
    if (remaining < 1 || remaining > horizon_)
        throw UnreachableNode("remaining horizon outside the solved table");
    return table_[remaining][node];
}

PlanResult ExactFiniteSolution::root() const {
    const auto& e = table_[horizon_][0];
    return {e.value, e.decision};
}

double ExactFiniteSolution::value(const IncentiveRanges& ranges, int remaining) const {
    return entry(node_index(ranges), remaining).value;
}

Decision ExactFiniteSolution::decision(const IncentiveRanges& ranges,
                                       int remaining) const {
    return entry(node_index(ranges), remaining).decision;
}

ExactFiniteSolution solve_finite(const IdpModel& model, const JointPrior& prior,
                                 int horizon) {
    return ExactFiniteSolution(model, prior, horizon);
}

ExactInfiniteSolution::ExactInfiniteSolution(IdpModel model, JointPrior prior)
    : model_(std::move(model)), prior_(std::move(prior)) {
    if (model_.discount() >= 1.0)
        throw UndiscountedInfinite("infinite-horizon planning requires discount < 1");
    check_dims(model_, prior_);
    reachable_ = detail::build_reachable(model_, prior_);

    // Informative offers strictly shrink the range box, so processing nodes
    // by ascending total width sees every successor before its predecessor;
    // one Bellman backup per node suffices (the NONRECUR-ABSORB structure).
    const std::size_t n_nodes = reachable_.nodes.size();
    std::vector<int> order(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) order[static_cast<int>(i)] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return reachable_.nodes[a].ranges.total_width() <
               reachable_.nodes[b].ranges.total_width();
    });

    const double gamma = model_.discount();
    table_.assign(n_nodes, {0.0, Decision{}});
    for (int idx : order) {
        const detail::ExactNode& node = reachable_.nodes[idx];
        double best = 0.0;
        Decision move{};
        bool have = false;
        for (const auto& cand : node.offers) {
            double q = 0.0;
            if (cand.accept_node >= 0)
                q += cand.p_accept * (model_.incentive(cand.offer.incentive) +
                                      model_.action_cost(cand.offer.action) +
                                      gamma * table_[cand.accept_node].value);
            if (cand.reject_node >= 0)
                q += (1.0 - cand.p_accept) *
                     (model_.default_cost() + gamma * table_[cand.reject_node].value);
            if (!have || q < best) {
                best = q;
                move = Decision{false, cand.offer};
                have = true;
            }
        }
        const double commit_value = node.commit_step_cost / (1.0 - gamma);
        if (!have || commit_value < best) {
            best = commit_value;
            move = Decision{true, node.commit_offer};
        }
        table_[idx] = {best, move};
    }
}

int ExactInfiniteSolution::node_index(const IncentiveRanges& ranges) const {
    auto it = reachable_.index.find(ranges.packed());
    if (it == reachable_.index.end())
        throw UnreachableNode("belief node was never produced by the solver");
    return it->second;
}

PlanResult ExactInfiniteSolution::root() const {
    return {table_[0].value, table_[0].decision};
}

double ExactInfiniteSolution::value(const IncentiveRanges& ranges) const {
    return table_[node_index(ranges)].value;
}

Decision ExactInfiniteSolution::decision(const IncentiveRanges& ranges) const {
    return table_[node_index(ranges)].decision;
}

ExactInfiniteSolution solve_infinite(const IdpModel& model, const JointPrior& prior) {
    return ExactInfiniteSolution(model, prior);
}

std::size_t enumerate_reachable_states(const IdpModel& model, const JointPrior& prior) {
    check_dims(model, prior);
    return detail::build_reachable(model, prior).nodes.size();
}

ExactFinitePolicy::ExactFinitePolicy(std::shared_ptr<const ExactFiniteSolution> solution)
    : solution_(std::move(solution)),
      ranges_(IncentiveRanges::full(solution_->model().num_actions(),
                                    solution_->model().num_incentives())) {}

void ExactFinitePolicy::reset(const IdpModel& model, const JointPrior& prior) {
    if (model.num_actions() != solution_->model().num_actions() ||
        model.num_incentives() != solution_->model().num_incentives())
        throw ValidationError("policy was solved for a different instance shape");
    (void)prior;
    ranges_ = IncentiveRanges::full(model.num_actions(), model.num_incentives());
    committed_.reset();
}

Offer ExactFinitePolicy::decide(int remaining_horizon) {
    if (committed_) return last_offer_ = *committed_;
    const Decision d = solution_->decision(ranges_, remaining_horizon);
    if (d.commit) committed_ = d.offer;
    return last_offer_ = d.offer;
}

void ExactFinitePolicy::observe(Outcome outcome) {
    ranges_ = update_ranges(ranges_, last_offer_, outcome);
}

ExactInfinitePolicy::ExactInfinitePolicy(
    std::shared_ptr<const ExactInfiniteSolution> solution)
    : solution_(std::move(solution)),
      ranges_(IncentiveRanges::full(solution_->model().num_actions(),
                                    solution_->model().num_incentives())) {}

void ExactInfinitePolicy::reset(const IdpModel& model, const JointPrior& prior) {
    if (model.num_actions() != solution_->model().num_actions() ||
        model.num_incentives() != solution_->model().num_incentives())
        throw ValidationError("policy was solved for a different instance shape");
    (void)prior;
    ranges_ = IncentiveRanges::full(model.num_actions(), model.num_incentives());
    committed_.reset();
}

Offer ExactInfinitePolicy::decide(int) {
    if (committed_) return last_offer_ = *committed_;
    const Decision d = solution_->decision(ranges_);
    if (d.commit) committed_ = d.offer;
    return last_offer_ = d.offer;
}

void ExactInfinitePolicy::observe(Outcome outcome) {
    ranges_ = update_ranges(ranges_, last_offer_, outcome);
}

} // namespace idp
