#include "idp/solver_seq.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <unordered_map>

namespace idp {

namespace {

void check_dims(const IdpModel& model, const JointPrior& prior) {
    if (model.num_actions() != prior.num_actions() ||
        model.num_incentives() != prior.num_incentives())
        throw ValidationError("prior dimensions do not match the model");
}

/// Resolves the pinned threshold, folds it into the fallback pair and opens
/// the next action's interval; zero-width intervals cascade through.
void advance_resolved(const IdpModel& model, SeqState& s) {
    const int n_actions = model.num_actions();
    while (s.probe_action < n_actions && s.lo == s.hi) {
        const int value = s.lo;
        const double cost = model.action_cost(s.probe_action) + model.incentive(value);
        if (!s.has_best() ||
            cost < model.action_cost(s.best_action) + model.incentive(s.best_incentive)) {
            s.best_action = s.probe_action;
            s.best_incentive = value;
        }
        s.resolved.push_back(value);
        ++s.probe_action;
        // Monotone thresholds cap the next interval at the value just pinned;
        // nothing observed so far constrains its lower end.
        s.lo = 0;
        s.hi = value;
    }
}

struct VecIntHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (int x : v) {
            h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

} // namespace

SeqState seq_initial_state(const IdpModel& model) {
    SeqState s;
    s.probe_action = 0;
    s.lo = 0;
    s.hi = model.num_incentives() - 1;
    advance_resolved(model, s);
    return s;
}

SeqState seq_step(const IdpModel& model, const SeqState& state, int probe_incentive,
                  Outcome outcome) {
    if (state.done(model.num_actions()))
        throw UnreachableNode("stepping a fully resolved sequential state");
    if (probe_incentive < state.lo || probe_incentive >= state.hi)
        throw ValidationError("probe outside the informative interval");
    SeqState next = state;
    if (outcome == Outcome::Accept)
        next.hi = probe_incentive;
    else
        next.lo = probe_incentive + 1;
    advance_resolved(model, next);
    return next;
}

SeqBound seq_bound(const IdpModel& model) {
    double slack = 0.0;
    for (int k = 0; k < model.num_incentives(); ++k)
        slack += model.incentive(k) - model.incentive(0);
    slack += model.num_actions() * (model.default_cost() - model.action_cost(0));
    return {slack, SeqBound::Direction::Forward};
}

SeqBound seq_bound_alt(const IdpModel& model) {
    double slack = model.num_incentives() * (model.default_cost() - model.action_cost(0));
    const double top = model.action_cost(model.num_actions() - 1);
    for (int n = 0; n < model.num_actions(); ++n) slack += top - model.action_cost(n);
    return {slack, SeqBound::Direction::Reverse};
}

namespace detail {

/// Conditional beliefs over the current probe's threshold. When every
/// prefix-conditional is a truncation of one per-action weight vector (true
/// for the uniform monotone prior), states are keyed without the resolved
/// prefix, which realizes the O(N^2 K^3) state count; otherwise the full
/// prefix enters the key.
class SeqBeliefs {
  public:
    SeqBeliefs(const IdpModel& model, const JointPrior& prior)
        : n_actions_(model.num_actions()), n_incentives_(model.num_incentives()) {
        cond_.resize(n_actions_);
        for (const auto& e : prior.entries()) {
            if (e.weight == 0.0) continue;
            std::vector<int> prefix;
            for (int n = 0; n < n_actions_; ++n) {
                auto& mass = cond_[n][prefix];
                if (mass.empty()) mass.assign(n_incentives_, 0.0);
                mass[e.thresholds[n]] += e.weight;
                prefix.push_back(e.thresholds[n]);
            }
        }
        factored_ = detect_factored();
    }

    bool factored() const { return factored_; }

    /// Unnormalized weights over the probe action's threshold given the
    /// resolved prefix. Callers restrict to [lo, hi] and normalize; branch
    /// existence must be decided by exact zero tests on these raw weights.
    const std::vector<double>& base(const SeqState& s) const {
        if (factored_) return reference_[s.probe_action];
        auto it = cond_[s.probe_action].find(s.resolved);
        if (it == cond_[s.probe_action].end())
            throw EmptySupport("no prior mass for the resolved prefix");
        return it->second;
    }

  private:
    bool detect_factored() {
        reference_.assign(n_actions_, {});
        for (int n = 0; n < n_actions_; ++n) {
            // Reference: the conditional under the loosest cap seen for this
            // action (largest preceding threshold).
            const std::vector<double>* ref = nullptr;
            int ref_cap = -1;
            for (const auto& [prefix, mass] : cond_[n]) {
                const int cap = prefix.empty() ? n_incentives_ - 1 : prefix.back();
                if (cap > ref_cap) {
                    ref_cap = cap;
                    ref = &mass;
                }
            }
            double ref_total = 0.0;
            for (double m : *ref) ref_total += m;
            std::vector<double> f(n_incentives_);
            for (int j = 0; j < n_incentives_; ++j) f[j] = (*ref)[j] / ref_total;
            for (const auto& [prefix, mass] : cond_[n]) {
                const int cap = prefix.empty() ? n_incentives_ - 1 : prefix.back();
                double cap_total = 0.0, mass_total = 0.0;
                for (int j = 0; j <= cap; ++j) cap_total += f[j];
                for (double m : mass) mass_total += m;
                if (cap_total == 0.0) return false;
                for (int j = 0; j < n_incentives_; ++j) {
                    const double expected = j <= cap ? f[j] / cap_total : 0.0;
                    if (std::abs(mass[j] / mass_total - expected) > kProbTolerance)
                        return false;
                }
            }
            reference_[n] = std::move(f);
        }
        return true;
    }

    int n_actions_;
    int n_incentives_;
    std::vector<std::map<std::vector<int>, std::vector<double>>> cond_;
    bool factored_ = false;
    std::vector<std::vector<double>> reference_;
};

struct SeqProbe {
    int incentive;
    double p_accept;
    int accept_node; ///< -1 when the branch has zero probability
    int reject_node;
};

struct SeqNode {
    SeqState state;
    bool done;
    std::vector<SeqProbe> probes;
    bool has_fallback;
    Offer fallback_offer{};
    double fallback_step_cost = 0.0;
    Offer cap_offer{}; ///< commit to (probe action, hi); valid unless done
    double cap_step_cost = 0.0;
};

struct SeqGraph {
    std::vector<SeqNode> nodes; ///< nodes[0] is the initial state
    std::unordered_map<std::vector<int>, int, VecIntHash> index;
    bool factored = false;
};

std::vector<int> seq_key(const SeqState& s, int n_actions, bool factored) {
    if (s.done(n_actions)) return {n_actions, s.best_action, s.best_incentive};
    std::vector<int> key{s.probe_action, s.best_action, s.best_incentive, s.lo, s.hi};
    if (!factored) key.insert(key.end(), s.resolved.begin(), s.resolved.end());
    return key;
}

SeqGraph build_seq_graph(const IdpModel& model, const JointPrior& prior) {
    const SeqBeliefs beliefs(model, prior);
    SeqGraph graph;
    graph.factored = beliefs.factored();
    std::deque<int> frontier;

    auto intern = [&](const SeqState& s) {
        std::vector<int> key = seq_key(s, model.num_actions(), graph.factored);
        auto it = graph.index.find(key);
        if (it != graph.index.end()) return it->second;
        const int idx = static_cast<int>(graph.nodes.size());
        graph.index.emplace(std::move(key), idx);
        SeqNode node;
        node.state = s;
        node.done = s.done(model.num_actions());
        node.has_fallback = s.has_best();
        if (node.has_fallback) {
            node.fallback_offer = Offer{s.best_action, s.best_incentive};
            node.fallback_step_cost =
                model.action_cost(s.best_action) + model.incentive(s.best_incentive);
        }
        if (!node.done) {
            node.cap_offer = Offer{s.probe_action, s.hi};
            node.cap_step_cost = model.action_cost(s.probe_action) + model.incentive(s.hi);
        }
        graph.nodes.push_back(std::move(node));
        frontier.push_back(idx);
        return idx;
    };

    intern(seq_initial_state(model));
    while (!frontier.empty()) {
        const int idx = frontier.front();
        frontier.pop_front();
        if (graph.nodes[idx].done) continue;
        const SeqState state = graph.nodes[idx].state; // copy: nodes reallocates
        const std::vector<double>& weights = beliefs.base(state);
        std::vector<SeqProbe> probes;
        for (int k = state.lo; k < state.hi; ++k) {
            double below = 0.0, above = 0.0;
            for (int j = state.lo; j <= k; ++j) below += weights[j];
            for (int j = k + 1; j <= state.hi; ++j) above += weights[j];
            if (below + above == 0.0)
                throw EmptySupport("no prior mass inside the probe interval");
            const double p_acc =
                above > 0.0 ? (below > 0.0
                                   ? std::min(std::max(below / (below + above), 0.0), 1.0)
                                   : 0.0)
                            : 1.0;
            int acc = -1, rej = -1;
            if (below > 0.0) acc = intern(seq_step(model, state, k, Outcome::Accept));
            if (above > 0.0) rej = intern(seq_step(model, state, k, Outcome::Reject));
            probes.push_back({k, p_acc, acc, rej});
        }
        graph.nodes[idx].probes = std::move(probes);
    }
    return graph;
}

/// Evaluates one state's options against the previous value plane. Probes in
/// ladder order first, then the commit options ordered by offer indices, with
/// strict improvement only; this mirrors the exact solver's tie-break.
ValueEntry seq_backup(const IdpModel& model, const SeqNode& node,
                      const std::vector<ValueEntry>& continuation, int h,
                      double gamma, bool infinite) {
    const double commit_scale =
        infinite ? 1.0 / (1.0 - gamma) : static_cast<double>(h);
    double best = 0.0;
    Decision move{};
    bool have = false;
    for (const auto& probe : node.probes) {
        double q = 0.0;
        if (probe.accept_node >= 0)
            q += probe.p_accept *
                 (model.incentive(probe.incentive) + model.action_cost(node.state.probe_action) +
                  gamma * continuation[probe.accept_node].value);
        if (probe.reject_node >= 0)
            q += (1.0 - probe.p_accept) *
                 (model.default_cost() + gamma * continuation[probe.reject_node].value);
        if (!have || q < best) {
            best = q;
            move = Decision{false, Offer{node.state.probe_action, probe.incentive}};
            have = true;
        }
    }
    std::vector<std::pair<Offer, double>> commits;
    if (node.has_fallback) commits.emplace_back(node.fallback_offer, node.fallback_step_cost);
    if (!node.done) commits.emplace_back(node.cap_offer, node.cap_step_cost);
    std::sort(commits.begin(), commits.end(), [](const auto& a, const auto& b) {
        return std::pair(a.first.incentive, a.first.action) <
               std::pair(b.first.incentive, b.first.action);
    });
    for (const auto& [offer, step_cost] : commits) {
        const double q = commit_scale * step_cost;
        if (!have || q < best) {
            best = q;
            move = Decision{true, offer};
            have = true;
        }
    }
    return {best, move};
}

} // namespace detail

SeqFiniteSolution::SeqFiniteSolution(IdpModel model, JointPrior prior, int horizon)
    : model_(std::move(model)), prior_(std::move(prior)), horizon_(horizon) {
    if (horizon_ < 1) throw InvalidHorizon("finite horizon must be at least 1");
    if (model_.discount() < 1.0)
        throw DiscountedFiniteUnsupported(
            "finite-horizon planning is only defined undiscounted");
    check_dims(model_, prior_);
    auto graph = std::make_shared<detail::SeqGraph>(detail::build_seq_graph(model_, prior_));
    const std::size_t n_nodes = graph->nodes.size();
    table_.assign(horizon_ + 1,
                  std::vector<detail::ValueEntry>(n_nodes, {0.0, Decision{}}));
    for (int h = 1; h <= horizon_; ++h)
        for (std::size_t i = 0; i < n_nodes; ++i)
            table_[h][i] =
                detail::seq_backup(model_, graph->nodes[i], table_[h - 1], h, 1.0, false);
    graph_ = std::move(graph);
}

PlanResult SeqFiniteSolution::root() const {
    const auto& e = table_[horizon_][0];
    return {e.value, e.decision};
}

double SeqFiniteSolution::value(const SeqState& state, int remaining) const {
    if (remaining < 0 || remaining > horizon_)
        throw UnreachableNode("remaining horizon outside the solved table");
    auto it = graph_->index.find(
        detail::seq_key(state, model_.num_actions(), graph_->factored));
    if (it == graph_->index.end())
        throw UnreachableNode("sequential state was never produced by the solver");
    return table_[remaining][it->second].value;
}

Decision SeqFiniteSolution::decision(const SeqState& state, int remaining) const {
    if (remaining < 1 || remaining > horizon_)
        throw UnreachableNode("remaining horizon outside the solved table");
    auto it = graph_->index.find(
        detail::seq_key(state, model_.num_actions(), graph_->factored));
    if (it == graph_->index.end())
        throw UnreachableNode("sequential state was never produced by the solver");
    return table_[remaining][it->second].decision;
}

std::size_t SeqFiniteSolution::state_count() const { return graph_->nodes.size(); }

SeqFiniteSolution solve_seq_finite(const IdpModel& model, const JointPrior& prior,
                                   int horizon) {
    return SeqFiniteSolution(model, prior, horizon);
}

SeqInfiniteSolution::SeqInfiniteSolution(IdpModel model, JointPrior prior)
    : model_(std::move(model)), prior_(std::move(prior)) {
    if (model_.discount() >= 1.0)
        throw UndiscountedInfinite("infinite-horizon planning requires discount < 1");
    check_dims(model_, prior_);
    auto graph = std::make_shared<detail::SeqGraph>(detail::build_seq_graph(model_, prior_));
    const std::size_t n_nodes = graph->nodes.size();

    // Successors either shrink the probe interval or advance the probe
    // action, so (action desc, width asc) visits children before parents.
    std::vector<int> order(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& sa = graph->nodes[a].state;
        const auto& sb = graph->nodes[b].state;
        const int wa = graph->nodes[a].done ? 0 : sa.hi - sa.lo;
        const int wb = graph->nodes[b].done ? 0 : sb.hi - sb.lo;
        return std::pair(-sa.probe_action, wa) < std::pair(-sb.probe_action, wb);
    });

    table_.assign(n_nodes, {0.0, Decision{}});
    for (int idx : order)
        table_[idx] = detail::seq_backup(model_, graph->nodes[idx], table_, 0,
                                         model_.discount(), true);
    graph_ = std::move(graph);
}

PlanResult SeqInfiniteSolution::root() const {
    return {table_[0].value, table_[0].decision};
}

double SeqInfiniteSolution::value(const SeqState& state) const {
    auto it = graph_->index.find(
        detail::seq_key(state, model_.num_actions(), graph_->factored));
    if (it == graph_->index.end())
        throw UnreachableNode("sequential state was never produced by the solver");
    return table_[it->second].value;
}

Decision SeqInfiniteSolution::decision(const SeqState& state) const {
    auto it = graph_->index.find(
        detail::seq_key(state, model_.num_actions(), graph_->factored));
    if (it == graph_->index.end())
        throw UnreachableNode("sequential state was never produced by the solver");
    return table_[it->second].decision;
}

std::size_t SeqInfiniteSolution::state_count() const { return graph_->nodes.size(); }

SeqInfiniteSolution solve_seq_infinite(const IdpModel& model, const JointPrior& prior) {
    return SeqInfiniteSolution(model, prior);
}

SeqFinitePolicy::SeqFinitePolicy(std::shared_ptr<const SeqFiniteSolution> solution)
    : solution_(std::move(solution)), state_(seq_initial_state(solution_->model())) {}

void SeqFinitePolicy::reset(const IdpModel& model, const JointPrior& prior) {
    if (model.num_actions() != solution_->model().num_actions() ||
        model.num_incentives() != solution_->model().num_incentives())
        throw ValidationError("policy was solved for a different instance shape");
    (void)prior;
    state_ = seq_initial_state(solution_->model());
    committed_.reset();
}

Offer SeqFinitePolicy::decide(int remaining_horizon) {
    if (committed_) return last_offer_ = *committed_;
    const Decision d = solution_->decision(state_, remaining_horizon);
    if (d.commit) committed_ = d.offer;
    return last_offer_ = d.offer;
}

void SeqFinitePolicy::observe(Outcome outcome) {
    if (committed_) return;
    state_ = seq_step(solution_->model(), state_, last_offer_.incentive, outcome);
}

SeqInfinitePolicy::SeqInfinitePolicy(std::shared_ptr<const SeqInfiniteSolution> solution)
    : solution_(std::move(solution)), state_(seq_initial_state(solution_->model())) {}

void SeqInfinitePolicy::reset(const IdpModel& model, const JointPrior& prior) {
    if (model.num_actions() != solution_->model().num_actions() ||
        model.num_incentives() != solution_->model().num_incentives())
        throw ValidationError("policy was solved for a different instance shape");
    (void)prior;
    state_ = seq_initial_state(solution_->model());
    committed_.reset();
}

Offer SeqInfinitePolicy::decide(int) {
    if (committed_) return last_offer_ = *committed_;
    const Decision d = solution_->decision(state_);
    if (d.commit) committed_ = d.offer;
    return last_offer_ = d.offer;
}

void SeqInfinitePolicy::observe(Outcome outcome) {
    if (committed_) return;
    state_ = seq_step(solution_->model(), state_, last_offer_.incentive, outcome);
}

void DescendProbePolicy::reset(const IdpModel& model, const JointPrior& prior) {
    (void)prior;
    model_ = model;
    state_ = seq_initial_state(model);
    probing_ = false;
}

Offer DescendProbePolicy::decide(int) {
    if (!model_) throw ValidationError("decider used before reset");
    if (state_.done(model_->num_actions())) {
        probing_ = false;
        return Offer{state_.best_action, state_.best_incentive};
    }
    probing_ = true;
    last_probe_ = state_.hi - 1;
    return Offer{state_.probe_action, last_probe_};
}

void DescendProbePolicy::observe(Outcome outcome) {
    if (!probing_) return;
    state_ = seq_step(*model_, state_, last_probe_, outcome);
}

} // namespace idp
