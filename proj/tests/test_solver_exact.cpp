#include <doctest.h>

#include <cmath>
#include <map>
#include <memory>

#include "idp/baselines.hpp"
#include "idp/oracle.hpp"
#include "idp/solver_exact.hpp"
#include "support.hpp"

using namespace idp;

TEST_SUITE_BEGIN("solver_exact");

namespace {

IdpModel small_model(double discount = 1.0) {
    return build_model({0.5}, 2.0, {0.5, 1.0}, discount);
}

/// Test-local discounted value iteration over range boxes, horizon-truncated.
/// Offers cover the whole informative interval plus the self-looping upper
/// endpoint; independent of the solver's commit shortcut.
double truncated_discounted_dp(const IdpModel& m, const JointPrior& prior,
                               const IncentiveRanges& ranges, int h,
                               std::map<std::pair<std::uint64_t, int>, double>& memo) {
    if (h == 0) return 0.0;
    const auto key = std::make_pair(ranges.packed(), h);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    double best = 1e100;
    for (int n = 0; n < m.num_actions(); ++n) {
        const BeliefVector b = marginal(prior, ranges, n);
        double p = 0.0;
        for (int k = ranges.lower(n); k <= ranges.upper(n); ++k) {
            p = std::min(p + b.probs[k], 1.0);
            double q = 0.0;
            if (p > 0.0)
                q += p * (m.incentive(k) + m.action_cost(n) +
                          m.discount() *
                              truncated_discounted_dp(
                                  m, prior, update_ranges(ranges, {n, k}, Outcome::Accept),
                                  h - 1, memo));
            if (p < 1.0)
                q += (1.0 - p) *
                     (m.default_cost() +
                      m.discount() * truncated_discounted_dp(
                                         m, prior,
                                         update_ranges(ranges, {n, k}, Outcome::Reject),
                                         h - 1, memo));
            best = std::min(best, q);
        }
    }
    memo[key] = best;
    return best;
}

} // namespace

TEST_CASE("two-rung uniform instance: value 2.75, probe the low rung") {
    const ExactFiniteSolution sol =
        solve_finite(small_model(), uniform_monotone_prior(1, 2), 2);
    const PlanResult root = sol.root();
    CHECK(root.value == doctest::Approx(2.75).epsilon(1e-12));
    CHECK_FALSE(root.decision.commit);
    CHECK(root.decision.offer == Offer{0, 0});

    // After a reject the belief collapses on the upper rung; the policy
    // commits there.
    const IncentiveRanges rejected({{1, 1}}, 2);
    const Decision next = sol.decision(rejected, 1);
    CHECK(next.commit);
    CHECK(next.offer == Offer{0, 1});

    // After an accept the decision matches deciding at the clamped node.
    const IncentiveRanges accepted({{0, 0}}, 2);
    CHECK(sol.value(accepted, 1) == doctest::Approx(1.0).epsilon(1e-12));
    for (int h = 1; h <= 2; ++h)
        CHECK(sol.value(accepted, h) == doctest::Approx(h * 1.0).epsilon(1e-12));
}

TEST_CASE("single-incentive ladder commits forever") {
    const IdpModel m = experiment_model(1, 1, 1.0);
    const ExactFiniteSolution sol = solve_finite(m, uniform_monotone_prior(1, 1), 5);
    CHECK(sol.root().value == doctest::Approx(5 * (1.0 + 1.0)).epsilon(1e-12));
    CHECK(sol.root().decision.commit);
}

TEST_CASE("solver preconditions") {
    const JointPrior uniform = uniform_monotone_prior(1, 2);
    CHECK_THROWS_AS(solve_finite(small_model(), uniform, 0), InvalidHorizon);
    CHECK_THROWS_AS(solve_finite(small_model(0.9), uniform, 3),
                    DiscountedFiniteUnsupported);
    CHECK_THROWS_AS(solve_infinite(small_model(1.0), uniform), UndiscountedInfinite);
    CHECK_THROWS_AS(solve_finite(small_model(), uniform_monotone_prior(2, 2), 1),
                    ValidationError);
}

TEST_CASE("finite root value equals history expectimax") {
    SplitMix64 rng(5);
    for (int n_actions = 1; n_actions <= 2; ++n_actions) {
        for (int n_incentives = 2; n_incentives <= 3; ++n_incentives) {
            const IdpModel m = experiment_model(n_actions, n_incentives, 1.0);
            for (int c = 0; c < 4; ++c) {
                const JointPrior prior =
                    c == 0 ? uniform_monotone_prior(n_actions, n_incentives)
                           : test::random_prior(n_actions, n_incentives, rng);
                for (int h = 1; h <= 3; ++h) {
                    const double vi = solve_finite(m, prior, h).root().value;
                    const double oracle = expectimax_value(m, prior, h);
                    CHECK(vi == doctest::Approx(oracle).epsilon(1e-9));
                }
            }
        }
    }
}

TEST_CASE("finite root value equals the unrestricted horizon DP") {
    for (int n_incentives = 2; n_incentives <= 4; ++n_incentives) {
        const IdpModel m = experiment_model(1, n_incentives, 1.0);
        const JointPrior uniform = uniform_monotone_prior(1, n_incentives);
        for (int h = 1; h <= 4; ++h)
            CHECK(solve_finite(m, uniform, h).root().value ==
                  doctest::Approx(full_dp_value(m, uniform, h)).epsilon(1e-9));
    }
}

TEST_CASE("value bounds and horizon monotonicity") {
    SplitMix64 rng(17);
    const IdpModel m = experiment_model(2, 3, 1.0);
    const JointPrior prior = test::random_prior(2, 3, rng);
    const ExactFiniteSolution deep = solve_finite(m, prior, 6);
    const IncentiveRanges full = IncentiveRanges::full(2, 3);

    double commit_step = 1e100;
    for (int n = 0; n < 2; ++n)
        commit_step = std::min(commit_step, m.action_cost(n) + m.incentive(full.upper(n)));
    double perfect_info = 0.0;
    for (const auto& e : prior.entries()) {
        double best = 1e100;
        for (int n = 0; n < 2; ++n)
            best = std::min(best, m.action_cost(n) + m.incentive(e.thresholds[n]));
        perfect_info += e.weight * best;
    }
    double prev = 0.0;
    for (int h = 1; h <= 6; ++h) {
        const double v = deep.value(full, h);
        CHECK(v >= prev - 1e-12);
        CHECK(v <= h * commit_step + 1e-12);
        CHECK(v >= h * perfect_info - 1e-9);
        prev = v;
    }
}

TEST_CASE("accept probabilities equal posterior mass ratios") {
    SplitMix64 rng(23);
    for (int c = 0; c < 50; ++c) {
        const int n_actions = 1 + static_cast<int>(rng.next() % 3);
        const int n_incentives = 2 + static_cast<int>(rng.next() % 3);
        const JointPrior prior = test::random_prior(n_actions, n_incentives, rng);
        SplitMix64 sampler(rng.next());
        const TrueIncentives truth = sample_true_incentives(prior, sampler);
        const IncentiveRanges ranges =
            test::random_consistent_ranges(truth, n_incentives, rng, 2);
        const double box_mass = posterior_support_mass(prior, ranges);
        for (int n = 0; n < n_actions; ++n) {
            const BeliefVector b = marginal(prior, ranges, n);
            for (int k = ranges.lower(n); k < ranges.upper(n); ++k) {
                double p_acc = 0.0;
                for (int j = ranges.lower(n); j <= k; ++j) p_acc += b.probs[j];
                if (!(p_acc > 0.0)) continue;
                const IncentiveRanges acc = update_ranges(ranges, {n, k}, Outcome::Accept);
                CHECK(p_acc == doctest::Approx(posterior_support_mass(prior, acc) /
                                               box_mass)
                                   .epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("reachable state counts") {
    for (int k = 1; k <= 8; ++k) {
        const IdpModel m = experiment_model(1, k, 1.0);
        CHECK(enumerate_reachable_states(m, uniform_monotone_prior(1, k)) ==
              static_cast<std::size_t>(k * (k + 1) / 2));
    }
    // Hand enumeration for the 2x2 uniform instance gives 6 nodes.
    const IdpModel m22 = experiment_model(2, 2, 1.0);
    const std::size_t count = enumerate_reachable_states(m22, uniform_monotone_prior(2, 2));
    CHECK(count == 6);
    CHECK(count <= 16);
}

TEST_CASE("infinite-horizon solve matches a long truncated DP") {
    const IdpModel m = small_model(0.9);
    const JointPrior uniform = uniform_monotone_prior(1, 2);
    const double v_inf = solve_infinite(m, uniform).root().value;
    std::map<std::pair<std::uint64_t, int>, double> memo;
    const double v_trunc =
        truncated_discounted_dp(m, uniform, IncentiveRanges::full(1, 2), 200, memo);
    CHECK(v_inf == doctest::Approx(v_trunc).epsilon(1e-6));
}

TEST_CASE("infinite-horizon collapsed node is a geometric series") {
    const IdpModel m = build_model({0.5}, 2.0, {0.5, 1.0}, 0.9);
    const ExactInfiniteSolution sol = solve_infinite(m, uniform_monotone_prior(1, 2));
    const IncentiveRanges collapsed({{1, 1}}, 2);
    CHECK(sol.value(collapsed) == doctest::Approx((0.5 + 1.0) / 0.1).epsilon(1e-9));
}

TEST_CASE("vanishing discount reduces to the greedy argmin") {
    const IdpModel m = build_model({1.0 / 3, 2.0 / 3, 1.0}, 2.0,
                                   {0.2, 0.4, 0.6, 0.8, 1.0}, 1e-9);
    const JointPrior uniform = uniform_monotone_prior(3, 5);
    const ExactInfiniteSolution sol = solve_infinite(m, uniform);
    const Offer greedy = greedy_decide(m, uniform, IncentiveRanges::full(3, 5));
    CHECK(sol.root().decision.offer == greedy);
}

TEST_CASE("policy lookups reject foreign states") {
    const ExactFiniteSolution sol =
        solve_finite(small_model(), uniform_monotone_prior(1, 2), 2);
    CHECK_THROWS_AS(sol.value(IncentiveRanges::full(1, 2), 3), UnreachableNode);
}

TEST_CASE("priors with zero-mass rungs solve cleanly") {
    // Support holes make some branches structurally impossible; the solvers
    // must prune them rather than walk into empty boxes.
    const IdpModel m14 = experiment_model(1, 4, 1.0);
    const JointPrior gappy(1, 4, {{{0}, 1.0 / 3}, {{2}, 2.0 / 3}});
    for (int h = 1; h <= 4; ++h)
        CHECK(solve_finite(m14, gappy, h).root().value ==
              doctest::Approx(expectimax_value(m14, gappy, h)).epsilon(1e-9));

    const IdpModel m23 = experiment_model(2, 3, 1.0);
    const JointPrior gappy2(2, 3, {{{2, 0}, 0.25}, {{1, 1}, 0.75}});
    for (int h = 1; h <= 3; ++h)
        CHECK(solve_finite(m23, gappy2, h).root().value ==
              doctest::Approx(expectimax_value(m23, gappy2, h)).epsilon(1e-9));
    CHECK(full_dp_value(m14, gappy, 3) ==
          doctest::Approx(solve_finite(m14, gappy, 3).root().value).epsilon(1e-9));
}

TEST_CASE("plan and execution agree exactly") {
    SplitMix64 rng(31);
    for (int n_actions = 1; n_actions <= 2; ++n_actions) {
        for (int n_incentives = 2; n_incentives <= 3; ++n_incentives) {
            const IdpModel m = experiment_model(n_actions, n_incentives, 1.0);
            const JointPrior prior = test::random_prior(n_actions, n_incentives, rng);
            for (int h = 1; h <= 4; ++h) {
                auto sol = std::make_shared<const ExactFiniteSolution>(
                    solve_finite(m, prior, h));
                ExactFinitePolicy policy(sol);
                CHECK(policy_expected_cost(m, prior, policy, h) ==
                      doctest::Approx(sol->root().value).epsilon(1e-9));
            }
        }
    }
}

TEST_SUITE_END();
