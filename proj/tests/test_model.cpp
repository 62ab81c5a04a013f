#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "idp/model.hpp"
#include "support.hpp"

using namespace idp;

TEST_SUITE_BEGIN("model");

TEST_CASE("build_model accepts and rejects per the invariants") {
    CHECK_NOTHROW(build_model({0.5}, 2.0, {0.5, 1.0}, 1.0));
    // 1.5 + 1.0 exceeds the default cost of 2.
    CHECK_THROWS_AS(build_model({1.5}, 2.0, {0.5, 1.0}, 1.0), ValidationError);
    CHECK_THROWS_AS(build_model({0.5, 0.4}, 2.0, {0.5, 1.0}, 1.0), ValidationError);
    CHECK_THROWS_AS(build_model({0.1}, 2.0, {1.0, 0.5}, 1.0), ValidationError);
    CHECK_THROWS_AS(build_model({0.1}, 2.0, {0.5, 1.0}, 0.0), ValidationError);
    CHECK_THROWS_AS(build_model({0.1}, 2.0, {0.5, 1.0}, 1.5), ValidationError);
    CHECK_THROWS_AS(build_model({}, 2.0, {0.5}, 1.0), ValidationError);
}

TEST_CASE("experiment_model matches the simulation-study parameterization") {
    const IdpModel m = experiment_model(3, 5, 1.0);
    CHECK(m.num_actions() == 3);
    CHECK(m.num_incentives() == 5);
    CHECK(m.action_cost(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(m.action_cost(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(m.action_cost(2) == doctest::Approx(1.0).epsilon(1e-15));
    for (int k = 0; k < 5; ++k)
        CHECK(m.incentive(k) == doctest::Approx((k + 1) / 5.0).epsilon(1e-15));
    CHECK(m.default_cost() == 2.0);
    CHECK(m.discount() == 1.0);

    const IdpModel single = experiment_model(1, 1, 1.0);
    CHECK(single.action_cost(0) == 1.0);
    CHECK(single.incentive(0) == 1.0);

    const IdpModel curved = experiment_model(2, 2, 0.75);
    CHECK(curved.action_cost(0) == doctest::Approx(std::pow(0.5, 0.75)).epsilon(1e-15));
    CHECK(curved.action_cost(1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(curved.incentive(0) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(experiment_model(3, 5, 0.0), ValidationError);
    CHECK_THROWS_AS(experiment_model(0, 5, 1.0), ValidationError);
}

TEST_CASE("uniform_monotone_prior enumerates every monotone tuple") {
    const JointPrior p1 = uniform_monotone_prior(1, 4);
    CHECK(p1.entries().size() == 4);
    for (const auto& e : p1.entries()) CHECK(e.weight == doctest::Approx(0.25));

    const JointPrior p2 = uniform_monotone_prior(2, 2);
    REQUIRE(p2.entries().size() == 3);
    CHECK(p2.entries()[0].thresholds == std::vector<int>{0, 0});
    CHECK(p2.entries()[1].thresholds == std::vector<int>{1, 0});
    CHECK(p2.entries()[2].thresholds == std::vector<int>{1, 1});
    for (const auto& e : p2.entries())
        CHECK(e.weight == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    // C(7,3) = 35 monotone triples over a 5-rung ladder.
    const JointPrior p3 = uniform_monotone_prior(3, 5);
    CHECK(p3.entries().size() == 35);
    double total = 0.0;
    for (const auto& e : p3.entries()) total += e.weight;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("JointPrior rejects invalid tables") {
    using Entry = JointPrior::Entry;
    CHECK_THROWS_AS(JointPrior(2, 2, {Entry{{0, 1}, 1.0}}), ValidationError);
    CHECK_THROWS_AS(JointPrior(2, 2, {Entry{{1, 0}, 0.5}}), ValidationError);
    CHECK_THROWS_AS(JointPrior(2, 2, {Entry{{1, 0}, 0.5}, Entry{{1, 0}, 0.5}}),
                    ValidationError);
    CHECK_THROWS_AS(JointPrior(2, 2, {Entry{{1, 2}, 1.0}}), ValidationError);
    CHECK_THROWS_AS(JointPrior(2, 2, {Entry{{1, 0}, -0.5}, Entry{{1, 1}, 1.5}}),
                    ValidationError);
}

TEST_CASE("sample_true_incentives is deterministic and follows the prior") {
    const JointPrior point(2, 2, {{{1, 0}, 1.0}, {{0, 0}, 0.0}});
    SplitMix64 rng(7);
    for (int i = 0; i < 10; ++i)
        CHECK(sample_true_incentives(point, rng).thresholds == std::vector<int>{1, 0});

    // Same seed, same draw.
    const JointPrior uniform = uniform_monotone_prior(1, 4);
    SplitMix64 a(42), b(42);
    CHECK(sample_true_incentives(uniform, a).thresholds ==
          sample_true_incentives(uniform, b).thresholds);

    // Frequencies approach the prior: 100k draws, each index 0.25 +- 0.01.
    SplitMix64 rng2(123);
    std::map<int, int> counts;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i)
        counts[sample_true_incentives(uniform, rng2).thresholds[0]]++;
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(counts[k] / static_cast<double>(draws) - 0.25) < 0.01);
}

TEST_CASE("marginal renormalizes inside the range box") {
    const JointPrior uniform14 = uniform_monotone_prior(1, 4);
    const IncentiveRanges mid({{1, 2}}, 4);
    const BeliefVector b = marginal(uniform14, mid, 0);
    CHECK(b.probs == std::vector<double>{0.0, 0.5, 0.5, 0.0});

    const JointPrior uniform22 = uniform_monotone_prior(2, 2);
    const BeliefVector b1 = marginal(uniform22, IncentiveRanges::full(2, 2), 0);
    CHECK(b1.probs[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(b1.probs[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

    const IncentiveRanges collapsed({{2, 2}}, 4);
    const BeliefVector unit = marginal(uniform14, collapsed, 0);
    CHECK(unit.probs == std::vector<double>{0.0, 0.0, 1.0, 0.0});

    const JointPrior point(1, 4, {{{3}, 1.0}});
    CHECK_THROWS_AS(marginal(point, IncentiveRanges({{0, 1}}, 4), 0), EmptySupport);
}

TEST_CASE("update_ranges applies the accept/reject clamps") {
    const IncentiveRanges full22 = IncentiveRanges::full(2, 2);

    const IncentiveRanges acc = update_ranges(full22, Offer{0, 0}, Outcome::Accept);
    CHECK(acc.lower(0) == 0);
    CHECK(acc.upper(0) == 0);
    CHECK(acc.lower(1) == 0);
    CHECK(acc.upper(1) == 0);

    const IncentiveRanges rej = update_ranges(full22, Offer{1, 0}, Outcome::Reject);
    CHECK(rej.lower(0) == 1);
    CHECK(rej.upper(0) == 1);
    CHECK(rej.lower(1) == 1);
    CHECK(rej.upper(1) == 1);

    // Accepting at the upper endpoint carries no information.
    const IncentiveRanges r14({{1, 2}}, 4);
    CHECK(update_ranges(r14, Offer{0, 2}, Outcome::Accept) == r14);
    CHECK(update_ranges(r14, Offer{0, 0}, Outcome::Reject) == r14);

    // Rejecting at the upper endpoint contradicts the established bounds.
    CHECK_THROWS_AS(update_ranges(r14, Offer{0, 2}, Outcome::Reject),
                    InconsistentObservation);
}

TEST_CASE("posterior_support_mass sums the box weight") {
    const JointPrior uniform22 = uniform_monotone_prior(2, 2);
    CHECK(posterior_support_mass(uniform22, IncentiveRanges::full(2, 2)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(posterior_support_mass(uniform22, IncentiveRanges({{1, 1}, {0, 1}}, 2)) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    const JointPrior point(2, 2, {{{1, 1}, 1.0}});
    CHECK(posterior_support_mass(point, IncentiveRanges({{0, 0}, {0, 0}}, 2)) == 0.0);
}

TEST_CASE("IncentiveRanges validates monotone structure") {
    CHECK_THROWS_AS(IncentiveRanges({{2, 1}}, 4), ValidationError);
    CHECK_THROWS_AS(IncentiveRanges({{0, 4}}, 4), ValidationError);
    CHECK_THROWS_AS(IncentiveRanges({{0, 1}, {0, 2}}, 4), ValidationError);
    CHECK_THROWS_AS(IncentiveRanges({{1, 2}, {2, 2}}, 4), ValidationError);
    CHECK_NOTHROW(IncentiveRanges({{1, 3}, {1, 2}, {0, 2}}, 4));
}

TEST_CASE("make_true_incentives validates monotone thresholds") {
    CHECK_NOTHROW(make_true_incentives({3, 1, 1}, 4));
    CHECK_THROWS_AS(make_true_incentives({1, 3}, 4), ValidationError);
    CHECK_THROWS_AS(make_true_incentives({4}, 4), ValidationError);
    CHECK_THROWS_AS(make_true_incentives({}, 4), ValidationError);
}

TEST_CASE("belief properties hold over random priors and ranges" *
          doctest::description("normalization, support, ratio preservation, "
                               "order independence, monotonicity")) {
    SplitMix64 rng(2024);
    const int kCases = 2000;
    for (int c = 0; c < kCases; ++c) {
        const int n_actions = 1 + static_cast<int>(rng.next() % 3);
        const int n_incentives = 2 + static_cast<int>(rng.next() % 4);
        const JointPrior prior = test::random_prior(n_actions, n_incentives, rng);
        SplitMix64 sampler(rng.next());
        const TrueIncentives truth = sample_true_incentives(prior, sampler);
        const IncentiveRanges ranges =
            test::random_consistent_ranges(truth, n_incentives, rng, 3);

        for (int n = 0; n < n_actions; ++n) {
            const BeliefVector b = marginal(prior, ranges, n);
            double total = 0.0;
            for (int k = 0; k < n_incentives; ++k) {
                if (k < ranges.lower(n) || k > ranges.upper(n)) CHECK(b.probs[k] == 0.0);
                CHECK(b.probs[k] >= 0.0);
                total += b.probs[k];
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

            // Nonzero entries preserve the box-restricted prior ratios.
            const std::vector<double> direct =
                test::direct_conditioning(prior, ranges, n);
            for (int k = 0; k < n_incentives; ++k)
                CHECK(b.probs[k] == doctest::Approx(direct[k]).epsilon(1e-12));
        }

        // Order independence of a consistent observation batch.
        std::vector<std::pair<Offer, Outcome>> obs;
        for (int i = 0; i < 4; ++i) {
            const Offer offer{static_cast<int>(rng.next() % n_actions),
                              static_cast<int>(rng.next() % n_incentives)};
            const Outcome outcome = offer.incentive >= truth.thresholds[offer.action]
                                        ? Outcome::Accept
                                        : Outcome::Reject;
            obs.emplace_back(offer, outcome);
        }
        IncentiveRanges forward = IncentiveRanges::full(n_actions, n_incentives);
        for (const auto& [offer, outcome] : obs)
            forward = update_ranges(forward, offer, outcome);
        IncentiveRanges backward = IncentiveRanges::full(n_actions, n_incentives);
        for (auto it = obs.rbegin(); it != obs.rend(); ++it)
            backward = update_ranges(backward, it->first, it->second);
        CHECK(forward == backward);

        // Monotonicity of both endpoints survives every update (the ranges
        // constructor asserts it; reaching here is the check).
        for (int n = 1; n < n_actions; ++n) {
            CHECK(forward.lower(n) <= forward.lower(n - 1));
            CHECK(forward.upper(n) <= forward.upper(n - 1));
        }
    }
}

TEST_SUITE_END();
