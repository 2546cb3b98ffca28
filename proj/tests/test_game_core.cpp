#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nudgesim/errors.hpp"
#include "nudgesim/game_core.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace nudgesim;

namespace {

double enumerated_belief(const TaggingPolicy& policy, const GameConfig& config, double lambda, int signal,
                         double* marginal = nullptr) {
    double kernel[2][2];
    for (int p = 0; p < 2; ++p)
        for (int s = 0; s < 2; ++s) kernel[p][s] = policy.kernel()[p][s];
    const auto j = oracle::enumerate(config.eps0(), config.eps1(), lambda, kernel);
    if (marginal) *marginal = oracle::signal_marginal(j, signal);
    return oracle::belief_authentic(j, signal);
}

}  // namespace

TEST(GameConfig, RejectsInvalidParameters) {
    EXPECT_THROW(GameConfig(-0.01, 0.1, 1.0), ConfigError);
    EXPECT_THROW(GameConfig(0.1, -0.01, 1.0), ConfigError);
    EXPECT_THROW(GameConfig(0.6, 0.6, 1.0), ConfigError);
    EXPECT_THROW(GameConfig(0.5, 0.5, 1.0), ConfigError);
    EXPECT_THROW(GameConfig(0.1, 0.1, 0.5), ConfigError);
    EXPECT_THROW(GameConfig(0.1, 0.1, std::nan("")), ConfigError);
    EXPECT_NO_THROW(GameConfig(0.0, 0.0, 0.51));
    EXPECT_DOUBLE_EQ(GameConfig(0.15, 0.2, 1.0).det(), 0.65);
}

TEST(MisperceptionMatrix, ColumnStochasticWithDeterminant) {
    const auto d = MisperceptionMatrix::of(GameConfig(0.15, 0.2, 1.0));
    EXPECT_DOUBLE_EQ(d(0, 0), 0.85);
    EXPECT_DOUBLE_EQ(d(1, 0), 0.15);
    EXPECT_DOUBLE_EQ(d(0, 1), 0.2);
    EXPECT_DOUBLE_EQ(d(1, 1), 0.8);
    for (int truth = 0; truth < 2; ++truth) EXPECT_DOUBLE_EQ(d(0, truth) + d(1, truth), 1.0);
    EXPECT_NEAR(d.det(), 0.65, 1e-15);
}

TEST(Prior, EndpointsAndInterior) {
    EXPECT_EQ(prior_of(0.0).dist(), (std::array<double, 2>{1.0, 0.0}));
    EXPECT_EQ(prior_of(1.0).dist(), (std::array<double, 2>{0.0, 1.0}));
    EXPECT_NEAR(prior_of(0.66)[0], 0.34, 1e-15);
    EXPECT_DOUBLE_EQ(prior_of(0.66)[1], 0.66);
    EXPECT_THROW(prior_of(-0.1), DomainError);
    EXPECT_THROW(prior_of(1.1), DomainError);
}

TEST(TaggingPolicy, ValidatesRows) {
    EXPECT_THROW(TaggingPolicy({{{0.5, 0.6}, {0.5, 0.5}}}), DomainError);
    EXPECT_THROW(TaggingPolicy({{{-0.1, 1.1}, {0.5, 0.5}}}), DomainError);
    EXPECT_DOUBLE_EQ(TaggingPolicy::fully_informative().prob(1, 1), 1.0);
    EXPECT_DOUBLE_EQ(TaggingPolicy::fully_informative().prob(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(TaggingPolicy::uninformative().prob(0, 1), 0.5);
}

TEST(PosteriorDistribution, Validation) {
    EXPECT_THROW(PosteriorDistribution({}), DomainError);
    EXPECT_THROW(PosteriorDistribution({{0.2, 0.5}, {0.2, 0.5}}), DomainError);
    EXPECT_THROW(PosteriorDistribution({{0.2, 0.5}, {0.4, 0.6}}), DomainError);
    EXPECT_THROW(PosteriorDistribution({{1.2, 1.0}}), DomainError);
    EXPECT_THROW(PosteriorDistribution({{0.2, -0.1}, {0.4, 1.1}}), DomainError);
    const PosteriorDistribution tau({{0.2, 0.25}, {0.6, 0.75}});
    EXPECT_NEAR(tau.mean(), 0.5, 1e-15);
    const auto pruned = PosteriorDistribution({{0.1, 0.0}, {0.3, 1.0}}).pruned(1e-12);
    ASSERT_EQ(pruned.size(), 1u);
    EXPECT_DOUBLE_EQ(pruned.atoms()[0].mu, 0.3);
}

TEST(Posterior, PerfectDetectionRevealsState) {
    const auto post = posterior(TaggingPolicy::fully_informative(), GameConfig(0.0, 0.0, 1.0), 0.5, 1);
    EXPECT_DOUBLE_EQ(post.belief.value(), 1.0);
    EXPECT_DOUBLE_EQ(post.marginal, 0.5);
}

TEST(Posterior, CaseOneAuthenticTag) {
    const GameConfig config(0.05, 0.05, 0.6);
    const auto post = posterior(TaggingPolicy::fully_informative(), config, 0.66, 1);
    double marginal = 0.0;
    const double mu = enumerated_belief(TaggingPolicy::fully_informative(), config, 0.66, 1, &marginal);
    EXPECT_NEAR(post.belief.value(), mu, 1e-14);
    EXPECT_NEAR(post.marginal, marginal, 1e-14);
    EXPECT_NEAR(post.belief.value(), 0.9736, 5e-5);
    EXPECT_NEAR(post.marginal, 0.644, 5e-4);
}

TEST(Posterior, UninformativeKeepsPrior) {
    const auto post = posterior(TaggingPolicy::uninformative(), GameConfig(0.1, 0.3, 1.0), 0.3, 0);
    EXPECT_NEAR(post.belief.value(), 0.3, 1e-15);
    EXPECT_NEAR(post.marginal, 0.5, 1e-15);
}

TEST(Posterior, NeverSentTagThrows) {
    const TaggingPolicy always_zero({{{1.0, 0.0}, {1.0, 0.0}}});
    EXPECT_THROW(posterior(always_zero, GameConfig(0.1, 0.1, 1.0), 0.4, 1), NullSignal);
    // Perfect detection at lambda = 0 never perceives authentic content.
    EXPECT_THROW(posterior(TaggingPolicy::fully_informative(), GameConfig(0.0, 0.0, 1.0), 0.0, 1), NullSignal);
    EXPECT_THROW(posterior(always_zero, GameConfig(0.1, 0.1, 1.0), 0.4, 2), DomainError);
}

TEST(Posterior, MatchesEnumerationOnRandomInputs) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const auto config = testing_support::random_config(rng, 0.95);
        const auto policy = testing_support::random_policy(rng);
        const double lambda = u(rng);
        for (int s = 0; s < 2; ++s) {
            double marginal = 0.0;
            const double mu = enumerated_belief(policy, config, lambda, s, &marginal);
            if (marginal <= 0.0) continue;
            const auto post = posterior(policy, config, lambda, s);
            EXPECT_NEAR(post.belief.value(), mu, 1e-12);
            EXPECT_NEAR(post.marginal, marginal, 1e-14);
        }
    }
}

TEST(FeasibleInterval, ZeroErrorFullRange) {
    const auto r = feasible_interval(GameConfig(0.0, 0.0, 1.0), 0.4);
    EXPECT_DOUBLE_EQ(r.lo.value(), 0.0);
    EXPECT_DOUBLE_EQ(r.hi.value(), 1.0);
    EXPECT_DOUBLE_EQ(r.w_lo, 0.6);
    EXPECT_DOUBLE_EQ(r.w_hi, 0.4);
}

TEST(FeasibleInterval, CaseOne) {
    const auto r = feasible_interval(GameConfig(0.05, 0.05, 0.6), 0.66);
    double lo, hi;
    oracle::truthful_beliefs(0.05, 0.05, 0.66, lo, hi);
    EXPECT_NEAR(r.lo.value(), lo, 1e-14);
    EXPECT_NEAR(r.hi.value(), hi, 1e-14);
    EXPECT_NEAR(r.lo.value(), 0.0927, 5e-5);
    EXPECT_NEAR(r.hi.value(), 0.9736, 5e-5);
    EXPECT_NEAR(r.w_lo, 0.356, 1e-12);
    EXPECT_NEAR(r.w_hi, 0.644, 1e-12);
}

TEST(FeasibleInterval, DegeneratePrior) {
    const auto r = feasible_interval(GameConfig(0.15, 0.2, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(r.lo.value(), 0.0);
    EXPECT_DOUBLE_EQ(r.hi.value(), 0.0);
    EXPECT_DOUBLE_EQ(r.w_lo, 0.85);
    EXPECT_DOUBLE_EQ(r.w_hi, 0.15);
    EXPECT_THROW(feasible_interval(GameConfig(0.1, 0.1, 1.0), 1.5), DomainError);
}

TEST(FeasibleInterval, WeightsSumAndBracketPrior) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto config = testing_support::random_config(rng, 0.95);
        const double lambda = u(rng);
        const auto r = feasible_interval(config, lambda);
        EXPECT_NEAR(r.w_lo + r.w_hi, 1.0, 1e-15);
        EXPECT_LE(r.lo.value(), lambda + 1e-15);
        EXPECT_GE(r.hi.value(), lambda - 1e-15);
    }
}

TEST(Utilities, BestResponseAndPayoffs) {
    EXPECT_DOUBLE_EQ(receiver_best_response(Belief(0.0)), 0.0);
    EXPECT_DOUBLE_EQ(receiver_best_response(Belief(1.0)), 1.0);
    EXPECT_DOUBLE_EQ(receiver_best_response(Belief(0.5)), 0.5);
    EXPECT_DOUBLE_EQ(receiver_utility(1, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(receiver_utility(0, 1.0), -1.0);
    EXPECT_NEAR(receiver_utility(1, 0.7), -0.09, 1e-15);
    EXPECT_DOUBLE_EQ(agent_belief_payoff(Belief(0.0)), 0.0);
    EXPECT_DOUBLE_EQ(agent_belief_payoff(Belief(0.9736)), 0.9736);
    EXPECT_DOUBLE_EQ(agent_belief_payoff(Belief(0.37)), 0.37);
    EXPECT_DOUBLE_EQ(sender_belief_value(Belief(0.0)), 0.0);
    EXPECT_DOUBLE_EQ(sender_belief_value(Belief(1.0)), 1.0);
    EXPECT_NEAR(sender_belief_value(Belief(0.9736)), 0.9479, 1e-4);
    EXPECT_THROW(Belief(1.0001), DomainError);
}

TEST(Utilities, BestResponseBeatsRandomActions) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const Belief b(u(rng));
        const double a = u(rng);
        auto expected = [&](double action) {
            return (1.0 - b.value()) * receiver_utility(0, action) + b.value() * receiver_utility(1, action);
        };
        EXPECT_GE(expected(receiver_best_response(b)), expected(a));
    }
}

TEST(PolicyToPosteriors, FullyInformativeCaseOne) {
    const GameConfig config(0.05, 0.05, 0.6);
    const auto tau = policy_to_posteriors(TaggingPolicy::fully_informative(), config, 0.66);
    ASSERT_EQ(tau.size(), 2u);
    EXPECT_NEAR(tau.atoms()[0].mu, 0.0927, 5e-5);
    EXPECT_NEAR(tau.atoms()[1].mu, 0.9736, 5e-5);
    EXPECT_NEAR(tau.atoms()[0].weight, 0.356, 1e-12);
    EXPECT_NEAR(tau.atoms()[1].weight, 0.644, 1e-12);
}

TEST(PolicyToPosteriors, UninformativeMergesToPrior) {
    const auto tau = policy_to_posteriors(TaggingPolicy::uninformative(), GameConfig(0.1, 0.2, 1.0), 0.3);
    ASSERT_EQ(tau.size(), 1u);
    EXPECT_NEAR(tau.atoms()[0].mu, 0.3, 1e-15);
    EXPECT_NEAR(tau.atoms()[0].weight, 1.0, 1e-15);
}

TEST(PolicyToPosteriors, ZeroEffortCollapses) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 50; ++trial) {
        const auto tau = policy_to_posteriors(testing_support::random_policy(rng), testing_support::random_config(rng), 0.0);
        ASSERT_EQ(tau.size(), 1u);
        EXPECT_DOUBLE_EQ(tau.atoms()[0].mu, 0.0);
        EXPECT_NEAR(tau.atoms()[0].weight, 1.0, 1e-15);
    }
}

TEST(PolicyToPosteriors, PlausibleAndConfinedOnRandomPolicies) {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto config = testing_support::random_config(rng, 0.95);
        const auto policy = testing_support::random_policy(rng);
        const double lambda = trial % 100 == 0 ? 1.0 : u(rng);
        const auto tau = policy_to_posteriors(policy, config, lambda);
        EXPECT_NEAR(tau.mean(), lambda, 1e-12);
        const auto r = feasible_interval(config, lambda);
        for (const auto& a : tau.atoms()) {
            EXPECT_GE(a.mu, r.lo.value() - 1e-12);
            EXPECT_LE(a.mu, r.hi.value() + 1e-12);
        }
    }
}

TEST(PosteriorsToPolicy, IdentityFromInterval) {
    const GameConfig config(0.05, 0.05, 0.6);
    const auto r = feasible_interval(config, 0.66);
    const PosteriorDistribution tau({{r.lo.value(), r.w_lo}, {r.hi.value(), r.w_hi}});
    const auto policy = posteriors_to_policy(tau, config, 0.66);
    EXPECT_LE(policy.max_abs_diff(TaggingPolicy::fully_informative()), 1e-10);
}

TEST(PosteriorsToPolicy, SingletonGivesUniformKernel) {
    const auto policy = posteriors_to_policy(PosteriorDistribution::point_mass(0.3), GameConfig(0.1, 0.2, 1.0), 0.3);
    EXPECT_EQ(policy.max_abs_diff(TaggingPolicy::uninformative()), 0.0);
    const auto back = policy_to_posteriors(policy, GameConfig(0.1, 0.2, 1.0), 0.3);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_NEAR(back.atoms()[0].mu, 0.3, 1e-15);
}

TEST(PosteriorsToPolicy, Errors) {
    const GameConfig config(0.05, 0.05, 0.6);
    EXPECT_THROW(posteriors_to_policy(PosteriorDistribution({{0.9, 0.7}, {0.1, 0.3}}), config, 0.4), NotPlausible);
    // Plausible but wider than the feasible interval.
    EXPECT_THROW(posteriors_to_policy(PosteriorDistribution({{0.0, 0.6}, {1.0, 0.4}}), config, 0.4), Infeasible);
    EXPECT_THROW(posteriors_to_policy(PosteriorDistribution::point_mass(0.0), config, 0.0), DomainError);
    EXPECT_THROW(posteriors_to_policy(PosteriorDistribution::point_mass(1.0), config, 1.0), DomainError);
    EXPECT_THROW(posteriors_to_policy(PosteriorDistribution({{0.2, 0.25}, {0.4, 0.5}, {0.6, 0.25}}), config, 0.4),
                 DomainError);
}

TEST(PosteriorsToPolicy, RoundTripOnRandomKernels) {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> u(0.02, 0.98);
    int checked = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const auto config = testing_support::random_config(rng, 0.8);
        const auto policy = testing_support::random_policy(rng);
        const double lambda = u(rng);
        const auto tau = policy_to_posteriors(policy, config, lambda);
        if (tau.size() != 2) continue;
        const auto back = posteriors_to_policy(tau, config, lambda);
        EXPECT_LE(back.max_abs_diff(policy), 1e-10) << "trial " << trial;
        ++checked;
    }
    EXPECT_GT(checked, 1900);
}

TEST(FeasibleInterval, ShapeOnFineGrid) {
    // Endpoints are increasing; the lower one convex, the upper one concave.
    std::mt19937_64 rng(17);
    for (int pair = 0; pair < 20; ++pair) {
        const auto config = testing_support::random_config(rng, 0.9);
        std::vector<double> lo;
        std::vector<double> hi;
        for (int i = 0; i <= 1000; ++i) {
            const auto r = feasible_interval(config, i * 1e-3);
            lo.push_back(r.lo.value());
            hi.push_back(r.hi.value());
        }
        for (std::size_t i = 1; i < lo.size(); ++i) {
            EXPECT_GE(lo[i] - lo[i - 1], -1e-15);
            EXPECT_GE(hi[i] - hi[i - 1], -1e-15);
        }
        for (std::size_t i = 2; i < lo.size(); ++i) {
            EXPECT_GE((lo[i] - lo[i - 1]) - (lo[i - 1] - lo[i - 2]), -1e-13);
            EXPECT_LE((hi[i] - hi[i - 1]) - (hi[i - 1] - hi[i - 2]), 1e-13);
        }
    }
}
