#pragma once

// Binary-state persuasion game: content is misinformation (state 0) or
// authentic (state 1). The platform's detector misperceives the state, tags
// the post from what it perceives, and users form posteriors from the tag.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace nudgesim {

/// Tolerance for algebraic identities (plausibility, interval confinement).
inline constexpr double kIdentityTol = 1e-12;
/// Tolerance for anything routed through the 2x2 misperception inverse.
inline constexpr double kRoundTripTol = 1e-10;

/// False-alarm rates of the detector and the quadratic effort-cost coefficient.
///
/// Construction enforces eps0, eps1 >= 0 with eps0 + eps1 < 1 (so the
/// misperception matrix is invertible) and k > 0.5 (so the marginal cost at
/// full effort, 2k, exceeds one). Violations raise ConfigError.
class GameConfig {
public:
    GameConfig(double eps0, double eps1, double k);

    double eps0() const { return eps0_; }
    double eps1() const { return eps1_; }
    double k() const { return k_; }
    /// Determinant of the misperception matrix, 1 - eps0 - eps1.
    double det() const { return 1.0 - eps0_ - eps1_; }

private:
    double eps0_;
    double eps1_;
    double k_;
};

/// Column-stochastic detector confusion: entry(perceived, truth) = d(perceived | truth).
struct MisperceptionMatrix {
    std::array<std::array<double, 2>, 2> entries{};

    static MisperceptionMatrix of(const GameConfig& config);

    double operator()(int perceived, int truth) const { return entries[perceived][truth]; }
    double det() const;
};

/// Prior over {0, 1} induced by the provider's effort: (1 - lambda, lambda).
class Prior {
public:
    explicit Prior(double lambda);

    double lambda() const { return lambda_; }
    std::array<double, 2> dist() const { return {1.0 - lambda_, lambda_}; }
    double operator[](int omega) const { return omega == 0 ? 1.0 - lambda_ : lambda_; }

private:
    double lambda_;
};

Prior prior_of(double lambda);

/// Tagging kernel pi(sigma | perceived state). Rows are indexed by the
/// perceived state and each row is a distribution over the two tags.
class TaggingPolicy {
public:
    using Kernel = std::array<std::array<double, 2>, 2>;

    explicit TaggingPolicy(const Kernel& kernel);

    /// Tags exactly what the detector perceives.
    static TaggingPolicy fully_informative();
    /// Both rows (0.5, 0.5).
    static TaggingPolicy uninformative();

    double prob(int signal, int perceived) const { return kernel_[perceived][signal]; }
    const Kernel& kernel() const { return kernel_; }

    double max_abs_diff(const TaggingPolicy& other) const;

private:
    Kernel kernel_;
};

/// Posterior probability that the post is authentic. The full belief vector
/// is (1 - mu, mu).
class Belief {
public:
    explicit Belief(double mu);

    double value() const { return mu_; }
    std::array<double, 2> as_vector() const { return {1.0 - mu_, mu_}; }

private:
    double mu_;
};

/// One support point of a distribution over posteriors.
struct Atom {
    double mu;
    double weight;
};

/// Finite distribution over posterior beliefs. Weights are nonnegative and
/// sum to one within kIdentityTol; support points are pairwise distinct.
/// Atom order is preserved, so for a binary signal space atom i corresponds
/// to tag i.
class PosteriorDistribution {
public:
    explicit PosteriorDistribution(std::vector<Atom> atoms);

    static PosteriorDistribution point_mass(double mu);

    std::span<const Atom> atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

    double mean() const;

    template <typename F>
    double expect(F&& fn) const {
        double acc = 0.0;
        for (const auto& atom : atoms_) acc += atom.weight * fn(atom.mu);
        return acc;
    }

    /// Drops atoms of weight <= weight_tol and renormalizes the rest.
    PosteriorDistribution pruned(double weight_tol) const;

private:
    std::vector<Atom> atoms_;
};

struct SignalPosterior {
    Belief belief;
    /// Probability that the tag is sent, <d^T pi(sigma|.), theta(lambda)>.
    double marginal;
};

/// Bayes posterior after tag `signal` under the misperceived prior.
/// Throws NullSignal when the tag has zero probability.
SignalPosterior posterior(const TaggingPolicy& policy, const GameConfig& config,
                          double lambda, int signal);

/// Range of beliefs any policy can induce, with the fully informative weights.
struct FeasibleInterval {
    Belief lo;
    Belief hi;
    double w_lo;
    double w_hi;
};

/// Endpoints come from the fully informative policy. A tag that is never
/// sent (possible only at lambda in {0, 1} with a zero false-alarm rate)
/// has its belief pinned to the degenerate prior lambda.
FeasibleInterval feasible_interval(const GameConfig& config, double lambda);

/// Quadratic-loss best response: the posterior mean.
double receiver_best_response(Belief belief);
/// -(a - omega)^2
double receiver_utility(int omega, double action);
/// Provider's reputation under a belief: stationary share of positive comments.
double agent_belief_payoff(Belief belief);
/// Platform's payoff under a belief, mu^2.
double sender_belief_value(Belief belief);

/// Distribution over posteriors induced by a policy. Zero-probability tags are
/// dropped and tags inducing equal beliefs (within kRoundTripTol) are merged.
PosteriorDistribution policy_to_posteriors(const TaggingPolicy& policy,
                                           const GameConfig& config, double lambda);

/// Inverse of policy_to_posteriors for at most two support points.
///
/// A singleton support {lambda} returns the uniform kernel (every
/// uninformative kernel induces it). Requires lambda in (0, 1). Throws
/// NotPlausible if the mean differs from lambda and Infeasible if the
/// support leaves the feasible interval.
TaggingPolicy posteriors_to_policy(const PosteriorDistribution& tau,
                                   const GameConfig& config, double lambda);

}  // namespace nudgesim
