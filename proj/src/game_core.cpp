#include "nudgesim/game_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nudgesim/errors.hpp"

namespace nudgesim {

namespace {

void require_effort(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        std::ostringstream os;
        os << "effort must lie in [0, 1], got " << lambda;
        throw DomainError(os.str());
    }
}

void require_signal(int signal) {
    if (signal != 0 && signal != 1) throw DomainError("tag must be 0 or 1");
}

}  // namespace

GameConfig::GameConfig(double eps0, double eps1, double k) : eps0_(eps0), eps1_(eps1), k_(k) {
    if (!(std::isfinite(eps0) && std::isfinite(eps1) && std::isfinite(k))) {
        throw ConfigError("game parameters must be finite");
    }
    if (eps0 < 0.0 || eps1 < 0.0) {
        throw ConfigError("false-alarm rates must be nonnegative");
    }
    if (!(eps0 + eps1 < 1.0)) {
        std::ostringstream os;
        os << "false-alarm rates must satisfy eps0 + eps1 < 1, got " << eps0 + eps1;
        throw ConfigError(os.str());
    }
    if (!(k > 0.5)) {
        std::ostringstream os;
        os << "cost coefficient must exceed 0.5, got " << k;
        throw ConfigError(os.str());
    }
}

MisperceptionMatrix MisperceptionMatrix::of(const GameConfig& config) {
    MisperceptionMatrix d;
    d.entries = {{{1.0 - config.eps0(), config.eps1()}, {config.eps0(), 1.0 - config.eps1()}}};
    return d;
}

double MisperceptionMatrix::det() const {
    return entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0];
}

Prior::Prior(double lambda) : lambda_(lambda) { require_effort(lambda); }

Prior prior_of(double lambda) { return Prior(lambda); }

TaggingPolicy::TaggingPolicy(const Kernel& kernel) : kernel_(kernel) {
    for (const auto& row : kernel_) {
        for (double p : row) {
            if (!(p >= 0.0 && p <= 1.0)) throw DomainError("tag probabilities must lie in [0, 1]");
        }
        if (std::abs(row[0] + row[1] - 1.0) > kIdentityTol) {
            throw DomainError("each row of a tagging kernel must sum to one");
        }
    }
}

TaggingPolicy TaggingPolicy::fully_informative() { return TaggingPolicy({{{1.0, 0.0}, {0.0, 1.0}}}); }

TaggingPolicy TaggingPolicy::uninformative() { return TaggingPolicy({{{0.5, 0.5}, {0.5, 0.5}}}); }

double TaggingPolicy::max_abs_diff(const TaggingPolicy& other) const {
    double worst = 0.0;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) worst = std::max(worst, std::abs(kernel_[r][c] - other.kernel_[r][c]));
    }
    return worst;
}

Belief::Belief(double mu) : mu_(mu) {
    if (!(mu >= 0.0 && mu <= 1.0)) {
        std::ostringstream os;
        os << "belief must lie in [0, 1], got " << mu;
        throw DomainError(os.str());
    }
}

PosteriorDistribution::PosteriorDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw DomainError("posterior distribution needs at least one atom");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const auto& a = atoms_[i];
        if (!(a.mu >= 0.0 && a.mu <= 1.0)) throw DomainError("posterior support must lie in [0, 1]");
        if (!(a.weight >= 0.0)) throw DomainError("posterior weights must be nonnegative");
        for (std::size_t j = 0; j < i; ++j) {
            if (atoms_[j].mu == a.mu) throw DomainError("posterior support points must be distinct");
        }
        total += a.weight;
    }
    if (std::abs(total - 1.0) > kIdentityTol) {
        std::ostringstream os;
        os << "posterior weights must sum to one, got " << total;
        throw DomainError(os.str());
    }
}

PosteriorDistribution PosteriorDistribution::point_mass(double mu) {
    return PosteriorDistribution({{mu, 1.0}});
}

double PosteriorDistribution::mean() const {
    return expect([](double mu) { return mu; });
}

PosteriorDistribution PosteriorDistribution::pruned(double weight_tol) const {
    std::vector<Atom> kept;
    double total = 0.0;
    for (const auto& a : atoms_) {
        if (a.weight > weight_tol) {
            kept.push_back(a);
            total += a.weight;
        }
    }
    if (kept.empty()) throw DomainError("pruning removed every atom");
    for (auto& a : kept) a.weight /= total;
    return PosteriorDistribution(std::move(kept));
}

SignalPosterior posterior(const TaggingPolicy& policy, const GameConfig& config, double lambda,
                          int signal) {
    require_signal(signal);
    const Prior prior(lambda);
    const auto d = MisperceptionMatrix::of(config);

    std::array<double, 2> joint{};
    for (int truth = 0; truth < 2; ++truth) {
        // (d^T pi(signal|.))[truth] weighted by the prior
        const double sent = d(0, truth) * policy.prob(signal, 0) + d(1, truth) * policy.prob(signal, 1);
        joint[truth] = sent * prior[truth];
    }
    const double marginal = joint[0] + joint[1];
    if (!(marginal > 0.0)) {
        std::ostringstream os;
        os << "tag " << signal << " is never sent at effort " << lambda;
        throw NullSignal(os.str());
    }
    return {Belief(joint[1] / marginal), marginal};
}

FeasibleInterval feasible_interval(const GameConfig& config, double lambda) {
    require_effort(lambda);
    const double e0 = config.eps0();
    const double e1 = config.eps1();
    const double w_lo = (1.0 - lambda) * (1.0 - e0) + lambda * e1;
    const double w_hi = (1.0 - lambda) * e0 + lambda * (1.0 - e1);
    const double lo = w_lo > 0.0 ? lambda * e1 / w_lo : lambda;
    const double hi = w_hi > 0.0 ? lambda * (1.0 - e1) / w_hi : lambda;
    return {Belief(lo), Belief(hi), w_lo, w_hi};
}

double receiver_best_response(Belief belief) { return belief.value(); }

double receiver_utility(int omega, double action) {
    if (omega != 0 && omega != 1) throw DomainError("state must be 0 or 1");
    const double gap = action - omega;
    return -gap * gap;
}

double agent_belief_payoff(Belief belief) { return belief.value(); }

double sender_belief_value(Belief belief) { return belief.value() * belief.value(); }

PosteriorDistribution policy_to_posteriors(const TaggingPolicy& policy, const GameConfig& config,
                                           double lambda) {
    std::vector<Atom> atoms;
    for (int signal = 0; signal < 2; ++signal) {
        SignalPosterior post{Belief(0.0), 0.0};
        try {
            post = posterior(policy, config, lambda, signal);
        } catch (const NullSignal&) {
            continue;
        }
        const double mu = post.belief.value();
        auto same = std::find_if(atoms.begin(), atoms.end(),
                                 [mu](const Atom& a) { return std::abs(a.mu - mu) <= kRoundTripTol; });
        if (same != atoms.end()) {
            same->weight += post.marginal;
        } else {
            atoms.push_back({mu, post.marginal});
        }
    }
    return PosteriorDistribution(std::move(atoms));
}

TaggingPolicy posteriors_to_policy(const PosteriorDistribution& tau, const GameConfig& config,
                                   double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw DomainError("inverting the posterior map requires effort strictly inside (0, 1)");
    }
    if (tau.size() > 2) throw DomainError("a binary tag space induces at most two posteriors");

    const double mean = tau.mean();
    if (std::abs(mean - lambda) > kRoundTripTol) {
        std::ostringstream os;
        os << "posterior mean " << mean << " differs from the prior " << lambda;
        throw NotPlausible(os.str());
    }

    const auto range = feasible_interval(config, lambda);
    for (const auto& a : tau.atoms()) {
        if (a.mu < range.lo.value() - kRoundTripTol || a.mu > range.hi.value() + kRoundTripTol) {
            std::ostringstream os;
            os << "belief " << a.mu << " lies outside the feasible interval [" << range.lo.value()
               << ", " << range.hi.value() << "]";
            throw Infeasible(os.str());
        }
    }

    if (tau.size() == 1) return TaggingPolicy::uninformative();

    const double e0 = config.eps0();
    const double e1 = config.eps1();
    const double det = config.det();
    TaggingPolicy::Kernel kernel{};
    for (int signal = 0; signal < 2; ++signal) {
        const auto& a = tau.atoms()[signal];
        // tau(mu) * (mu ./ theta), then (d^T)^{-1}
        const double v0 = a.weight * (1.0 - a.mu) / (1.0 - lambda);
        const double v1 = a.weight * a.mu / lambda;
        kernel[0][signal] = ((1.0 - e1) * v0 - e0 * v1) / det;
        kernel[1][signal] = (-e1 * v0 + (1.0 - e0) * v1) / det;
    }
    for (auto& row : kernel) {
        for (double& p : row) {
            if (p < -kRoundTripTol || p > 1.0 + kRoundTripTol) {
                throw Infeasible("recovered tagging kernel leaves [0, 1]");
            }
            p = std::clamp(p, 0.0, 1.0);
        }
        row[1] = 1.0 - row[0];
    }
    return TaggingPolicy(kernel);
}

}  // namespace nudgesim
