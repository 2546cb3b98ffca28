#pragma once

// Implementable effort, tagging-policy construction, and optimality
// certificates for the platform's design problem over posterior distributions:
//
//   maximize   E_tau[mu^2]
//   subject to E_tau[mu]   = lambda          (plausibility)
//              E_tau[f(mu)] = 0              (provider's first-order condition)

#include <cstddef>

#include "json.hpp"
#include "nudgesim/game_core.hpp"

namespace nudgesim {

/// Quadratic effort cost c(lambda) = k lambda^2.
class CostFunction {
public:
    explicit CostFunction(double k);

    double k() const { return k_; }
    double value(double lambda) const { return k_ * lambda * lambda; }
    double gradient(double lambda) const { return 2.0 * k_ * lambda; }
    double hessian(double /*lambda*/) const { return 2.0 * k_; }

private:
    double k_;
};

/// Per-belief term of the provider's incentive constraint at effort lambda:
///   f(mu) = [-(1 - mu) / (1 - lambda) + mu / lambda] * mu - c'(lambda)
/// Defined only for lambda in (0, 1).
class ICFunctional {
public:
    ICFunctional(double lambda, CostFunction cost);

    double operator()(double mu) const;
    double lambda() const { return lambda_; }

private:
    double lambda_;
    CostFunction cost_;
};

/// E_tau[f(mu)]. Zero exactly when tau makes lambda the provider's best effort.
double ic_residual(const PosteriorDistribution& tau, double lambda, const CostFunction& cost);

struct EffortFrontier {
    double lambda_bar = 0.0;
    /// Set when the incentive gap is nonnegative already at the bottom of the
    /// bracket, i.e. no positive effort is implementable.
    bool no_positive_effort = false;
};

/// Largest implementable effort: root of c'(lambda) = D (mu_hi - mu_lo) found by
/// bisection on [1e-8, 1] down to double resolution. The reported value is the
/// feasible-side end of the final bracket.
EffortFrontier max_implementable_effort(const GameConfig& config);

/// D (mu_hi - mu_lo) - c'(lambda); nonnegative iff lambda <= lambda_bar.
double feasibility_margin(const GameConfig& config, double lambda);

/// Posteriors induced by fully informative tagging.
PosteriorDistribution fully_informative_distribution(const GameConfig& config, double lambda);

/// Three-point distribution {mu_lo, lambda, mu_hi} that mixes fully informative
/// tagging with an uninformative tag so that exactly `lambda` is incentivized.
/// Throws Infeasible above lambda_bar.
PosteriorDistribution hybrid_distribution(const GameConfig& config, double lambda);

/// E_tau[mu^2]
double sender_value_of(const PosteriorDistribution& tau);

/// Platform value of fully informative tagging at effort lambda, ignoring the
/// incentive constraint.
double fully_informative_value(const GameConfig& config, double lambda);

/// Multipliers (psi, phi, rho) such that
///   L(mu) = mu^2 + psi f(mu) - phi mu <= rho   on [mu_lo, mu_hi]
/// with equality on the support of the certified distribution.
struct LagrangianCertificate {
    double psi = 0.0;
    double phi = 0.0;
    double rho = 0.0;
    /// Largest positive excess of L over rho on the fitting grid.
    double max_violation = 0.0;
    /// Largest |L(mu) - rho| over support points with positive weight.
    double support_residual = 0.0;
    std::size_t grid_size = 0;
};

double lagrangian_value(const LagrangianCertificate& cert, double mu, const ICFunctional& ic);

/// Fits a certificate by linear programming over a uniform grid on the
/// feasible interval.
///
/// Preconditions are checked in order: lambda in (0, 1) (DomainError), tau
/// plausible within 1e-9 (NotPlausible), lambda <= lambda_bar (Infeasible),
/// tau incentive compatible within 1e-9 (NotOptimal). If no multipliers keep
/// L within 1e-9 of the bound, throws NotOptimal.
LagrangianCertificate fit_lagrangian(const PosteriorDistribution& tau, const GameConfig& config,
                                     double lambda, const CostFunction& cost,
                                     std::size_t grid_size = 1000);

/// Largest positive excess of L over rho on a fresh uniform grid.
double certificate_violation(const LagrangianCertificate& cert, const GameConfig& config,
                             double lambda, const CostFunction& cost, std::size_t grid_size);

struct DominanceCheck {
    std::size_t grid_points = 0;
    /// Fully informative value never decreases along the effort grid.
    bool monotone = true;
    /// Value at lambda_bar beats fully informative and hybrid values at every grid effort.
    bool dominates = true;
    double worst_monotone_drop = 0.0;
    double worst_dominance_gap = 0.0;
};

/// Walks the value chain V(lambda_bar) >= V_full(lambda) >= V_hybrid(lambda)
/// on `grid_points` efforts spanning [0, lambda_bar].
DominanceCheck check_dominance(const GameConfig& config, double lambda_bar,
                               std::size_t grid_points = 50, double slack = 1e-12);

struct Residuals {
    double plausibility = 0.0;
    double ic = 0.0;
};

struct EquilibriumReport {
    double lambda_bar;
    TaggingPolicy policy;
    PosteriorDistribution tau;
    double sender_value;
    LagrangianCertificate certificate;
    Residuals residuals;
    DominanceCheck dominance;
};

/// Transparent tagging at the largest implementable effort, with its
/// certificate and the value-dominance check. Throws NoPositiveEffort.
EquilibriumReport optimal_policy(const GameConfig& config);

void to_json(nlohmann::json& j, const LagrangianCertificate& cert);
void to_json(nlohmann::json& j, const DominanceCheck& check);
void to_json(nlohmann::json& j, const EquilibriumReport& report);
void to_json(nlohmann::json& j, const PosteriorDistribution& tau);
void to_json(nlohmann::json& j, const TaggingPolicy& policy);

}  // namespace nudgesim
