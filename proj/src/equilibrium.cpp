#include "nudgesim/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "nudgesim/errors.hpp"
#include "nudgesim/linear_program.hpp"

namespace nudgesim {

namespace {

constexpr double kBracketLow = 1e-8;
constexpr double kResidualTol = 1e-9;
constexpr double kCertificateTol = 1e-9;
// Atoms lighter than this carry no equality row in the certificate.
constexpr double kNegligibleWeight = 1e-12;

double incentive_gap(const GameConfig& config, const CostFunction& cost, double lambda) {
    const auto range = feasible_interval(config, lambda);
    return cost.gradient(lambda) - config.det() * (range.hi.value() - range.lo.value());
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
    std::vector<double> grid(points);
    if (points == 1) {
        grid[0] = lo;
        return grid;
    }
    for (std::size_t j = 0; j < points; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(points - 1);
        grid[j] = j + 1 == points ? hi : lo + t * (hi - lo);
    }
    return grid;
}

}  // namespace

CostFunction::CostFunction(double k) : k_(k) {
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("cost coefficient must be positive");
}

ICFunctional::ICFunctional(double lambda, CostFunction cost) : lambda_(lambda), cost_(cost) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        std::ostringstream os;
        os << "incentive functional needs effort strictly inside (0, 1), got " << lambda;
        throw DomainError(os.str());
    }
}

double ICFunctional::operator()(double mu) const {
    const double score = -(1.0 - mu) / (1.0 - lambda_) + mu / lambda_;
    return score * mu - cost_.gradient(lambda_);
}

double ic_residual(const PosteriorDistribution& tau, double lambda, const CostFunction& cost) {
    const ICFunctional f(lambda, cost);
    return tau.expect(f);
}

EffortFrontier max_implementable_effort(const GameConfig& config) {
    const CostFunction cost(config.k());
    double lo = kBracketLow;
    double hi = 1.0;
    if (incentive_gap(config, cost, lo) >= 0.0) return {0.0, true};

    // gap(lo) < 0 <= gap(hi); gap(1) = 2k > 0 always.
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        if (incentive_gap(config, cost, mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {lo, false};
}

double feasibility_margin(const GameConfig& config, double lambda) {
    return -incentive_gap(config, CostFunction(config.k()), lambda);
}

PosteriorDistribution fully_informative_distribution(const GameConfig& config, double lambda) {
    return policy_to_posteriors(TaggingPolicy::fully_informative(), config, lambda);
}

PosteriorDistribution hybrid_distribution(const GameConfig& config, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("effort must lie in [0, 1]");
    if (lambda == 0.0) return PosteriorDistribution::point_mass(0.0);

    const CostFunction cost(config.k());
    const auto range = feasible_interval(config, lambda);
    const double spread = range.hi.value() - range.lo.value();
    const double share = cost.gradient(lambda) / (config.det() * spread);
    if (!(share <= 1.0 + kIdentityTol)) {
        std::ostringstream os;
        os << "effort " << lambda << " exceeds the largest implementable effort";
        throw Infeasible(os.str());
    }
    const double middle = std::max(0.0, 1.0 - share);
    return PosteriorDistribution({{range.lo.value(), range.w_lo * share},
                                  {lambda, middle},
                                  {range.hi.value(), range.w_hi * share}});
}

double sender_value_of(const PosteriorDistribution& tau) {
    return tau.expect([](double mu) { return mu * mu; });
}

double fully_informative_value(const GameConfig& config, double lambda) {
    const auto range = feasible_interval(config, lambda);
    return range.w_lo * sender_belief_value(range.lo) + range.w_hi * sender_belief_value(range.hi);
}

double lagrangian_value(const LagrangianCertificate& cert, double mu, const ICFunctional& ic) {
    return mu * mu + cert.psi * ic(mu) - cert.phi * mu;
}

LagrangianCertificate fit_lagrangian(const PosteriorDistribution& tau, const GameConfig& config,
                                     double lambda, const CostFunction& cost, std::size_t grid_size) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("certificate needs effort strictly inside (0, 1)");
    if (grid_size < 2) throw DomainError("certificate grid needs at least two points");

    const double plausibility = std::abs(tau.mean() - lambda);
    if (plausibility > kResidualTol) {
        std::ostringstream os;
        os << "posterior mean misses the prior by " << plausibility;
        throw NotPlausible(os.str());
    }
    if (feasibility_margin(config, lambda) < -kResidualTol) {
        throw Infeasible("effort exceeds the largest implementable effort");
    }
    const double ic = ic_residual(tau, lambda, cost);
    if (std::abs(ic) > kResidualTol) {
        std::ostringstream os;
        os << "distribution violates the incentive constraint (residual " << ic << ")";
        throw NotOptimal(os.str());
    }

    const auto range = feasible_interval(config, lambda);
    const double lo = range.lo.value();
    const double hi = range.hi.value();
    for (const auto& a : tau.atoms()) {
        if (a.mu < lo - kRoundTripTol || a.mu > hi + kRoundTripTol) {
            throw Infeasible("posterior support leaves the feasible interval");
        }
    }

    const ICFunctional f(lambda, cost);
    const auto grid = uniform_grid(lo, hi, grid_size);

    // Variables: [psi_neg, phi_pos, phi_neg, rho_pos, rho_neg, t], psi = -psi_neg,
    // rho = shift + rho_pos - rho_neg. The shift keeps every inequality
    // right-hand side nonnegative so phase one only handles the support rows.
    double shift = 0.0;
    for (double mu : grid) shift = std::max(shift, mu * mu);
    for (const auto& a : tau.atoms()) shift = std::max(shift, a.mu * a.mu);

    auto row_for = [&](double mu) {
        return std::vector<double>{-f(mu), -mu, mu, -1.0, 1.0, 0.0};
    };

    lp::Problem problem;
    problem.cost = {0.0, 0.0, 0.0, 0.0, 0.0, 1.0};
    problem.a_ub.reserve(grid.size());
    problem.b_ub.reserve(grid.size());
    for (double mu : grid) {
        auto row = row_for(mu);
        row[5] = -1.0;
        problem.a_ub.push_back(std::move(row));
        problem.b_ub.push_back(shift - mu * mu);
    }
    for (const auto& a : tau.atoms()) {
        if (a.weight <= kNegligibleWeight) continue;
        problem.a_eq.push_back(row_for(a.mu));
        problem.b_eq.push_back(shift - a.mu * a.mu);
    }

    const auto sol = lp::solve(problem);
    if (sol.status != lp::Status::Optimal) {
        std::ostringstream os;
        os << "no supporting Lagrangian exists (" << lp::to_string(sol.status) << ")";
        throw NotOptimal(os.str());
    }

    LagrangianCertificate cert;
    cert.psi = -sol.x[0];
    cert.phi = sol.x[1] - sol.x[2];
    cert.rho = shift + sol.x[3] - sol.x[4];
    cert.grid_size = grid_size;
    cert.max_violation = 0.0;
    for (double mu : grid) cert.max_violation = std::max(cert.max_violation, lagrangian_value(cert, mu, f) - cert.rho);
    cert.support_residual = 0.0;
    for (const auto& a : tau.atoms()) {
        if (a.weight <= kNegligibleWeight) continue;
        cert.support_residual = std::max(cert.support_residual, std::abs(lagrangian_value(cert, a.mu, f) - cert.rho));
    }
    if (cert.max_violation > kCertificateTol || cert.support_residual > kCertificateTol) {
        std::ostringstream os;
        os << "no supporting Lagrangian within tolerance (violation " << cert.max_violation
           << ", support residual " << cert.support_residual << ")";
        throw NotOptimal(os.str());
    }
    return cert;
}

double certificate_violation(const LagrangianCertificate& cert, const GameConfig& config, double lambda,
                             const CostFunction& cost, std::size_t grid_size) {
    const ICFunctional f(lambda, cost);
    const auto range = feasible_interval(config, lambda);
    double worst = 0.0;
    for (double mu : uniform_grid(range.lo.value(), range.hi.value(), grid_size)) {
        worst = std::max(worst, lagrangian_value(cert, mu, f) - cert.rho);
    }
    return worst;
}

DominanceCheck check_dominance(const GameConfig& config, double lambda_bar, std::size_t grid_points,
                               double slack) {
    DominanceCheck check;
    check.grid_points = grid_points;
    const double top = fully_informative_value(config, lambda_bar);
    double previous = -1.0;
    for (double lambda : uniform_grid(0.0, lambda_bar, grid_points)) {
        const double full = fully_informative_value(config, lambda);
        const double hybrid = sender_value_of(hybrid_distribution(config, lambda));
        if (previous >= 0.0) {
            const double drop = previous - full;
            check.worst_monotone_drop = std::max(check.worst_monotone_drop, drop);
            if (drop > slack) check.monotone = false;
        }
        previous = full;
        const double gap = std::max({full - top, hybrid - full, hybrid - top});
        check.worst_dominance_gap = std::max(check.worst_dominance_gap, gap);
        if (gap > slack) check.dominates = false;
    }
    return check;
}

EquilibriumReport optimal_policy(const GameConfig& config) {
    const auto frontier = max_implementable_effort(config);
    if (frontier.no_positive_effort) {
        throw NoPositiveEffort("no positive effort is implementable for this configuration");
    }
    const double lambda_bar = frontier.lambda_bar;
    const CostFunction cost(config.k());
    const auto policy = TaggingPolicy::fully_informative();
    auto tau = policy_to_posteriors(policy, config, lambda_bar);
    const auto cert = fit_lagrangian(tau, config, lambda_bar, cost);
    const Residuals residuals{std::abs(tau.mean() - lambda_bar), std::abs(ic_residual(tau, lambda_bar, cost))};
    const double value = sender_value_of(tau);
    return EquilibriumReport{lambda_bar, policy, std::move(tau), value, cert, residuals,
                             check_dominance(config, lambda_bar)};
}

void to_json(nlohmann::json& j, const LagrangianCertificate& cert) {
    j = nlohmann::json{{"psi", cert.psi},
                       {"phi", cert.phi},
                       {"rho", cert.rho},
                       {"max_violation", cert.max_violation},
                       {"support_residual", cert.support_residual},
                       {"grid_size", cert.grid_size}};
}

void to_json(nlohmann::json& j, const DominanceCheck& check) {
    j = nlohmann::json{{"grid_points", check.grid_points},
                       {"monotone", check.monotone},
                       {"dominates", check.dominates},
                       {"worst_monotone_drop", check.worst_monotone_drop},
                       {"worst_dominance_gap", check.worst_dominance_gap}};
}

void to_json(nlohmann::json& j, const PosteriorDistribution& tau) {
    j = nlohmann::json::array();
    for (const auto& a : tau.atoms()) j.push_back({{"mu", a.mu}, {"weight", a.weight}});
}

void to_json(nlohmann::json& j, const TaggingPolicy& policy) {
    const auto& k = policy.kernel();
    j = nlohmann::json{{k[0][0], k[0][1]}, {k[1][0], k[1][1]}};
}

void to_json(nlohmann::json& j, const EquilibriumReport& report) {
    j = nlohmann::json{{"lambda_bar", report.lambda_bar},
                       {"policy", report.policy},
                       {"tau", report.tau},
                       {"sender_value", report.sender_value},
                       {"certificate", report.certificate},
                       {"residuals", {{"plausibility", report.residuals.plausibility}, {"ic", report.residuals.ic}}},
                       {"dominance", report.dominance}};
}

}  // namespace nudgesim
