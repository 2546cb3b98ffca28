#include "nudgesim/linear_program.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nudgesim/errors.hpp"

namespace nudgesim::lp {

const char* to_string(Status status) {
    switch (status) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::IterationLimit: return "iteration limit";
    }
    return "unknown";
}

namespace {

constexpr std::size_t kMaxPivots = 100000;
constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-12;

// Row-major tableau: `rows` constraint rows over `cols` columns plus a right-hand side.
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * (cols + 1), 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    double rhs(std::size_t r) const { return at(r, cols_); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double inv = 1.0 / at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) *= inv;
        at(pr, pc) = 1.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r == pr) continue;
            const double factor = at(r, pc);
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= factor * at(pr, c);
            at(r, pc) = 0.0;
        }
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

struct Simplex {
    Tableau tab;
    std::vector<std::size_t> basis;
    std::vector<double> reduced;  // reduced costs, cols entries
    double value = 0.0;           // current objective
    std::size_t pivots = 0;

    void price(const std::vector<double>& cost) {
        reduced = cost;
        value = 0.0;
        for (std::size_t r = 0; r < tab.rows(); ++r) {
            const double cb = cost[basis[r]];
            if (cb == 0.0) continue;
            for (std::size_t c = 0; c < tab.cols(); ++c) reduced[c] -= cb * tab.at(r, c);
            value += cb * tab.rhs(r);
        }
    }

    void pivot(std::size_t pr, std::size_t pc) {
        tab.pivot(pr, pc);
        const double rc = reduced[pc];
        if (rc != 0.0) {
            for (std::size_t c = 0; c < tab.cols(); ++c) reduced[c] -= rc * tab.at(pr, c);
            value += rc * tab.rhs(pr);
            reduced[pc] = 0.0;
        }
        basis[pr] = pc;
        ++pivots;
    }

    Status run(const std::vector<bool>& enterable, double tol) {
        while (true) {
            if (pivots >= kMaxPivots) return Status::IterationLimit;
            std::size_t enter = tab.cols();
            for (std::size_t c = 0; c < tab.cols(); ++c) {
                if (enterable[c] && reduced[c] < -tol) {
                    enter = c;
                    break;
                }
            }
            if (enter == tab.cols()) return Status::Optimal;

            // Harris two-pass ratio test: bound the step with rhs relaxed by
            // kFeasTol, then take the largest pivot among rows within the bound.
            double bound = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < tab.rows(); ++r) {
                const double a = tab.at(r, enter);
                if (a <= kPivotTol) continue;
                bound = std::min(bound, (std::max(tab.rhs(r), 0.0) + kFeasTol) / a);
            }
            if (!std::isfinite(bound)) return Status::Unbounded;
            std::size_t leave = tab.rows();
            for (std::size_t r = 0; r < tab.rows(); ++r) {
                const double a = tab.at(r, enter);
                if (a <= kPivotTol || std::max(tab.rhs(r), 0.0) / a > bound) continue;
                if (leave == tab.rows() || a > tab.at(leave, enter) ||
                    (a == tab.at(leave, enter) && basis[r] < basis[leave])) {
                    leave = r;
                }
            }
            // A slightly negative rhs left by the relaxed bound is round-off.
            if (tab.rhs(leave) < 0.0) tab.rhs(leave) = 0.0;
            pivot(leave, enter);
        }
    }
};

}  // namespace

Solution solve(const Problem& problem, double tol) {
    const std::size_t n = problem.cost.size();
    const std::size_t m_ub = problem.a_ub.size();
    const std::size_t m_eq = problem.a_eq.size();
    if (problem.b_ub.size() != m_ub || problem.b_eq.size() != m_eq) {
        throw DomainError("constraint matrix and right-hand side sizes disagree");
    }
    for (const auto& row : problem.a_ub) {
        if (row.size() != n) throw DomainError("inequality row has the wrong width");
    }
    for (const auto& row : problem.a_eq) {
        if (row.size() != n) throw DomainError("equality row has the wrong width");
    }

    // Artificials are needed for equality rows and for inequality rows whose
    // right-hand side is negative (the slack would start negative).
    std::size_t n_art = m_eq;
    for (double b : problem.b_ub) n_art += b < 0.0 ? 1 : 0;

    const std::size_t rows = m_ub + m_eq;
    const std::size_t slack0 = n;
    const std::size_t art0 = n + m_ub;
    const std::size_t cols = art0 + n_art;

    Simplex sx{Tableau(rows, cols), std::vector<std::size_t>(rows), {}, 0.0, 0};
    std::size_t art = art0;
    for (std::size_t r = 0; r < m_ub; ++r) {
        const double sign = problem.b_ub[r] < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < n; ++c) sx.tab.at(r, c) = sign * problem.a_ub[r][c];
        sx.tab.at(r, slack0 + r) = sign;
        sx.tab.rhs(r) = sign * problem.b_ub[r];
        if (sign < 0.0) {
            sx.tab.at(r, art) = 1.0;
            sx.basis[r] = art++;
        } else {
            sx.basis[r] = slack0 + r;
        }
    }
    for (std::size_t e = 0; e < m_eq; ++e) {
        const std::size_t r = m_ub + e;
        const double sign = problem.b_eq[e] < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < n; ++c) sx.tab.at(r, c) = sign * problem.a_eq[e][c];
        sx.tab.rhs(r) = sign * problem.b_eq[e];
        sx.tab.at(r, art) = 1.0;
        sx.basis[r] = art++;
    }

    Solution out;
    std::vector<bool> enterable(cols, true);

    if (n_art > 0) {
        std::vector<double> phase1(cols, 0.0);
        for (std::size_t c = art0; c < cols; ++c) phase1[c] = 1.0;
        sx.price(phase1);
        const Status s1 = sx.run(enterable, tol);
        out.pivots = sx.pivots;
        if (s1 == Status::IterationLimit) {
            out.status = s1;
            return out;
        }
        double scale = 1.0;
        for (std::size_t r = 0; r < rows; ++r) scale = std::max(scale, std::abs(sx.tab.rhs(r)));
        if (sx.value > tol * scale * static_cast<double>(rows)) {
            out.status = Status::Infeasible;
            return out;
        }
        // Drive remaining (zero-level) artificials out of the basis where possible.
        for (std::size_t r = 0; r < rows; ++r) {
            if (sx.basis[r] < art0) continue;
            std::size_t best = art0;
            for (std::size_t c = 0; c < art0; ++c) {
                const double a = std::abs(sx.tab.at(r, c));
                if (a > kPivotTol && (best == art0 || a > std::abs(sx.tab.at(r, best)))) best = c;
            }
            if (best < art0) {
                sx.tab.rhs(r) = 0.0;
                sx.pivot(r, best);
            }
        }
        for (std::size_t c = art0; c < cols; ++c) enterable[c] = false;
    }

    std::vector<double> phase2(cols, 0.0);
    for (std::size_t c = 0; c < n; ++c) phase2[c] = problem.cost[c];
    sx.price(phase2);
    out.status = sx.run(enterable, tol);
    out.pivots = sx.pivots;
    if (out.status != Status::Optimal) return out;

    out.x.assign(n, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        if (sx.basis[r] < n) out.x[sx.basis[r]] = sx.tab.rhs(r);
    }
    out.objective = 0.0;
    for (std::size_t c = 0; c < n; ++c) out.objective += problem.cost[c] * out.x[c];
    return out;
}

}  // namespace nudgesim::lp
