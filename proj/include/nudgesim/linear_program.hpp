#pragma once

// Small dense linear programs:
//
//   minimize    c^T x
//   subject to  A_ub x <= b_ub
//               A_eq x  = b_eq
//               x >= 0
//
// Two-phase tableau simplex: first improving column enters, Harris ratio
// test. Meant for a handful of structural variables and up to a few
// thousand constraint rows.

#include <cstddef>
#include <vector>

namespace nudgesim::lp {

struct Problem {
    std::vector<double> cost;
    std::vector<std::vector<double>> a_ub;
    std::vector<double> b_ub;
    std::vector<std::vector<double>> a_eq;
    std::vector<double> b_eq;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(Status status);

struct Solution {
    Status status = Status::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::size_t pivots = 0;
};

Solution solve(const Problem& problem, double tol = 1e-11);

}  // namespace nudgesim::lp
