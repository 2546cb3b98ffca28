#pragma once

// Verifier for perfect Bayesian equilibria of the finite-state game written in
// matrix form. P states, Q signals, K actions.
//
//   Theta  P x P  diagonal prior
//   D      P x P  row-stochastic, D(i, j) = d(perceived j | true i)
//   Pi     P x Q  signaling, rows indexed by perceived state
//   A      Q x K  action policy
//   U      P x Q  beliefs, column n is the posterior after signal n
//   R, S   K x P  receiver and sender utilities

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "nudgesim/game_core.hpp"

namespace nudgesim {

using Matrix = Eigen::MatrixXd;

inline constexpr double kConsistencyTol = 1e-10;
inline constexpr double kGapTol = 1e-12;

/// Validated game matrices. Throws ConfigError on shape mismatch, a
/// non-diagonal or non-normalized prior, or rows of D not summing to one.
class FiniteGame {
public:
    FiniteGame(Matrix theta, Matrix dmat, Matrix rmat, Matrix smat);

    const Matrix& theta() const { return theta_; }
    const Matrix& dmat() const { return dmat_; }
    const Matrix& rmat() const { return rmat_; }
    const Matrix& smat() const { return smat_; }

    Eigen::Index states() const { return theta_.rows(); }
    Eigen::Index actions() const { return rmat_.rows(); }

private:
    Matrix theta_;
    Matrix dmat_;
    Matrix rmat_;
    Matrix smat_;
};

struct StrategyTriple {
    Matrix pimat;
    Matrix amat;
    Matrix umat;

    Eigen::Index signals() const { return pimat.cols(); }

    /// Shapes against the game, row sums of Pi and A, column sums of U, and
    /// nonnegativity. Throws ConfigError.
    void validate(const FiniteGame& game) const;
};

/// Joint probabilities Theta D Pi: entry (m, n) = Pr(state m, signal n).
Matrix joint_matrix(const FiniteGame& game, const Matrix& pimat);

/// Column-normalized joint matrix. Throws NullSignal naming every signal sent
/// with probability zero.
Matrix posterior_matrix(const FiniteGame& game, const Matrix& pimat);

struct PartialPosterior {
    /// Columns of never-sent signals are left at zero.
    Matrix umat;
    std::vector<Eigen::Index> unsent;
};

PartialPosterior partial_posterior_matrix(const FiniteGame& game, const Matrix& pimat);

struct CheckResult {
    bool passed = true;
    double worst_gap = 0.0;
};

/// Per-signal gap between the best deterministic action and diag(A R U).
CheckResult receiver_br_satisfied(const FiniteGame& game, const StrategyTriple& triple,
                                  double tol = kGapTol);

/// Gap between the best deterministic signaling Pi' and Tr(Theta D Pi A S),
/// holding A (and hence U) fixed.
CheckResult sender_opt_satisfied(const FiniteGame& game, const StrategyTriple& triple,
                                 double tol = kGapTol);

/// Deterministic A with a one at the argmax of (R U) per signal; ties go to the
/// lowest action index.
Matrix best_response_actions(const FiniteGame& game, const Matrix& umat);

struct PbeTolerances {
    double consistency = kConsistencyTol;
    double gap = kGapTol;
};

struct PbeReport {
    CheckResult consistency;
    CheckResult receiver;
    CheckResult sender;
    /// Signals with zero probability; their beliefs are not checked.
    std::vector<Eigen::Index> unsent;

    bool passed() const { return consistency.passed && receiver.passed && sender.passed; }
};

PbeReport is_pbe(const FiniteGame& game, const StrategyTriple& triple, PbeTolerances tol = {});

/// Binary game at effort lambda with K evenly spaced actions on [0, 1],
/// receiver loss -(a - omega)^2 and sender utility omega * a.
FiniteGame binary_game(const GameConfig& config, double lambda, int actions = 11);

/// Fully informative signaling with its consistent beliefs and best-response actions.
StrategyTriple binary_fully_informative_triple(const FiniteGame& game);

/// Game and triple from {"theta", "d", "pi", "a", "r", "s"} plus optional "u".
/// "theta" is the prior diagonal. Without "u", beliefs are computed from Pi and
/// unsent signals get the prior.
struct GameDocument {
    FiniteGame game;
    StrategyTriple triple;
};

GameDocument game_from_json(const nlohmann::json& doc);

nlohmann::json to_json_report(const PbeReport& report);

}  // namespace nudgesim
