#include "nudgesim/finite_pbe.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "nudgesim/errors.hpp"

namespace nudgesim {

namespace {

constexpr double kShapeTol = 1e-12;

std::string shape(const Matrix& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << name << " must be " << rows << "x" << cols << ", got " << shape(m);
        throw ConfigError(os.str());
    }
}

void require_finite(const Matrix& m, const char* name) {
    if (!m.allFinite()) throw ConfigError(std::string(name) + " has non-finite entries");
}

void require_stochastic_rows(const Matrix& m, const char* name) {
    if ((m.array() < -kShapeTol).any()) throw ConfigError(std::string(name) + " has negative entries");
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if (std::abs(m.row(r).sum() - 1.0) > kShapeTol) {
            std::ostringstream os;
            os << name << " row " << r << " sums to " << m.row(r).sum();
            throw ConfigError(os.str());
        }
    }
}

Matrix matrix_from_json(const nlohmann::json& j, const char* name) {
    if (!j.is_array() || j.empty()) throw ConfigError(std::string(name) + " must be a nonempty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ConfigError(std::string(name) + " rows must all have the same length");
        }
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

}  // namespace

FiniteGame::FiniteGame(Matrix theta, Matrix dmat, Matrix rmat, Matrix smat)
    : theta_(std::move(theta)), dmat_(std::move(dmat)), rmat_(std::move(rmat)), smat_(std::move(smat)) {
    const Eigen::Index p = theta_.rows();
    if (p < 1) throw ConfigError("game needs at least one state");
    require_shape(theta_, p, p, "theta");
    require_shape(dmat_, p, p, "d");
    if (rmat_.rows() < 1) throw ConfigError("game needs at least one action");
    require_shape(rmat_, rmat_.rows(), p, "r");
    require_shape(smat_, rmat_.rows(), p, "s");
    for (const auto* m : {&theta_, &dmat_, &rmat_, &smat_}) require_finite(*m, "game matrix");

    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            if (i != j && theta_(i, j) != 0.0) throw ConfigError("theta must be diagonal");
        }
        if (theta_(i, i) < 0.0) throw ConfigError("theta must be nonnegative");
    }
    if (std::abs(theta_.trace() - 1.0) > kShapeTol) throw ConfigError("theta must have unit trace");
    require_stochastic_rows(dmat_, "d");
}

void StrategyTriple::validate(const FiniteGame& game) const {
    const Eigen::Index p = game.states();
    const Eigen::Index q = pimat.cols();
    if (q < 1) throw ConfigError("strategy needs at least one signal");
    require_shape(pimat, p, q, "pi");
    require_shape(amat, q, game.actions(), "a");
    require_shape(umat, p, q, "u");
    require_finite(pimat, "pi");
    require_finite(amat, "a");
    require_finite(umat, "u");
    require_stochastic_rows(pimat, "pi");
    require_stochastic_rows(amat, "a");
    if ((umat.array() < -kShapeTol).any()) throw ConfigError("u has negative entries");
    for (Eigen::Index n = 0; n < q; ++n) {
        if (std::abs(umat.col(n).sum() - 1.0) > kShapeTol) {
            std::ostringstream os;
            os << "u column " << n << " sums to " << umat.col(n).sum();
            throw ConfigError(os.str());
        }
    }
}

Matrix joint_matrix(const FiniteGame& game, const Matrix& pimat) {
    if (pimat.rows() != game.states()) throw DomainError("pi must have one row per state");
    return game.theta() * game.dmat() * pimat;
}

PartialPosterior partial_posterior_matrix(const FiniteGame& game, const Matrix& pimat) {
    const Matrix joint = joint_matrix(game, pimat);
    PartialPosterior out{Matrix::Zero(joint.rows(), joint.cols()), {}};
    for (Eigen::Index n = 0; n < joint.cols(); ++n) {
        const double mass = joint.col(n).sum();
        if (mass > 0.0) {
            out.umat.col(n) = joint.col(n) / mass;
        } else {
            out.unsent.push_back(n);
        }
    }
    return out;
}

Matrix posterior_matrix(const FiniteGame& game, const Matrix& pimat) {
    auto partial = partial_posterior_matrix(game, pimat);
    if (!partial.unsent.empty()) {
        std::ostringstream os;
        os << "signals never sent:";
        for (auto n : partial.unsent) os << ' ' << n;
        throw NullSignal(os.str());
    }
    return std::move(partial.umat);
}

CheckResult receiver_br_satisfied(const FiniteGame& game, const StrategyTriple& triple, double tol) {
    const Matrix ru = game.rmat() * triple.umat;  // K x Q
    CheckResult out;
    for (Eigen::Index n = 0; n < ru.cols(); ++n) {
        const double best = ru.col(n).maxCoeff();
        const double played = triple.amat.row(n).dot(ru.col(n));
        out.worst_gap = std::max(out.worst_gap, best - played);
    }
    out.passed = out.worst_gap <= tol;
    return out;
}

CheckResult sender_opt_satisfied(const FiniteGame& game, const StrategyTriple& triple, double tol) {
    // Tr(Theta D Pi' A S) = <C, Pi'> with C = (A S Theta D)^T, linear in each row of Pi'.
    const Matrix coeff = (triple.amat * game.smat() * game.theta() * game.dmat()).transpose();  // P x Q
    double best = 0.0;
    for (Eigen::Index j = 0; j < coeff.rows(); ++j) best += coeff.row(j).maxCoeff();
    const double current = (coeff.array() * triple.pimat.array()).sum();
    CheckResult out;
    out.worst_gap = std::max(0.0, best - current);
    out.passed = out.worst_gap <= tol;
    return out;
}

Matrix best_response_actions(const FiniteGame& game, const Matrix& umat) {
    const Matrix ru = game.rmat() * umat;
    Matrix a = Matrix::Zero(umat.cols(), game.actions());
    for (Eigen::Index n = 0; n < ru.cols(); ++n) {
        Eigen::Index arg = 0;
        for (Eigen::Index k = 1; k < ru.rows(); ++k) {
            if (ru(k, n) > ru(arg, n)) arg = k;
        }
        a(n, arg) = 1.0;
    }
    return a;
}

PbeReport is_pbe(const FiniteGame& game, const StrategyTriple& triple, PbeTolerances tol) {
    PbeReport report;
    const auto expected = partial_posterior_matrix(game, triple.pimat);
    report.unsent = expected.unsent;
    for (Eigen::Index n = 0; n < expected.umat.cols(); ++n) {
        if (std::find(report.unsent.begin(), report.unsent.end(), n) != report.unsent.end()) continue;
        const double diff = (triple.umat.col(n) - expected.umat.col(n)).cwiseAbs().maxCoeff();
        report.consistency.worst_gap = std::max(report.consistency.worst_gap, diff);
    }
    report.consistency.passed = report.consistency.worst_gap <= tol.consistency;
    report.receiver = receiver_br_satisfied(game, triple, tol.gap);
    report.sender = sender_opt_satisfied(game, triple, tol.gap);
    return report;
}

FiniteGame binary_game(const GameConfig& config, double lambda, int actions) {
    if (actions < 1) throw DomainError("binary game needs at least one action");
    const Prior prior(lambda);
    const auto d = MisperceptionMatrix::of(config);

    Matrix theta = Matrix::Zero(2, 2);
    theta(0, 0) = prior[0];
    theta(1, 1) = prior[1];
    Matrix dmat(2, 2);
    for (int truth = 0; truth < 2; ++truth) {
        for (int perceived = 0; perceived < 2; ++perceived) dmat(truth, perceived) = d(perceived, truth);
    }
    Matrix r(actions, 2);
    Matrix s(actions, 2);
    for (int k = 0; k < actions; ++k) {
        const double a = actions == 1 ? 0.0 : static_cast<double>(k) / (actions - 1);
        for (int omega = 0; omega < 2; ++omega) {
            r(k, omega) = receiver_utility(omega, a);
            s(k, omega) = omega * a;
        }
    }
    return FiniteGame(std::move(theta), std::move(dmat), std::move(r), std::move(s));
}

StrategyTriple binary_fully_informative_triple(const FiniteGame& game) {
    StrategyTriple triple;
    triple.pimat = Matrix::Identity(game.states(), game.states());
    triple.umat = posterior_matrix(game, triple.pimat);
    triple.amat = best_response_actions(game, triple.umat);
    return triple;
}

GameDocument game_from_json(const nlohmann::json& doc) {
    for (const char* key : {"theta", "d", "pi", "a", "r", "s"}) {
        if (!doc.contains(key)) throw ConfigError(std::string("game document lacks \"") + key + "\"");
    }
    try {
        const auto& theta_j = doc.at("theta");
        if (!theta_j.is_array() || theta_j.empty()) throw ConfigError("theta must be a nonempty array");
        Matrix theta = Matrix::Zero(static_cast<Eigen::Index>(theta_j.size()), static_cast<Eigen::Index>(theta_j.size()));
        for (std::size_t i = 0; i < theta_j.size(); ++i) {
            theta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = theta_j[i].get<double>();
        }
        FiniteGame game(std::move(theta), matrix_from_json(doc.at("d"), "d"), matrix_from_json(doc.at("r"), "r"),
                        matrix_from_json(doc.at("s"), "s"));
        StrategyTriple triple;
        triple.pimat = matrix_from_json(doc.at("pi"), "pi");
        triple.amat = matrix_from_json(doc.at("a"), "a");
        if (doc.contains("u")) {
            triple.umat = matrix_from_json(doc.at("u"), "u");
        } else {
            if (triple.pimat.rows() != game.states()) throw ConfigError("pi must have one row per state");
            auto partial = partial_posterior_matrix(game, triple.pimat);
            for (auto n : partial.unsent) partial.umat.col(n) = game.theta().diagonal();
            triple.umat = std::move(partial.umat);
        }
        triple.validate(game);
        return GameDocument{std::move(game), std::move(triple)};
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed game document: ") + e.what());
    }
}

nlohmann::json to_json_report(const PbeReport& report) {
    auto check = [](const CheckResult& c) { return nlohmann::json{{"passed", c.passed}, {"worst_gap", c.worst_gap}}; };
    nlohmann::json unsent = nlohmann::json::array();
    for (auto n : report.unsent) unsent.push_back(n);
    return nlohmann::json{{"consistency", check(report.consistency)},
                          {"receiver", check(report.receiver)},
                          {"sender", check(report.sender)},
                          {"unsent_signals", unsent},
                          {"pbe", report.passed()}};
}

}  // namespace nudgesim
