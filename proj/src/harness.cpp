#include "nudgesim/harness.hpp"

#include <fstream>
#include <sstream>

#include "nudgesim/errors.hpp"

namespace nudgesim {

namespace {

constexpr double kPsiTol = 1e-12;
constexpr double kFineViolationTol = 1e-8;
constexpr std::size_t kFitGrid = 1000;
constexpr std::size_t kFineGrid = 10000;

struct Row {
    const char* name;
    double k;
    double eps0;
    double eps1;
    std::optional<double> chosen;
};

const std::vector<Row>& table1_rows() {
    static const std::vector<Row> rows{
        {"table1-case1", 0.6, 0.05, 0.05, std::nullopt},
        {"table1-case2", 0.6, 0.15, 0.20, std::nullopt},
        {"table1-case3", 1.0, 0.05, 0.05, std::nullopt},
        {"table1-case4", 1.0, 0.15, 0.20, std::nullopt},
    };
    return rows;
}

const std::vector<Row>& table2_rows() {
    static const std::vector<Row> rows{
        {"table2-case1.1", 0.6, 0.05, 0.05, 0.65}, {"table2-case1.2", 0.6, 0.05, 0.05, 0.40},
        {"table2-case2.1", 0.6, 0.15, 0.20, 0.33}, {"table2-case2.2", 0.6, 0.15, 0.20, 0.10},
        {"table2-case3.1", 1.0, 0.05, 0.05, 0.39}, {"table2-case3.2", 1.0, 0.05, 0.05, 0.20},
        {"table2-case4.1", 1.0, 0.15, 0.20, 0.13}, {"table2-case4.2", 1.0, 0.15, 0.20, 0.07},
    };
    return rows;
}

Scenario from_row(const Row& row) {
    return Scenario{row.name, GameConfig(row.eps0, row.eps1, row.k), row.chosen, {}, kDefaultReplications,
                    kDefaultSeed};
}

std::string joined(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
    return out;
}

double lambda_bar_of(const GameConfig& game) {
    const auto frontier = max_implementable_effort(game);
    if (frontier.no_positive_effort) throw NoPositiveEffort("no positive effort is implementable");
    return frontier.lambda_bar;
}

CascadeConfig cascade_from_json(const nlohmann::json& j) {
    CascadeConfig c;
    c.n0 = j.value("n0", c.n0);
    c.p0 = j.value("p0", c.p0);
    c.friend_mean = j.value("friend_mean", c.friend_mean);
    c.share_prob = j.value("share_prob", c.share_prob);
    c.steps = j.value("steps", c.steps);
    c.per_offspring_comments = j.value("per_offspring_comments", c.per_offspring_comments);
    const auto model = j.value("friend_model", std::string("constant"));
    if (model == "constant") {
        c.friend_model = FriendModel::Constant;
    } else if (model == "poisson") {
        c.friend_model = FriendModel::Poisson;
    } else {
        throw ConfigError("friend_model must be \"constant\" or \"poisson\", got \"" + model + "\"");
    }
    return c;
}

Scenario scenario_from_json(const nlohmann::json& j) {
    if (j.is_string()) return find_scenario(j.get<std::string>());
    if (!j.is_object()) throw ConfigError("scenario entries must be names or objects");
    for (const char* key : {"name", "k", "eps0", "eps1"}) {
        if (!j.contains(key)) throw ConfigError(std::string("scenario lacks \"") + key + "\"");
    }
    Scenario s{j.at("name").get<std::string>(),
               GameConfig(j.at("eps0").get<double>(), j.at("eps1").get<double>(), j.at("k").get<double>()),
               std::nullopt,
               {},
               kDefaultReplications,
               kDefaultSeed};
    if (j.contains("chosen_lambda") && !j.at("chosen_lambda").is_null()) s.chosen_lambda = j.at("chosen_lambda").get<double>();
    s.replications = j.value("replications", s.replications);
    s.seed = j.value("seed", s.seed);
    if (j.contains("cascade")) s.cascade = cascade_from_json(j.at("cascade"));
    return s;
}

const char* tag_label(std::size_t index, std::size_t count) {
    if (count == 3) {
        static const char* three[] = {"low", "interior", "high"};
        return three[index];
    }
    if (count == 2) return index == 0 ? "low" : "high";
    return "interior";
}

}  // namespace

void Scenario::validate() const {
    if (name.empty()) throw ConfigError("scenario needs a name");
    cascade.validate();
    if (replications < 1) throw ConfigError("scenario " + name + " needs at least one replication");
    if (chosen_lambda) {
        const double lambda = *chosen_lambda;
        const auto frontier = max_implementable_effort(game);
        if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("scenario " + name + ": chosen effort must lie in (0, 1)");
        if (frontier.no_positive_effort || lambda > frontier.lambda_bar) {
            std::ostringstream os;
            os << "scenario " << name << ": chosen effort " << lambda << " exceeds the largest implementable effort "
               << frontier.lambda_bar;
            throw ConfigError(os.str());
        }
    }
}

std::vector<std::string> builtin_suites() { return {"table1", "table2"}; }

std::vector<std::string> registered_scenarios() {
    std::vector<std::string> names;
    for (const auto* rows : {&table1_rows(), &table2_rows()}) {
        for (const auto& r : *rows) names.emplace_back(r.name);
    }
    return names;
}

std::vector<Scenario> builtin_suite(std::string_view name) {
    const std::vector<Row>* rows = nullptr;
    if (name == "table1") rows = &table1_rows();
    if (name == "table2") rows = &table2_rows();
    if (rows == nullptr) {
        throw ConfigError("unknown suite \"" + std::string(name) + "\"; registered suites: " + joined(builtin_suites()));
    }
    std::vector<Scenario> out;
    for (const auto& r : *rows) out.push_back(from_row(r));
    return out;
}

Scenario find_scenario(std::string_view name) {
    for (const auto* rows : {&table1_rows(), &table2_rows()}) {
        for (const auto& r : *rows) {
            if (name == r.name) return from_row(r);
        }
    }
    throw ConfigError("unknown scenario \"" + std::string(name) + "\"; registered scenarios: " +
                      joined(registered_scenarios()));
}

std::vector<Scenario> suite_from_json(const nlohmann::json& doc, bool validate_effort) {
    if (!doc.is_object() || !doc.contains("scenarios") || !doc.at("scenarios").is_array()) {
        throw ConfigError("suite config must be an object with a \"scenarios\" array");
    }
    std::vector<Scenario> out;
    try {
        for (const auto& entry : doc.at("scenarios")) {
            auto s = scenario_from_json(entry);
            if (validate_effort) {
                s.validate();
            } else {
                s.cascade.validate();
            }
            out.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed suite config: ") + e.what());
    }
    return out;
}

std::vector<Scenario> load_suite(const std::filesystem::path& path, bool validate_effort) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read suite config " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("suite config " + path.string() + " is not valid JSON: " + e.what());
    }
    return suite_from_json(doc, validate_effort);
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
    scenario.validate();
    const double lambda_bar = lambda_bar_of(scenario.game);
    const bool hybrid = scenario.chosen_lambda.has_value();
    const double effort = hybrid ? *scenario.chosen_lambda : lambda_bar;
    const auto tau = hybrid ? hybrid_distribution(scenario.game, effort)
                            : fully_informative_distribution(scenario.game, effort);
    const CostFunction cost(scenario.game.k());

    RunResult result{scenario.name, lambda_bar, effort, hybrid, {}, 0.0, 0.0, sender_value_of(tau),
                     fit_lagrangian(tau, scenario.game, effort, cost, kFitGrid),
                     options.replications.value_or(scenario.replications), options.seed.value_or(scenario.seed),
                     std::nullopt, std::nullopt};

    std::ofstream csv;
    if (options.write_files) {
        const auto dir = options.out_dir / scenario.name;
        std::filesystem::create_directories(dir);
        result.trajectories_csv = dir / "trajectories.csv";
        result.summary_json = dir / "summary.json";
        csv.open(*result.trajectories_csv, std::ios::binary);
        if (!csv) throw ConfigError("cannot write " + result.trajectories_csv->string());
        write_trajectory_csv_header(csv, true);
    }

    const auto atoms = tau.atoms();
    for (std::size_t t = 0; t < atoms.size(); ++t) {
        const Belief belief(atoms[t].mu);
        const auto factors = CommentFactors::from_belief(belief);
        const auto tag_seed = replication_seed(result.seed, 1000003 + t);
        const auto runs = simulate_replications(scenario.cascade, factors, tag_seed, result.replications, options.threads);
        const std::string label = tag_label(t, atoms.size());
        result.tags.push_back({label, atoms[t].mu, atoms[t].weight, factors, trend_from_belief(belief),
                               terminal_stats(runs)});
        result.mixture_analytic_eta += atoms[t].weight * result.tags.back().analytic_eta;
        result.mixture_simulated_eta += atoms[t].weight * result.tags.back().stats.mean_eta;
        if (csv.is_open()) {
            for (std::size_t r = 0; r < runs.size(); ++r) write_trajectory_csv(csv, r, runs[r], label);
        }
    }

    if (options.write_files) {
        std::ofstream out(*result.summary_json, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + result.summary_json->string());
        out << to_json(result).dump(2) << '\n';
    }
    return result;
}

std::vector<RunResult> run_suite(const std::vector<Scenario>& scenarios, const RunOptions& options) {
    std::vector<RunResult> results;
    results.reserve(scenarios.size());
    for (const auto& s : scenarios) results.push_back(run_scenario(s, options));
    if (options.write_files && !scenarios.empty()) {
        std::filesystem::create_directories(options.out_dir);
        std::ofstream out(options.out_dir / "suite_summary.json", std::ios::binary);
        out << summary_table(scenarios, results).dump(2) << '\n';
    }
    return results;
}

std::vector<RunResult> run_suite(const std::filesystem::path& config_path, const RunOptions& options) {
    return run_suite(load_suite(config_path), options);
}

nlohmann::json to_json(const RunResult& result) {
    nlohmann::json tags = nlohmann::json::array();
    for (const auto& t : result.tags) {
        tags.push_back({{"tag", t.tag},
                        {"belief", t.belief},
                        {"weight", t.weight},
                        {"alpha_nn", t.factors.alpha_nn},
                        {"alpha_pn", t.factors.alpha_pn},
                        {"analytic_eta", t.analytic_eta},
                        {"simulated_eta_mean", t.stats.mean_eta},
                        {"simulated_eta_std", t.stats.std_eta},
                        {"terminal_zbar_mean", t.stats.mean_zbar},
                        {"terminal_zbar_std", t.stats.std_zbar},
                        {"survived", t.stats.survived}});
    }
    nlohmann::json j{{"scenario", result.scenario},
                     {"lambda_bar", result.lambda_bar},
                     {"effort", result.effort},
                     {"policy", result.hybrid ? "hybrid" : "fully_informative"},
                     {"tags", tags},
                     {"mixture", {{"analytic_eta", result.mixture_analytic_eta},
                                  {"simulated_eta", result.mixture_simulated_eta}}},
                     {"sender_value", result.sender_value},
                     {"certificate", result.certificate},
                     {"replications", result.replications},
                     {"seed", result.seed}};
    if (result.trajectories_csv) j["trajectories_csv"] = result.trajectories_csv->generic_string();
    return j;
}

nlohmann::json summary_table(const std::vector<Scenario>& scenarios, const std::vector<RunResult>& results) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < scenarios.size() && i < results.size(); ++i) {
        const auto& s = scenarios[i];
        rows.push_back({{"name", s.name},
                        {"k", s.game.k()},
                        {"eps0", s.game.eps0()},
                        {"eps1", s.game.eps1()},
                        {"lambda_bar", results[i].lambda_bar},
                        {"chosen_lambda", s.chosen_lambda ? nlohmann::json(*s.chosen_lambda) : nlohmann::json()}});
    }
    return rows;
}

std::vector<CertificateCheck> verify_certificates(const std::vector<Scenario>& scenarios) {
    std::vector<CertificateCheck> out;
    for (const auto& s : scenarios) {
        CertificateCheck check;
        check.scenario = s.name;
        try {
            check.lambda_bar = lambda_bar_of(s.game);
            const CostFunction cost(s.game.k());
            auto certify = [&](const PosteriorDistribution& tau, double lambda) {
                const auto cert = fit_lagrangian(tau, s.game, lambda, cost, kFitGrid);
                const double fine = certificate_violation(cert, s.game, lambda, cost, kFineGrid);
                check.fine_violation = std::max(check.fine_violation, fine);
                if (cert.psi > kPsiTol) throw NotOptimal("certificate multiplier psi is positive");
                if (fine > kFineViolationTol) throw NotOptimal("certificate fails on the fine grid");
                return cert;
            };
            check.certificate = certify(fully_informative_distribution(s.game, check.lambda_bar), check.lambda_bar);
            if (s.chosen_lambda) {
                const double lambda = *s.chosen_lambda;
                certify(hybrid_distribution(s.game, lambda), lambda);
            }
            check.passed = true;
        } catch (const std::exception& e) {
            check.passed = false;
            check.error = e.what();
        }
        out.push_back(std::move(check));
    }
    return out;
}

nlohmann::json to_json(const CertificateCheck& check) {
    nlohmann::json j{{"scenario", check.scenario},
                     {"passed", check.passed},
                     {"lambda_bar", check.lambda_bar},
                     {"fine_violation", check.fine_violation}};
    j["certificate"] = check.certificate ? nlohmann::json(*check.certificate) : nlohmann::json();
    if (!check.error.empty()) j["error"] = check.error;
    return j;
}

}  // namespace nudgesim
