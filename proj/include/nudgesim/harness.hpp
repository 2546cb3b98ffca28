#pragma once

// Reproducible experiments: built-in case studies, JSON suites, Monte Carlo
// trend simulation per tag, and certificate verification.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nudgesim/branching.hpp"
#include "nudgesim/equilibrium.hpp"
#include "nudgesim/game_core.hpp"

namespace nudgesim {

inline constexpr std::uint64_t kDefaultSeed = 20240917;
inline constexpr std::size_t kDefaultReplications = 200;

struct Scenario {
    std::string name;
    GameConfig game;
    /// Effort implemented with hybrid tagging. Absent means fully informative
    /// tagging at the largest implementable effort.
    std::optional<double> chosen_lambda;
    CascadeConfig cascade{};
    std::size_t replications = kDefaultReplications;
    std::uint64_t seed = kDefaultSeed;

    /// Cascade validity and, when set, chosen_lambda in (0, lambda_bar].
    /// Throws ConfigError.
    void validate() const;
};

/// Names of the built-in suites ("table1", "table2").
std::vector<std::string> builtin_suites();
/// Names of every built-in scenario, e.g. "table1-case3", "table2-case2.2".
std::vector<std::string> registered_scenarios();

/// Throws ConfigError listing the registered suites.
std::vector<Scenario> builtin_suite(std::string_view name);
/// Throws ConfigError listing the registered scenarios.
Scenario find_scenario(std::string_view name);

/// Parses {"scenarios": [...]}. Each entry is either a registered scenario
/// name or an object with "name", "k", "eps0", "eps1" and optional
/// "chosen_lambda", "replications", "seed" and "cascade" ({"n0", "p0",
/// "friend_mean", "share_prob", "steps", "friend_model", "per_offspring_comments"}).
/// With `validate_effort` unset, chosen_lambda is not checked against lambda_bar.
std::vector<Scenario> suite_from_json(const nlohmann::json& doc, bool validate_effort = true);
std::vector<Scenario> load_suite(const std::filesystem::path& path, bool validate_effort = true);

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replications;
    std::filesystem::path out_dir = "out";
    bool write_files = true;
    unsigned threads = 0;
};

/// Simulated and analytic trend for one tag of the policy.
struct TagTrend {
    std::string tag;
    double belief;
    /// Probability the tag is sent.
    double weight;
    CommentFactors factors;
    /// 1 - belief
    double analytic_eta;
    TerminalStats stats;
};

struct RunResult {
    std::string scenario;
    double lambda_bar;
    /// Effort the policy implements: lambda_bar or the chosen effort.
    double effort;
    bool hybrid;
    std::vector<TagTrend> tags;
    /// Weighted across tags by their send probability.
    double mixture_analytic_eta;
    double mixture_simulated_eta;
    double sender_value;
    LagrangianCertificate certificate;
    std::size_t replications;
    std::uint64_t seed;
    std::optional<std::filesystem::path> trajectories_csv;
    std::optional<std::filesystem::path> summary_json;
};

RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});
std::vector<RunResult> run_suite(const std::vector<Scenario>& scenarios, const RunOptions& options = {});
std::vector<RunResult> run_suite(const std::filesystem::path& config_path, const RunOptions& options = {});

nlohmann::json to_json(const RunResult& result);
/// One row per result: name, k, eps0, eps1, lambda_bar, chosen_lambda.
nlohmann::json summary_table(const std::vector<Scenario>& scenarios, const std::vector<RunResult>& results);

struct CertificateCheck {
    std::string scenario;
    bool passed = false;
    double lambda_bar = 0.0;
    std::optional<LagrangianCertificate> certificate;
    /// Largest excess on the 10x finer re-verification grid.
    double fine_violation = 0.0;
    std::string error;
};

/// Fits the certificate at lambda_bar (and at chosen_lambda for hybrid
/// scenarios), re-verifies on a finer grid and checks psi <= 0. Failures are
/// reported, not thrown.
std::vector<CertificateCheck> verify_certificates(const std::vector<Scenario>& scenarios);

nlohmann::json to_json(const CertificateCheck& check);

}  // namespace nudgesim
