// nudgesim command-line entry point.
//
//   nudgesim run --suite table1|table2 | --config <path> [--seed N] [--reps N] [--out DIR]
//   nudgesim verify --suite table1 | --config <path>
//   nudgesim pbe-check --game <json>
//
// Exit status: 0 success, 1 verification failure, 2 configuration error.
// NUDGESIM_SEED overrides the base seed.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nudgesim/errors.hpp"
#include "nudgesim/finite_pbe.hpp"
#include "nudgesim/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("NUDGESIM_SEED");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(raw, &used);
        if (used != std::string(raw).size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw nudgesim::ConfigError(std::string("NUDGESIM_SEED is not an unsigned integer: ") + raw);
    }
}

std::vector<nudgesim::Scenario> scenarios_for(const std::string& suite, const std::string& config,
                                              bool validate_effort = true) {
    if (!suite.empty() && !config.empty()) throw nudgesim::ConfigError("give either --suite or --config, not both");
    if (!suite.empty()) return nudgesim::builtin_suite(suite);
    if (!config.empty()) return nudgesim::load_suite(config, validate_effort);
    throw nudgesim::ConfigError("one of --suite or --config is required");
}

int cmd_run(const std::string& suite, const std::string& config, std::optional<std::uint64_t> seed,
            std::optional<std::size_t> reps, const std::string& out_dir) {
    nudgesim::RunOptions options;
    options.seed = seed;
    if (auto s = env_seed()) options.seed = s;
    options.replications = reps;
    options.out_dir = out_dir;

    const auto scenarios = scenarios_for(suite, config);
    const auto results = nudgesim::run_suite(scenarios, options);
    for (const auto& r : results) {
        std::cout << r.scenario << "  lambda_bar=" << r.lambda_bar << "  effort=" << r.effort;
        for (const auto& t : r.tags) {
            std::cout << "  eta[" << t.tag << "]=" << t.stats.mean_eta << " (analytic " << t.analytic_eta << ")";
        }
        std::cout << '\n';
    }
    std::cout << "wrote " << results.size() << " scenario(s) under " << options.out_dir.string() << '\n';
    return kExitOk;
}

int cmd_verify(const std::string& suite, const std::string& config) {
    const auto checks = nudgesim::verify_certificates(scenarios_for(suite, config, false));
    bool ok = true;
    nlohmann::json report = nlohmann::json::array();
    for (const auto& c : checks) {
        ok = ok && c.passed;
        report.push_back(nudgesim::to_json(c));
    }
    std::cout << report.dump(2) << '\n';
    return ok ? kExitOk : kExitFailure;
}

int cmd_pbe_check(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw nudgesim::ConfigError("cannot read game document " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw nudgesim::ConfigError("game document is not valid JSON: " + std::string(e.what()));
    }
    const auto parsed = nudgesim::game_from_json(doc);
    const auto report = nudgesim::is_pbe(parsed.game, parsed.triple);
    std::cout << nudgesim::to_json_report(report).dump(2) << '\n';
    return report.passed() ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Misinformation tagging under detection error: equilibria and comment cascades"};
    app.require_subcommand(1);

    std::string suite;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::string out_dir = "out";
    auto* run = app.add_subcommand("run", "simulate scenarios and write trajectories and summaries");
    run->add_option("--suite", suite, "built-in suite: table1 or table2");
    run->add_option("--config", config, "JSON suite config with a \"scenarios\" array");
    run->add_option("--seed", seed, "base seed");
    run->add_option("--reps", reps, "replications per tag")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "output directory")->capture_default_str();

    std::string verify_suite;
    std::string verify_config;
    auto* verify = app.add_subcommand("verify", "fit and re-verify optimality certificates");
    verify->add_option("--suite", verify_suite, "built-in suite: table1 or table2");
    verify->add_option("--config", verify_config, "JSON suite config");

    std::string game_path;
    auto* pbe = app.add_subcommand("pbe-check", "check a finite-state strategy triple for equilibrium");
    pbe->add_option("--game", game_path, "JSON game document")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return cmd_run(suite, config, seed, reps, out_dir);
        if (*verify) return cmd_verify(verify_suite, verify_config);
        if (*pbe) return cmd_pbe_check(game_path);
    } catch (const nudgesim::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}
