#pragma once

// Two-type comment cascade. Every active receiver holds the post together
// with the tone of the comment attached to it (negative: n-type, positive:
// p-type). When a receiver wakes up it leaves its own comment and shares the
// post with Bin(M, q) friends, who all inherit that comment's tone.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "nudgesim/game_core.hpp"

namespace nudgesim {

using Rng = std::mt19937_64;

enum class FriendModel { Constant, Poisson };

enum class Tone { Negative, Positive };

struct CascadeConfig {
    std::int64_t n0 = 50;
    std::int64_t p0 = 50;
    /// E[M], the mean number of friends.
    double friend_mean = 50.0;
    /// Probability of sharing with each friend.
    double share_prob = 0.5;
    /// Number of wake-up events after initialization.
    std::int64_t steps = 500;
    FriendModel friend_model = FriendModel::Constant;
    /// Sample a comment tone per offspring instead of once per wake-up.
    bool per_offspring_comments = false;

    /// Throws ConfigError. A subcritical mean offspring is allowed; see supercritical().
    void validate() const;
    double mean_offspring() const { return friend_mean * share_prob; }
    bool supercritical() const { return mean_offspring() > 1.0; }
};

/// Probabilities that a receiver comments negatively after seeing a negative
/// (alpha_nn) or a positive (alpha_pn) comment.
struct CommentFactors {
    double alpha_nn = 0.0;
    double alpha_pn = 0.0;

    void validate() const;
    /// Belief-driven commenting: both factors equal 1 - mu.
    static CommentFactors from_belief(Belief belief);
};

struct BranchingState {
    std::int64_t n = 0;
    std::int64_t p = 0;
    /// Number of wake-up events so far.
    std::int64_t i = 0;

    std::int64_t z() const { return n + p; }
    /// Z_i / i, with Z_0 at i = 0.
    double zbar() const;
    double nbar() const;
    /// Share of negative-comment receivers. Throws Extinct when z == 0.
    double eta() const;
};

std::int64_t sample_offspring(Rng& rng, const CascadeConfig& config);

/// Deterministic count update for one wake-up: the waker leaves its pool and
/// the offspring join the pools of the tones they received.
BranchingState apply_wakeup(const BranchingState& state, Tone waker,
                            std::int64_t negative_offspring, std::int64_t positive_offspring);

/// One random wake-up event. Throws Extinct when the population is empty.
BranchingState step(const BranchingState& state, Rng& rng, const CommentFactors& factors,
                    const CascadeConfig& config);

struct TrajectoryPoint {
    std::int64_t i;
    std::int64_t n;
    std::int64_t p;
    double eta;
    double zbar;
    double nbar;

    std::int64_t z() const { return n + p; }
};

struct Trajectory {
    /// One point per executed wake-up event.
    std::vector<TrajectoryPoint> points;
    /// Event index at which the population hit zero, if it did.
    std::optional<std::int64_t> extinct_at;

    bool extinct() const { return extinct_at.has_value(); }
    const TrajectoryPoint& terminal() const;
};

/// Runs config.steps events or until extinction. After extinction eta stays
/// frozen at its last defined value.
Trajectory simulate(const CascadeConfig& config, const CommentFactors& factors, std::uint64_t seed);

/// Distinct, well-mixed seed for replication `replication` of a run.
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t replication);

/// Independent replications; result r uses replication_seed(base_seed, r), so
/// the output does not depend on `threads` (0 picks hardware concurrency).
std::vector<Trajectory> simulate_replications(const CascadeConfig& config,
                                              const CommentFactors& factors,
                                              std::uint64_t base_seed, std::size_t replications,
                                              unsigned threads = 0);

struct TerminalStats {
    std::size_t replications = 0;
    /// Replications that never went extinct; only these enter the moments.
    std::size_t survived = 0;
    double mean_eta = 0.0;
    double std_eta = 0.0;
    double mean_zbar = 0.0;
    double std_zbar = 0.0;
};

TerminalStats terminal_stats(std::span<const Trajectory> runs);

struct Flow {
    double dz;
    double dn;
};

/// Mean-field vector field of the normalized iterates (zbar, nbar); zero when z <= 0.
Flow ode_rhs(double z, double n, const CommentFactors& factors, double mean_offspring);

struct OdeState {
    double z;
    double n;
};

/// Fixed-step classical Runge-Kutta integration of ode_rhs.
OdeState integrate_ode(double z0, double n0, const CommentFactors& factors, double mean_offspring,
                       double horizon = 50.0, double step_size = 0.01);

/// Fixed point of the trend: alpha_pn / (1 - alpha_nn + alpha_pn).
double stationary_trend(const CommentFactors& factors);

/// Stationary trend under belief-driven commenting, 1 - mu.
double trend_from_belief(Belief belief);

/// Columns: replication_id,i,N,P,Z,eta,zbar,nbar, preceded by a `tag` column
/// when `tagged` is set.
void write_trajectory_csv_header(std::ostream& out, bool tagged = false);
void write_trajectory_csv(std::ostream& out, std::size_t replication_id, const Trajectory& run,
                          std::string_view tag = {});

}  // namespace nudgesim
