#include "nudgesim/branching.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>

#include "nudgesim/errors.hpp"

namespace nudgesim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rng make_rng(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Rng(seq);
}

void put_double(std::ostream& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, res.ptr - buf);
}

}  // namespace

void CascadeConfig::validate() const {
    if (n0 < 0 || p0 < 0) throw ConfigError("initial receiver counts must be nonnegative");
    if (n0 + p0 < 1) throw ConfigError("cascade needs at least one initial receiver");
    if (!(std::isfinite(friend_mean) && friend_mean >= 0.0)) {
        throw ConfigError("mean friend count must be finite and nonnegative");
    }
    if (friend_model == FriendModel::Constant && friend_mean != std::round(friend_mean)) {
        throw ConfigError("a constant friend count must be an integer");
    }
    if (!(share_prob >= 0.0 && share_prob <= 1.0)) throw ConfigError("share probability must lie in [0, 1]");
    if (steps < 0) throw ConfigError("number of wake-up events must be nonnegative");
}

void CommentFactors::validate() const {
    if (!(alpha_nn >= 0.0 && alpha_nn <= 1.0 && alpha_pn >= 0.0 && alpha_pn <= 1.0)) {
        throw DomainError("comment factors must lie in [0, 1]");
    }
}

CommentFactors CommentFactors::from_belief(Belief belief) {
    const double alpha = 1.0 - belief.value();
    return {alpha, alpha};
}

double BranchingState::zbar() const {
    return i == 0 ? static_cast<double>(z()) : static_cast<double>(z()) / static_cast<double>(i);
}

double BranchingState::nbar() const {
    return i == 0 ? static_cast<double>(n) : static_cast<double>(n) / static_cast<double>(i);
}

double BranchingState::eta() const {
    if (z() == 0) throw Extinct("trend is undefined for an empty population");
    return static_cast<double>(n) / static_cast<double>(z());
}

std::int64_t sample_offspring(Rng& rng, const CascadeConfig& config) {
    std::int64_t friends = 0;
    switch (config.friend_model) {
        case FriendModel::Constant:
            friends = std::llround(config.friend_mean);
            break;
        case FriendModel::Poisson:
            if (config.friend_mean > 0.0) {
                friends = std::poisson_distribution<std::int64_t>(config.friend_mean)(rng);
            }
            break;
    }
    return std::binomial_distribution<std::int64_t>(friends, config.share_prob)(rng);
}

BranchingState apply_wakeup(const BranchingState& state, Tone waker, std::int64_t negative_offspring,
                            std::int64_t positive_offspring) {
    BranchingState next = state;
    if (waker == Tone::Negative) {
        if (state.n <= 0) throw DomainError("no negative-comment receiver can wake up");
        next.n -= 1;
    } else {
        if (state.p <= 0) throw DomainError("no positive-comment receiver can wake up");
        next.p -= 1;
    }
    next.n += negative_offspring;
    next.p += positive_offspring;
    next.i += 1;
    return next;
}

BranchingState step(const BranchingState& state, Rng& rng, const CommentFactors& factors,
                    const CascadeConfig& config) {
    const std::int64_t z = state.z();
    if (z <= 0) throw Extinct("no receiver left to wake up");

    const bool negative_waker = std::uniform_int_distribution<std::int64_t>(0, z - 1)(rng) < state.n;
    const Tone waker = negative_waker ? Tone::Negative : Tone::Positive;
    const double alpha = negative_waker ? factors.alpha_nn : factors.alpha_pn;
    const std::int64_t offspring = sample_offspring(rng, config);

    std::int64_t negative = 0;
    if (config.per_offspring_comments) {
        negative = std::binomial_distribution<std::int64_t>(offspring, alpha)(rng);
    } else if (std::bernoulli_distribution(alpha)(rng)) {
        negative = offspring;
    }
    return apply_wakeup(state, waker, negative, offspring - negative);
}

const TrajectoryPoint& Trajectory::terminal() const {
    if (points.empty()) throw DomainError("trajectory has no events");
    return points.back();
}

Trajectory simulate(const CascadeConfig& config, const CommentFactors& factors, std::uint64_t seed) {
    config.validate();
    factors.validate();

    Rng rng = make_rng(seed);
    BranchingState state{config.n0, config.p0, 0};
    double last_eta = state.eta();

    Trajectory run;
    run.points.reserve(static_cast<std::size_t>(config.steps));
    for (std::int64_t e = 0; e < config.steps; ++e) {
        state = step(state, rng, factors, config);
        if (state.z() > 0) last_eta = state.eta();
        run.points.push_back({state.i, state.n, state.p, last_eta, state.zbar(), state.nbar()});
        if (state.z() == 0) {
            run.extinct_at = state.i;
            break;
        }
    }
    return run;
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t replication) {
    return splitmix64(base_seed ^ splitmix64(replication + 1));
}

std::vector<Trajectory> simulate_replications(const CascadeConfig& config,
                                              const CommentFactors& factors,
                                              std::uint64_t base_seed, std::size_t replications,
                                              unsigned threads) {
    std::vector<Trajectory> runs(replications);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(replications, 1)));

    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t r = begin; r < replications; r += stride) {
            runs[r] = simulate(config, factors, replication_seed(base_seed, r));
        }
    };
    if (threads <= 1) {
        work(0, 1);
        return runs;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    pool.clear();
    return runs;
}

TerminalStats terminal_stats(std::span<const Trajectory> runs) {
    TerminalStats stats;
    stats.replications = runs.size();
    std::vector<double> etas;
    std::vector<double> zbars;
    for (const auto& run : runs) {
        if (run.extinct() || run.points.empty()) continue;
        etas.push_back(run.terminal().eta);
        zbars.push_back(run.terminal().zbar);
    }
    stats.survived = etas.size();
    auto moments = [](const std::vector<double>& xs, double& mean, double& sd) {
        if (xs.empty()) return;
        double sum = 0.0;
        for (double x : xs) sum += x;
        mean = sum / static_cast<double>(xs.size());
        if (xs.size() < 2) return;
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    };
    moments(etas, stats.mean_eta, stats.std_eta);
    moments(zbars, stats.mean_zbar, stats.std_zbar);
    return stats;
}

Flow ode_rhs(double z, double n, const CommentFactors& factors, double mean_offspring) {
    if (!(z > 0.0)) return {0.0, 0.0};
    const double m = mean_offspring;
    const double eta = n / z;
    const double dz = m - 1.0 - z;
    const double dn = eta * (factors.alpha_nn * m - 1.0) + (1.0 - eta) * factors.alpha_pn * m - n;
    return {dz, dn};
}

OdeState integrate_ode(double z0, double n0, const CommentFactors& factors, double mean_offspring,
                       double horizon, double step_size) {
    if (!(z0 > 0.0)) throw DomainError("initial population must be positive");
    if (!(step_size > 0.0)) throw DomainError("step size must be positive");
    if (!(horizon >= 0.0)) throw DomainError("horizon must be nonnegative");

    OdeState s{z0, n0};
    auto at = [&](const OdeState& x, const Flow& k, double h) {
        return OdeState{x.z + h * k.dz, x.n + h * k.dn};
    };
    auto field = [&](const OdeState& x) { return ode_rhs(x.z, x.n, factors, mean_offspring); };

    double t = 0.0;
    while (t < horizon) {
        const double h = std::min(step_size, horizon - t);
        const Flow k1 = field(s);
        const Flow k2 = field(at(s, k1, h / 2));
        const Flow k3 = field(at(s, k2, h / 2));
        const Flow k4 = field(at(s, k3, h));
        s.z += h / 6 * (k1.dz + 2 * k2.dz + 2 * k3.dz + k4.dz);
        s.n += h / 6 * (k1.dn + 2 * k2.dn + 2 * k3.dn + k4.dn);
        if (!std::isfinite(s.z) || !std::isfinite(s.n)) {
            std::ostringstream os;
            os << "ODE state became non-finite at t = " << t;
            throw NumericError(os.str());
        }
        t += h;
        // absorb accumulated round-off in the final step
        if (horizon - t < step_size * 1e-9) break;
    }
    return s;
}

double stationary_trend(const CommentFactors& factors) {
    const double denom = 1.0 - factors.alpha_nn + factors.alpha_pn;
    if (!(denom > 0.0)) throw Degenerate("stationary trend undefined when alpha_nn = 1 and alpha_pn = 0");
    return factors.alpha_pn / denom;
}

double trend_from_belief(Belief belief) { return 1.0 - belief.value(); }

void write_trajectory_csv_header(std::ostream& out, bool tagged) {
    if (tagged) out << "tag,";
    out << "replication_id,i,N,P,Z,eta,zbar,nbar\n";
}

void write_trajectory_csv(std::ostream& out, std::size_t replication_id, const Trajectory& run,
                          std::string_view tag) {
    for (const auto& pt : run.points) {
        if (!tag.empty()) out << tag << ',';
        out << replication_id << ',' << pt.i << ',' << pt.n << ',' << pt.p << ',' << pt.z() << ',';
        put_double(out, pt.eta);
        out << ',';
        put_double(out, pt.zbar);
        out << ',';
        put_double(out, pt.nbar);
        out << '\n';
    }
}

}  // namespace nudgesim
