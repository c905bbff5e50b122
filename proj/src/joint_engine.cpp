#include "winprob/joint_engine.hpp"

#include "winprob/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

namespace winprob {

namespace {

// Slack for the x + y <= 1 test. Laws living on the whole of [0, 1] coupled
// by Y = 1 - X sit exactly on the boundary, and each tabulated quantile may
// be off by up to 1e-9.
constexpr double kSimplexSlack = 1e-8;

void check_simplex(std::size_t index, double x, double y)
{
    if (!(y >= 0.0 && y <= 1.0 && x >= 0.0 && x <= 1.0 - y + kSimplexSlack)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "draw " << index << " left the simplex: x=" << x << " y=" << y;
        throw SimplexViolation(msg.str());
    }
}

struct ChunkTally {
    std::size_t wins = 0;
    std::size_t margin_hits = 0;
    std::exception_ptr error;
};

// Runs fill(chunk_rng, begin, end, tally) for every chunk of [0, n), using
// up to `threads` workers. The chunk-to-stream mapping is fixed.
template <class Fill>
SimulationResult run_chunked(const SimulationOptions& opts, Fill&& fill)
{
    if (opts.n == 0) throw DomainError("simulate: sample count must be at least 1");
    if (!(opts.margin_threshold >= 0.0)) throw DomainError("simulate: margin threshold must be >= 0");

    SimulationResult r;
    r.n = opts.n;
    r.seed = opts.seed;
    r.margin_threshold = opts.margin_threshold;
    r.x.resize(opts.n);
    r.y.resize(opts.n);

    const std::size_t chunks = (opts.n + kChunkSize - 1) / kChunkSize;
    std::vector<Xoshiro256> streams;
    streams.reserve(chunks);
    Xoshiro256 base(opts.seed);
    for (std::size_t k = 0; k < chunks; ++k) {
        streams.push_back(base);
        base.jump();
    }

    std::vector<ChunkTally> tallies(chunks);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < chunks; k = next++) {
            const std::size_t begin = k * kChunkSize;
            const std::size_t end = std::min(opts.n, begin + kChunkSize);
            try {
                fill(streams[k], begin, end, r.x.data(), r.y.data(), tallies[k]);
            } catch (...) {
                tallies[k].error = std::current_exception();
            }
        }
    };

    const unsigned threads =
        static_cast<unsigned>(std::min<std::size_t>(opts.threads ? opts.threads : default_thread_count(), chunks));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    for (const auto& t : tallies) {
        if (t.error) std::rethrow_exception(t.error);
        r.wins += t.wins;
        r.margin_hits += t.margin_hits;
    }
    r.samples_in_simplex = opts.n;
    const double n = static_cast<double>(opts.n);
    r.win_probability = static_cast<double>(r.wins) / n;
    r.win_std_error = std::sqrt(r.win_probability * (1.0 - r.win_probability) / n);
    r.margin_probability = static_cast<double>(r.margin_hits) / n;
    r.empirical_spearman = empirical_spearman(r.x, r.y);
    if (!opts.keep_samples) {
        r.x = {};
        r.y = {};
    }
    return r;
}

// Doubled average ranks (integers, so ties stay exact).
std::vector<std::uint64_t> doubled_ranks(std::span<const double> v)
{
    const std::size_t n = v.size();
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) { return v[a] < v[b]; });
    std::vector<std::uint64_t> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && v[idx[j]] == v[idx[i]]) ++j;
        // Positions i..j-1 share rank ((i + 1) + j) / 2.
        const std::uint64_t twice = (i + 1) + j;
        for (std::size_t k = i; k < j; ++k) ranks[idx[k]] = twice;
        i = j;
    }
    return ranks;
}

void check_delta(double delta)
{
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
}

} // namespace

unsigned default_thread_count()
{
    if (const char* env = std::getenv("WINPROB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SimulationResult simulate(const JointModel& model, const SimulationOptions& opts)
{
    model.copula.validate();
    const MarginalSampler leader(model.leader);
    const MarginalSampler runner_up(model.runner_up);
    const CopulaSpec copula = model.copula;
    const double m = opts.margin_threshold;

    return run_chunked(opts, [&](Xoshiro256& rng, std::size_t begin, std::size_t end, double* xs,
                                 double* ys, ChunkTally& tally) {
        for (std::size_t i = begin; i < end; ++i) {
            const double u = rng.uniform_open();
            const double w = rng.uniform_open();
            const double v = conditional_inverse(u, w, copula);
            const double x = leader.quantile(u);
            const double y = runner_up.quantile(v);
            check_simplex(i, x, y);
            xs[i] = x;
            ys[i] = y;
            tally.wins += x > y;
            tally.margin_hits += std::abs(x - y) < m;
        }
    });
}

SimulationResult simulate_g_delta(const Marginal& x_law, double delta, const SimulationOptions& opts)
{
    check_delta(delta);
    const MarginalSampler law(x_law);
    const double m = opts.margin_threshold;
    return run_chunked(opts, [&](Xoshiro256& rng, std::size_t begin, std::size_t end, double* xs,
                                 double* ys, ChunkTally& tally) {
        for (std::size_t i = begin; i < end; ++i) {
            const double u = rng.uniform_open();
            rng.uniform_open(); // keep two draws per pair, as in simulate
            const double x = law.quantile(u);
            const double y = g_delta_apply(x, delta);
            check_simplex(i, x, y);
            xs[i] = x;
            ys[i] = y;
            tally.wins += x > y;
            tally.margin_hits += std::abs(x - y) < m;
        }
    });
}

double empirical_spearman(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw DomainError("empirical_spearman: size mismatch");
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    const auto rx = doubled_ranks(x);
    const auto ry = doubled_ranks(y);
    // Pearson correlation of the ranks; doubled ranks have mean n + 1.
    const long double mean = static_cast<long double>(n) + 1.0L;
    long double sxy = 0.0L;
    long double sxx = 0.0L;
    long double syy = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const long double dx = static_cast<long double>(rx[i]) - mean;
        const long double dy = static_cast<long double>(ry[i]) - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0L || syy == 0.0L) return 0.0;
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

void write_samples_csv(std::ostream& os, std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw DomainError("write_samples_csv: size mismatch");
    os << "x,y\n";
    char line[64];
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int len = std::snprintf(line, sizeof line, "%.6f,%.6f\n", x[i], y[i]);
        os.write(line, len);
    }
}

double win_prob_countermonotone(const Cdf& fx)
{
    return 1.0 - fx(0.5);
}

double g_delta_apply(double x, double delta)
{
    check_delta(delta);
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("g_delta: x must lie in [0, 1]");
    if (x <= delta) return (1.0 - delta) / delta * x;
    return 1.0 - x;
}

double g_delta_induced_cdf(double y, double delta, const Cdf& fx)
{
    check_delta(delta);
    if (!(y >= 0.0 && y <= 1.0 - delta)) throw DomainError("g_delta_induced_cdf: y must lie in [0, 1 - delta]");
    return fx(delta * y / (1.0 - delta)) + 1.0 - fx(1.0 - y);
}

double win_prob_g_delta(double delta, const Cdf& fx)
{
    check_delta(delta);
    // At delta = 1/2 the rising branch is y = x, whose points are ties.
    if (delta > 0.5) return 1.0;
    return 1.0 - fx(0.5);
}

} // namespace winprob
