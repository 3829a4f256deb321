#include "g3m/arb.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "g3m/csv.hpp"

namespace g3m {

namespace {

// Swap that pays delta_in of asset `pay` and lands the fee-adjusted reserve
// ratio theta_pay/theta_ext on the target edge. Solved in log space:
//   d log theta_pay_eff = -(1-g) z,  d log theta_ext = g z,
// with z = log(ratio/target) < 0 and g = w_pay / (w_pay + w_ext).
struct PairSwap {
    double delta_in = 0.0;
    double delta_out = 0.0;
};

PairSwap solve_edge_swap(const PoolState& pool, int pay, int ext, double target_ratio) {
    const double w_pay = pool.weights[pay], w_ext = pool.weights[ext];
    const double theta_pay = pool.inventory[pay], theta_ext = pool.inventory[ext];
    const double z = std::log(theta_pay / theta_ext) - std::log(target_ratio);
    if (z >= 0.0) return {};
    const double g = w_pay / (w_pay + w_ext);
    PairSwap s;
    s.delta_in = theta_pay * std::expm1(-(1.0 - g) * z) / (1.0 - pool.fee);
    s.delta_out = -theta_ext * std::expm1(g * z);
    return s;
}

}  // namespace

ArbResult pairwise_arb(const PoolState& pool, int i, int j, std::span<const double> prices) {
    auto [lower, upper] = no_arb_band(pool, i, j, prices);
    const double ratio = pool.inventory[i] / pool.inventory[j];

    ArbResult result;
    result.post = pool;
    int pay, ext;
    if (ratio > upper) {
        pay = j;  // pool is long i: buy i out, pay j in
        ext = i;
    } else if (ratio < lower) {
        pay = i;
        ext = j;
    } else {
        return result;
    }
    // Fee-adjusted post ratio in (pay, ext) orientation lands on the edge
    // (1-fee) w_pay S_ext / (w_ext S_pay); this is the first-order optimum.
    const double target = (1.0 - pool.fee) * pool.weights[pay] * prices[ext] /
                          (pool.weights[ext] * prices[pay]);
    PairSwap s = solve_edge_swap(pool, pay, ext, target);
    if (!std::isfinite(s.delta_in) || !std::isfinite(s.delta_out)) {
        throw std::runtime_error("pairwise_arb: failed to bracket band edge (ratio " +
                                 csv::fmt(ratio) + ", band [" + csv::fmt(lower) + "," +
                                 csv::fmt(upper) + "])");
    }
    if (!(s.delta_in > 0.0)) return result;  // at the edge within fp noise
    std::vector<double> tau(pool.weights.size(), 0.0);
    tau[pay] = s.delta_in;
    tau[ext] = -s.delta_out;
    result.batch.trades.push_back(std::move(tau));
    result.profit = s.delta_out * prices[ext] - s.delta_in * prices[pay];
    result.post.inventory[pay] += s.delta_in;
    result.post.inventory[ext] -= s.delta_out;
    result.iterations = 1;
    return result;
}

ArbResult arbitrage_to_band(const PoolState& pool, std::span<const double> prices) {
    const int n = pool.n();
    ArbResult result;
    result.post = pool;
    const int cap = 64 * n * n;

    // Log-distance below this is rounding noise, not an arbitrage: with a
    // zero fee the band is a single point and can only be hit to ~1e-16.
    constexpr double kBandNoise = 1e-14;

    for (int iter = 0;; ++iter) {
        double worst = kBandNoise;
        int wi = -1, wj = -1;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                auto [lower, upper] = no_arb_band(result.post, i, j, prices);
                const double ratio = result.post.inventory[i] / result.post.inventory[j];
                double excess = 0.0;
                if (ratio > upper)
                    excess = std::log(ratio / upper);
                else if (ratio < lower)
                    excess = std::log(lower / ratio);
                if (excess > worst) {
                    worst = excess;
                    wi = i;
                    wj = j;
                }
            }
        }
        if (wi < 0) break;
        if (iter >= cap)
            throw std::runtime_error("arbitrage_to_band: iteration cap " + std::to_string(cap) +
                                     " exceeded, residual band excess " + csv::fmt(worst));
        ArbResult step = pairwise_arb(result.post, wi, wj, prices);
        if (step.batch.empty()) break;  // numerically at the edge already
        result.post = step.post;
        result.profit += step.profit;
        for (auto& tau : step.batch.trades) result.batch.trades.push_back(std::move(tau));
        result.iterations += 1;
    }
    return result;
}

namespace {

// One fee-bearing swap at the pool's own quote: pay delta_in of `pay`,
// receive the invariant-preserving amount of `ext`.
std::vector<double> quote_swap(const PoolState& pool, int pay, int ext, double delta_in) {
    const double ratio = pool.weights[pay] / pool.weights[ext];
    const double dlog_pay =
        std::log1p((1.0 - pool.fee) * delta_in / pool.inventory[pay]);
    const double delta_out = -pool.inventory[ext] * std::expm1(-ratio * dlog_pay);
    std::vector<double> tau(pool.weights.size(), 0.0);
    tau[pay] = delta_in;
    tau[ext] = -delta_out;
    return tau;
}

}  // namespace

SimTrace run_simulation(const PathView& path, const PoolState& initial, const SimOptions& opts) {
    const int n = initial.n();
    if (path.n_assets != n)
        throw std::invalid_argument("run_simulation: path and pool dimensions differ");

    SimTrace trace;
    trace.final_state = initial;
    if (opts.record_rows) trace.rows.reserve(path.n_times());

    std::mt19937_64 noise_rng(opts.noise_seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double cumulative_fees = 0.0;
    double prev_log_k = log_invariant(initial);

    for (size_t t = 0; t < path.n_times(); ++t) {
        const std::span<const double> prices = path.prices_at(t);
        const double dt = t + 1 < path.n_times() ? path.times[t + 1] - path.times[t] : 0.0;

        if (opts.noise.trades_per_year > 0.0 && t > 0) {
            std::poisson_distribution<int> arrivals(opts.noise.trades_per_year * dt);
            const int count = arrivals(noise_rng);
            for (int k = 0; k < count; ++k) {
                int pay = static_cast<int>(unif(noise_rng) * n) % n;
                int ext = (pay + 1 + static_cast<int>(unif(noise_rng) * (n - 1)) % (n - 1)) % n;
                const double delta_in =
                    opts.noise.relative_size * trace.final_state.inventory[pay] *
                    (0.5 + unif(noise_rng));
                TradeBatch batch;
                batch.trades.push_back(quote_swap(trace.final_state, pay, ext, delta_in));
                for (int i = 0; i < n; ++i)
                    cumulative_fees +=
                        trace.final_state.fee * std::max(batch.trades.back()[i], 0.0) * prices[i];
                trace.final_state = apply_batch(trace.final_state, batch, opts.trade_tol);
            }
        }

        ArbResult arb = arbitrage_to_band(trace.final_state, prices);
        if (!arb.batch.empty()) {
            for (const auto& tau : arb.batch.trades)
                for (int i = 0; i < n; ++i)
                    cumulative_fees += trace.final_state.fee * std::max(tau[i], 0.0) * prices[i];
            trace.final_state = arb.post;
            trace.total_profit += arb.profit;
        }
        trace.min_step_profit = std::min(trace.min_step_profit, arb.profit);
        const double log_k = log_invariant(trace.final_state);
        trace.max_log_k_decrease = std::max(trace.max_log_k_decrease, prev_log_k - log_k);
        prev_log_k = log_k;

        const WealthBounds bounds = wealth_bounds(trace.final_state, prices);
        const double value = wealth(trace.final_state, prices);
        // 1e-12 relative headroom: with a zero fee the bounds collapse to a
        // point that rounding can only hit to ~1e-15; genuine violations at
        // any positive fee are orders of magnitude larger.
        if (value < bounds.lower * (1.0 - 1e-12) || value > bounds.upper * (1.0 + 1e-12)) {
            throw bound_violation("wealth " + csv::fmt(value) + " escaped bounds [" +
                                  csv::fmt(bounds.lower) + "," + csv::fmt(bounds.upper) +
                                  "] at t=" + csv::fmt(path.times[t]));
        }
        const double center = bounds.c * bounds.k * bounds.v;
        trace.max_identity_gap = std::max(trace.max_identity_gap, std::abs(value / center - 1.0));

        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                auto [lower, upper] = no_arb_band(trace.final_state, i, j, prices);
                const double ratio =
                    trace.final_state.inventory[i] / trace.final_state.inventory[j];
                double excess = 0.0;
                if (ratio > upper)
                    excess = ratio / upper - 1.0;
                else if (ratio < lower)
                    excess = lower / ratio - 1.0;
                trace.max_band_excess = std::max(trace.max_band_excess, excess);
            }
        }

        if (opts.record_rows) {
            StepRecord row;
            row.time = path.times[t];
            row.wealth = value;
            row.lower_bound = bounds.lower;
            row.upper_bound = bounds.upper;
            row.invariant = bounds.k;
            row.geo_price = bounds.v;
            row.step_profit = arb.profit;
            row.cumulative_fees = cumulative_fees;
            trace.rows.push_back(row);
        }
    }
    trace.total_fees = cumulative_fees;
    return trace;
}

void write_trace_csv(const SimTrace& trace, std::ostream& os) {
    os << "time,K,lower_bound,upper_bound,k,v,step_profit,cumulative_fees\n";
    for (const StepRecord& r : trace.rows) {
        os << csv::fmt(r.time) << ',' << csv::fmt(r.wealth) << ',' << csv::fmt(r.lower_bound)
           << ',' << csv::fmt(r.upper_bound) << ',' << csv::fmt(r.invariant) << ','
           << csv::fmt(r.geo_price) << ',' << csv::fmt(r.step_profit) << ','
           << csv::fmt(r.cumulative_fees) << "\n";
    }
}

}  // namespace g3m
