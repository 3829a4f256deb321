#include "g3m/pool.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "g3m/csv.hpp"

namespace g3m {

namespace {

constexpr double kMinWeight = 1e-6;

void check_dimension(const PoolState& pool, size_t got, const char* what) {
    if (got != pool.weights.size())
        throw std::invalid_argument(std::string(what) + " has dimension " + std::to_string(got) +
                                    ", pool has " + std::to_string(pool.weights.size()));
}

}  // namespace

PoolState make_pool(std::vector<double> weights, double fee, std::vector<double> inventory) {
    if (weights.empty()) throw std::invalid_argument("pool: needs at least one asset");
    if (weights.size() != inventory.size())
        throw std::invalid_argument("pool: weights and inventory dimensions differ");
    if (!(fee >= 0.0 && fee < 1.0))
        throw std::invalid_argument("pool: fee must lie in [0,1), got " + csv::fmt(fee));
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= kMinWeight))
            throw std::invalid_argument("pool: weight " + csv::fmt(w) + " below minimum " +
                                        csv::fmt(kMinWeight));
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("pool: weights sum to " + csv::fmt(sum) + ", expected 1");
    for (double& w : weights) w /= sum;
    for (double q : inventory)
        if (!(q > 0.0))
            throw std::invalid_argument("pool: inventory must be strictly positive, got " +
                                        csv::fmt(q));
    return PoolState{std::move(weights), fee, std::move(inventory)};
}

std::vector<double> TradeBatch::net(int n) const {
    std::vector<double> sum(static_cast<size_t>(n), 0.0);
    for (const auto& tau : trades)
        for (int i = 0; i < n; ++i) sum[i] += tau[i];
    return sum;
}

double log_invariant(const PoolState& pool) {
    double acc = 0.0;
    for (int i = 0; i < pool.n(); ++i) acc += pool.weights[i] * std::log(pool.inventory[i]);
    return acc;
}

double invariant_value(const PoolState& pool) { return std::exp(log_invariant(pool)); }

TradeCheck validate_trade(const PoolState& pool, const TradeBatch& batch, double tol,
                          bool sequential) {
    const int n = pool.n();
    TradeCheck check;
    check.log_k_pre = log_invariant(pool);

    std::vector<double> effective(pool.inventory);
    std::vector<double> actual(pool.inventory);
    double log_k_running = check.log_k_pre;

    auto fold_trade = [&](const std::vector<double>& tau) {
        if (tau.size() != static_cast<size_t>(n))
            throw std::invalid_argument("trade vector has dimension " +
                                        std::to_string(tau.size()) + ", pool has " +
                                        std::to_string(n));
        for (int i = 0; i < n; ++i) {
            const double haircut = tau[i] > 0.0 ? (1.0 - pool.fee) * tau[i] : tau[i];
            effective[i] += haircut;
            actual[i] += tau[i];
        }
    };

    if (sequential) {
        // Each trade is measured against reserves as left by the previous one.
        for (const auto& tau : batch.trades) {
            fold_trade(tau);
            for (int i = 0; i < n; ++i) {
                if (!(effective[i] > 0.0) || !(actual[i] > 0.0)) {
                    check.reason = "reserve exhausted for asset " + std::to_string(i);
                    return check;
                }
            }
            double log_k_eff = 0.0;
            for (int i = 0; i < n; ++i) log_k_eff += pool.weights[i] * std::log(effective[i]);
            if (log_k_eff < log_k_running - tol) {
                check.log_k_post_effective = log_k_eff;
                check.reason = "invariant decreases by " + csv::fmt(log_k_running - log_k_eff) +
                               " in log terms (tol " + csv::fmt(tol) + ")";
                return check;
            }
            // Fees retained so far count toward the next trade's baseline.
            effective = actual;
            log_k_running = 0.0;
            for (int i = 0; i < n; ++i) log_k_running += pool.weights[i] * std::log(actual[i]);
        }
        check.log_k_post_effective = log_k_running;
        check.accepted = true;
        return check;
    }

    for (const auto& tau : batch.trades) fold_trade(tau);
    for (int i = 0; i < n; ++i) {
        if (!(effective[i] > 0.0) || !(actual[i] > 0.0)) {
            check.reason = "reserve exhausted for asset " + std::to_string(i);
            return check;
        }
    }
    double log_k_eff = 0.0;
    for (int i = 0; i < n; ++i) log_k_eff += pool.weights[i] * std::log(effective[i]);
    check.log_k_post_effective = log_k_eff;
    if (log_k_eff < check.log_k_pre - tol) {
        check.reason = "invariant decreases by " + csv::fmt(check.log_k_pre - log_k_eff) +
                       " in log terms (tol " + csv::fmt(tol) + ")";
        return check;
    }
    check.accepted = true;
    return check;
}

PoolState apply_batch(const PoolState& pool, const TradeBatch& batch, double tol,
                      bool sequential) {
    TradeCheck check = validate_trade(pool, batch, tol, sequential);
    if (!check.accepted) throw std::invalid_argument("apply_batch: " + check.reason);
    PoolState next = pool;
    for (const auto& tau : batch.trades)
        for (int i = 0; i < pool.n(); ++i) next.inventory[i] += tau[i];
    return next;
}

std::pair<double, double> no_arb_band(const PoolState& pool, int i, int j,
                                      std::span<const double> prices) {
    check_dimension(pool, prices.size(), "price vector");
    if (i == j || i < 0 || j < 0 || i >= pool.n() || j >= pool.n())
        throw std::invalid_argument("no_arb_band: bad asset pair");
    if (!(prices[i] > 0.0 && prices[j] > 0.0))
        throw std::invalid_argument("no_arb_band: prices must be positive");
    const double mid = pool.weights[i] * prices[j] / (pool.weights[j] * prices[i]);
    return {(1.0 - pool.fee) * mid, mid / (1.0 - pool.fee)};
}

double wealth(const PoolState& pool, std::span<const double> prices) {
    check_dimension(pool, prices.size(), "price vector");
    double k = 0.0;
    for (int i = 0; i < pool.n(); ++i) k += pool.inventory[i] * prices[i];
    return k;
}

WealthBounds wealth_bounds(const PoolState& pool, std::span<const double> prices) {
    check_dimension(pool, prices.size(), "price vector");
    WealthBounds b;
    double log_c = 0.0, log_v = 0.0;
    for (int i = 0; i < pool.n(); ++i) {
        log_c -= pool.weights[i] * std::log(pool.weights[i]);
        log_v += pool.weights[i] * std::log(prices[i]);
    }
    b.c = std::exp(log_c);
    b.k = invariant_value(pool);
    b.v = std::exp(log_v);
    const double center = b.c * b.k * b.v;
    b.lower = (1.0 - pool.fee) * center;
    b.upper = center / (1.0 - pool.fee);
    return b;
}

std::string snapshot_json(const PoolState& pool, double timestamp) {
    std::ostringstream os;
    os << "{\"weights\":[";
    for (int i = 0; i < pool.n(); ++i) os << (i ? "," : "") << csv::fmt(pool.weights[i]);
    os << "],\"fee\":" << csv::fmt(pool.fee) << ",\"inventory\":[";
    for (int i = 0; i < pool.n(); ++i) os << (i ? "," : "") << csv::fmt(pool.inventory[i]);
    os << "],\"invariant\":" << csv::fmt(invariant_value(pool))
       << ",\"timestamp\":" << csv::fmt(timestamp) << "}";
    return os.str();
}

}  // namespace g3m
