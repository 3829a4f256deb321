#pragma once

#include <span>
#include <string>
#include <vector>

namespace g3m {

// Weighted geometric-mean pool. Immutable value type: trades produce a new
// state via apply_batch.
struct PoolState {
    std::vector<double> weights;    // open simplex, each >= 1e-6
    double fee = 0.0;               // fraction of each positive inflow
    std::vector<double> inventory;  // token units, strictly positive

    int n() const { return static_cast<int>(weights.size()); }
};

PoolState make_pool(std::vector<double> weights, double fee, std::vector<double> inventory);

// A collection of atomic trade vectors applied at one instant. Positive
// entries are tokens paid into the pool, negative entries are withdrawals.
struct TradeBatch {
    std::vector<std::vector<double>> trades;

    bool empty() const { return trades.empty(); }
    // Sum of the trade vectors (the net inventory change when applied).
    std::vector<double> net(int n) const;
};

struct TradeCheck {
    bool accepted = false;
    double log_k_pre = 0.0;
    double log_k_post_effective = 0.0;  // positive inflows counted net of fee
    std::string reason;                 // set when rejected
};

double log_invariant(const PoolState& pool);
double invariant_value(const PoolState& pool);

// Accepts when the fee-adjusted invariant does not shrink by more than tol
// (in log terms); any batch that grows the invariant is accepted. With
// sequential=true each trade is checked against the running reserves instead
// of the common pre-state.
TradeCheck validate_trade(const PoolState& pool, const TradeBatch& batch, double tol = 1e-9,
                          bool sequential = false);

// Credits full inflows to reserves (fees stay in the pool). Throws
// std::invalid_argument when validation rejects the batch.
PoolState apply_batch(const PoolState& pool, const TradeBatch& batch, double tol = 1e-9,
                      bool sequential = false);

// No-arbitrage interval for the reserve ratio theta_i/theta_j at external
// prices: ((1-fee) * w_i S_j / (w_j S_i), 1/(1-fee) * w_i S_j / (w_j S_i)).
std::pair<double, double> no_arb_band(const PoolState& pool, int i, int j,
                                      std::span<const double> prices);

double wealth(const PoolState& pool, std::span<const double> prices);

struct WealthBounds {
    double lower = 0.0;
    double upper = 0.0;
    double c = 0.0;  // prod w_i^{-w_i}
    double k = 0.0;  // invariant
    double v = 0.0;  // geometric mean price
};

WealthBounds wealth_bounds(const PoolState& pool, std::span<const double> prices);

// {weights, fee, inventory, invariant, timestamp} as a JSON document.
std::string snapshot_json(const PoolState& pool, double timestamp);

}  // namespace g3m
