#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "g3m/market.hpp"
#include "g3m/pool.hpp"

namespace g3m {

struct ArbResult {
    TradeBatch batch;     // atomic trades in execution order
    double profit = 0.0;  // numeraire value captured by the arbitrageur
    PoolState post;
    int iterations = 0;
};

// Closed-form two-asset arbitrage for the pair (i, j): when the reserve
// ratio theta_i/theta_j sits outside its no-arbitrage band, returns the
// profit-maximizing swap that puts the fee-adjusted post-trade ratio on the
// violated band edge. In-band pools yield an empty batch with zero profit.
ArbResult pairwise_arb(const PoolState& pool, int i, int j, std::span<const double> prices);

// Greedy repair over all pairs: repeatedly fixes the pair with the largest
// log-distance outside its band (ties broken by lowest (i,j)) until every
// pairwise ratio is inside. Throws std::runtime_error if the iteration cap
// (64 n^2) is exceeded.
ArbResult arbitrage_to_band(const PoolState& pool, std::span<const double> prices);

// Thrown by run_simulation when the wealth process leaves its no-arbitrage
// bounds; this indicates a defect in the engine, not in the inputs.
struct bound_violation : std::logic_error {
    using std::logic_error::logic_error;
};

// Optional exogenous flow: Poisson-arriving swaps of random direction and
// size, executed at the pool's own quote. Off by default.
struct NoiseTraderConfig {
    double trades_per_year = 0.0;
    double relative_size = 0.01;  // inflow as a fraction of the paying reserve
};

struct SimOptions {
    double trade_tol = 1e-9;  // validation tolerance on log k
    bool record_rows = true;
    NoiseTraderConfig noise;
    std::uint64_t noise_seed = 0x6e6f697365ULL;
};

struct StepRecord {
    double time = 0.0;
    double wealth = 0.0;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    double invariant = 0.0;
    double geo_price = 0.0;
    double step_profit = 0.0;
    double cumulative_fees = 0.0;
};

struct SimTrace {
    std::vector<StepRecord> rows;
    PoolState final_state;
    double max_identity_gap = 0.0;  // max |K/(c k v) - 1| across steps
    double max_band_excess = 0.0;   // max relative distance outside any band
    double min_step_profit = 0.0;
    double max_log_k_decrease = 0.0;  // largest per-step drop of log k
    double total_profit = 0.0;
    double total_fees = 0.0;
};

// Walks one price path: at every grid time applies noise flow (if any) and
// the arbitrageur, then records wealth against its bounds. Bound violations
// throw; they falsify the implementation rather than the input.
SimTrace run_simulation(const PathView& path, const PoolState& initial,
                        const SimOptions& opts = {});

// Columns: time,K,lower_bound,upper_bound,k,v,step_profit,cumulative_fees
void write_trace_csv(const SimTrace& trace, std::ostream& os);

}  // namespace g3m
