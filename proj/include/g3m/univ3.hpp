#pragma once

#include <optional>
#include <string>
#include <vector>

#include "g3m/market.hpp"

namespace g3m::univ3 {

// Concentrated-liquidity position. Prices are quoted as p = S0/S1 (value of
// asset 0 in units of asset 1); x is the asset-0 reserve, y the asset-1
// reserve. p_lower = 0 and p_upper = +infinity recover the full-range pool.
struct RangePosition {
    double liquidity = 0.0;
    double p_lower = 0.0;
    double p_upper = 0.0;
};

RangePosition make_position(double liquidity, double p_lower, double p_upper);

// L from the deposited amounts at entry price p0. Either amount alone
// determines L when p0 is inside the range; if both are given they must
// agree to 1e-9 relative. Outside the range only the single appropriate
// token may be supplied.
double liquidity_from_deposit(std::optional<double> x0, std::optional<double> y0, double p0,
                              double p_lower, double p_upper);

struct Reserves {
    double x = 0.0;
    double y = 0.0;
};

// Reserve composition at price p, clamped to single-asset holdings outside
// the range.
Reserves reserves(const RangePosition& pos, double p);

// (x + L/sqrt(p_upper), y + L sqrt(p_lower)); their product is L^2 in range.
Reserves virtual_reserves(const RangePosition& pos, double p);

// Reserve valuation (p x + y) S1; valid in all price regimes.
double position_wealth(const RangePosition& pos, double s0, double s1);

// In-range closed form 2L sqrt(S0 S1) - (L/sqrt(p_upper)) S0 - L sqrt(p_lower) S1.
double wealth_closed_form(const RangePosition& pos, double s0, double s1);

// alpha = p/p_lower, beta = p_upper/p. Requires p in [p_lower, p_upper].
double leverage(double p, double p_lower, double p_upper);
constexpr double kLeverageSaturation = 1e6;

// Instantaneous price-exposure weights of the position value:
// (l/2)(1 - 1/sqrt(beta)) on asset 0 and (l/2)(1 - 1/sqrt(alpha)) on
// asset 1; they always sum to one.
struct Deltas {
    double d0 = 0.0;
    double d1 = 0.0;
};
Deltas price_deltas(double p, double p_lower, double p_upper);

// Instantaneous impermanent-loss drift (per year) of the position value
// relative to the 50/50 constant-mix portfolio:
//   -(l/4) (sigma0^2/2 + sigma1^2/2 - rho sigma0 sigma1),
// the leverage multiple of the full-range drift f/2 at w = (1/2, 1/2).
double il_drift(double alpha, double beta, double sigma0, double sigma1, double rho);

// Centered range [p/lambda, p lambda]: alpha = beta = lambda.
double il_drift_centered(double lambda, double sigma0, double sigma1, double rho);

// Static replication of the in-range position: v2_units of the 50/50
// geometric-mean portfolio sqrt(S0 S1), short short0 units of S0 and short1
// units of S1.
struct ReplicationPortfolio {
    double v2_units = 0.0;  // multiplies 2 sqrt(S0 S1) per unit of liquidity
    double short0 = 0.0;
    double short1 = 0.0;
};

ReplicationPortfolio replication_of(const RangePosition& pos);
double replication_value(const ReplicationPortfolio& rep, double s0, double s1);

struct ReplicationReport {
    double max_in_range_gap = 0.0;   // relative, over in-range samples
    double max_out_range_gap = 0.0;  // relative, after leaving the range
    std::optional<double> first_exit_time;
    size_t in_range_samples = 0;
};

// Compares reserve valuation against the replication portfolio along a
// two-asset path (assets 0 and 1 of the view).
ReplicationReport replication_check(const RangePosition& pos, const PathView& path);

// Self-financing recentered strategy: at each grid time the position is
// closed at its current value and reopened centered on the current price
// with range [p/lambda, p lambda]. rebalance_cost is the wealth fraction
// lost per reopening (slippage stub, zero by default). Returns the wealth
// path.
std::vector<double> simulate_recentered(const PathView& path, double lambda,
                                        double initial_wealth = 1.0,
                                        double rebalance_cost = 0.0);

// {L, p_a, p_b, p, x, y, x_star, y_star, leverage, wealth} (+ saturation flag)
std::string position_report_json(const RangePosition& pos, double s0, double s1);

}  // namespace g3m::univ3
