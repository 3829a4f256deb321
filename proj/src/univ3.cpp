#include "g3m/univ3.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "g3m/csv.hpp"

namespace g3m::univ3 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inv_sqrt_upper(double p_upper) { return std::isinf(p_upper) ? 0.0 : 1.0 / std::sqrt(p_upper); }

}  // namespace

RangePosition make_position(double liquidity, double p_lower, double p_upper) {
    if (!(liquidity > 0.0))
        throw std::invalid_argument("position: liquidity must be > 0, got " + csv::fmt(liquidity));
    if (!(p_lower >= 0.0) || !(p_upper > p_lower))
        throw std::invalid_argument("position: need 0 <= p_lower < p_upper");
    return RangePosition{liquidity, p_lower, p_upper};
}

double liquidity_from_deposit(std::optional<double> x0, std::optional<double> y0, double p0,
                              double p_lower, double p_upper) {
    if (!(p0 > 0.0)) throw std::invalid_argument("deposit: entry price must be > 0");
    if (!(p_lower >= 0.0) || !(p_upper > p_lower))
        throw std::invalid_argument("deposit: need 0 <= p_lower < p_upper");
    if (!x0 && !y0) throw std::invalid_argument("deposit: supply at least one token amount");

    const double sp = std::sqrt(p0);
    const double sa = std::sqrt(p_lower);
    const double sb_inv = inv_sqrt_upper(p_upper);

    std::optional<double> from_x, from_y;
    if (x0) {
        if (p0 >= p_upper) {
            if (*x0 != 0.0)
                throw std::invalid_argument("deposit: price at/above range, asset-0 amount must be 0");
        } else {
            const double denom = 1.0 / std::max(sp, sa) - sb_inv;
            from_x = *x0 / denom;
        }
    }
    if (y0) {
        if (p0 <= p_lower) {
            if (*y0 != 0.0)
                throw std::invalid_argument("deposit: price at/below range, asset-1 amount must be 0");
        } else {
            from_y = *y0 / (std::min(sp, std::sqrt(p_upper)) - sa);
        }
    }
    double liquidity = 0.0;
    if (from_x && from_y) {
        const double rel =
            std::abs(*from_x - *from_y) / std::max({*from_x, *from_y, 1e-300});
        if (rel > 1e-9)
            throw std::invalid_argument("deposit: token amounts disagree on liquidity (" +
                                        csv::fmt(*from_x) + " vs " + csv::fmt(*from_y) + ")");
        liquidity = 0.5 * (*from_x + *from_y);
    } else if (from_x) {
        liquidity = *from_x;
    } else if (from_y) {
        liquidity = *from_y;
    }
    if (!(liquidity > 0.0))
        throw std::invalid_argument("deposit: supplied amounts give no liquidity at this price");
    return liquidity;
}

Reserves reserves(const RangePosition& pos, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("reserves: price must be > 0");
    const double sa = std::sqrt(pos.p_lower);
    const double sb_inv = inv_sqrt_upper(pos.p_upper);
    if (p >= pos.p_upper)
        return {0.0, pos.liquidity * (std::sqrt(pos.p_upper) - sa)};
    if (p <= pos.p_lower) return {pos.liquidity * (1.0 / sa - sb_inv), 0.0};
    const double sp = std::sqrt(p);
    return {pos.liquidity * (1.0 / sp - sb_inv), pos.liquidity * (sp - sa)};
}

Reserves virtual_reserves(const RangePosition& pos, double p) {
    Reserves r = reserves(pos, p);
    return {r.x + pos.liquidity * inv_sqrt_upper(pos.p_upper),
            r.y + pos.liquidity * std::sqrt(pos.p_lower)};
}

double position_wealth(const RangePosition& pos, double s0, double s1) {
    if (!(s0 > 0.0 && s1 > 0.0)) throw std::invalid_argument("wealth: prices must be > 0");
    Reserves r = reserves(pos, s0 / s1);
    return r.x * s0 + r.y * s1;
}

double wealth_closed_form(const RangePosition& pos, double s0, double s1) {
    return 2.0 * pos.liquidity * std::sqrt(s0 * s1) -
           pos.liquidity * inv_sqrt_upper(pos.p_upper) * s0 -
           pos.liquidity * std::sqrt(pos.p_lower) * s1;
}

double leverage(double p, double p_lower, double p_upper) {
    if (!(p >= p_lower && p <= p_upper))
        throw std::invalid_argument("leverage: price outside range");
    const double inv_sqrt_alpha = p_lower == 0.0 ? 0.0 : std::sqrt(p_lower / p);
    const double inv_sqrt_beta = std::isinf(p_upper) ? 0.0 : std::sqrt(p / p_upper);
    const double denom = 1.0 - 0.5 * (inv_sqrt_alpha + inv_sqrt_beta);
    return denom > 0.0 ? 1.0 / denom : kInf;
}

Deltas price_deltas(double p, double p_lower, double p_upper) {
    const double l = leverage(p, p_lower, p_upper);
    const double inv_sqrt_alpha = p_lower == 0.0 ? 0.0 : std::sqrt(p_lower / p);
    const double inv_sqrt_beta = std::isinf(p_upper) ? 0.0 : std::sqrt(p / p_upper);
    return {0.5 * l * (1.0 - inv_sqrt_beta), 0.5 * l * (1.0 - inv_sqrt_alpha)};
}

double il_drift(double alpha, double beta, double sigma0, double sigma1, double rho) {
    if (!(alpha >= 1.0) || !(beta >= 1.0))
        throw std::invalid_argument("il_drift: need alpha, beta >= 1");
    if (alpha == 1.0 && beta == 1.0)
        throw std::invalid_argument("il_drift: degenerate range (alpha = beta = 1)");
    const double inv_sqrt_alpha = std::isinf(alpha) ? 0.0 : 1.0 / std::sqrt(alpha);
    const double inv_sqrt_beta = std::isinf(beta) ? 0.0 : 1.0 / std::sqrt(beta);
    const double l = 1.0 / (1.0 - 0.5 * (inv_sqrt_alpha + inv_sqrt_beta));
    const double quad = 0.5 * sigma0 * sigma0 + 0.5 * sigma1 * sigma1 - rho * sigma0 * sigma1;
    return -0.25 * l * quad;
}

double il_drift_centered(double lambda, double sigma0, double sigma1, double rho) {
    if (!(lambda > 1.0)) throw std::invalid_argument("il_drift_centered: need lambda > 1");
    return il_drift(lambda, lambda, sigma0, sigma1, rho);
}

ReplicationPortfolio replication_of(const RangePosition& pos) {
    return {pos.liquidity, pos.liquidity * inv_sqrt_upper(pos.p_upper),
            pos.liquidity * std::sqrt(pos.p_lower)};
}

double replication_value(const ReplicationPortfolio& rep, double s0, double s1) {
    return 2.0 * rep.v2_units * std::sqrt(s0 * s1) - rep.short0 * s0 - rep.short1 * s1;
}

ReplicationReport replication_check(const RangePosition& pos, const PathView& path) {
    if (path.n_assets < 2)
        throw std::invalid_argument("replication_check: need a two-asset path");
    ReplicationReport report;
    const ReplicationPortfolio rep = replication_of(pos);
    for (size_t t = 0; t < path.n_times(); ++t) {
        const double s0 = path.price(t, 0), s1 = path.price(t, 1);
        const double p = s0 / s1;
        const double direct = position_wealth(pos, s0, s1);
        const double replicated = replication_value(rep, s0, s1);
        const double gap = std::abs(direct - replicated) / std::max(std::abs(direct), 1e-300);
        if (p >= pos.p_lower && p <= pos.p_upper && !report.first_exit_time) {
            report.max_in_range_gap = std::max(report.max_in_range_gap, gap);
            report.in_range_samples += 1;
        } else {
            if (!report.first_exit_time) report.first_exit_time = path.times[t];
            report.max_out_range_gap = std::max(report.max_out_range_gap, gap);
        }
    }
    return report;
}

std::vector<double> simulate_recentered(const PathView& path, double lambda,
                                        double initial_wealth, double rebalance_cost) {
    if (!(lambda > 1.0)) throw std::invalid_argument("simulate_recentered: need lambda > 1");
    if (!(rebalance_cost >= 0.0 && rebalance_cost < 1.0))
        throw std::invalid_argument("simulate_recentered: rebalance cost must lie in [0,1)");
    if (path.n_assets < 2)
        throw std::invalid_argument("simulate_recentered: need a two-asset path");
    std::vector<double> wealth(path.n_times());
    wealth[0] = initial_wealth;

    // Centered position: K = 2 L sqrt(S0 S1) (1 - 1/sqrt(lambda)).
    const double center_factor = 2.0 * (1.0 - 1.0 / std::sqrt(lambda));
    double s0 = path.price(0, 0), s1 = path.price(0, 1);
    double liquidity = initial_wealth / (center_factor * std::sqrt(s0 * s1));
    RangePosition pos = make_position(liquidity, (s0 / s1) / lambda, (s0 / s1) * lambda);

    for (size_t t = 1; t < path.n_times(); ++t) {
        s0 = path.price(t, 0);
        s1 = path.price(t, 1);
        double value = position_wealth(pos, s0, s1);
        if (rebalance_cost > 0.0 && s0 / s1 != pos.p_lower * lambda)
            value *= 1.0 - rebalance_cost;
        wealth[t] = value;
        liquidity = value / (center_factor * std::sqrt(s0 * s1));
        pos = make_position(liquidity, (s0 / s1) / lambda, (s0 / s1) * lambda);
    }
    return wealth;
}

std::string position_report_json(const RangePosition& pos, double s0, double s1) {
    const double p = s0 / s1;
    const Reserves r = reserves(pos, p);
    const Reserves vr = virtual_reserves(pos, p);
    const bool in_range = p >= pos.p_lower && p <= pos.p_upper;
    const double lev = in_range ? leverage(p, pos.p_lower, pos.p_upper) : 0.0;
    std::ostringstream os;
    os << "{\"L\":" << csv::fmt(pos.liquidity) << ",\"p_a\":" << csv::fmt(pos.p_lower)
       << ",\"p_b\":" << (std::isinf(pos.p_upper) ? "null" : csv::fmt(pos.p_upper))
       << ",\"p\":" << csv::fmt(p)
       << ",\"x\":" << csv::fmt(r.x) << ",\"y\":" << csv::fmt(r.y)
       << ",\"x_star\":" << csv::fmt(vr.x) << ",\"y_star\":" << csv::fmt(vr.y);
    if (in_range) {
        os << ",\"leverage\":" << csv::fmt(lev)
           << ",\"saturated\":" << (lev > kLeverageSaturation ? "true" : "false");
    } else {
        os << ",\"leverage\":null,\"saturated\":false";
    }
    os << ",\"wealth\":" << csv::fmt(position_wealth(pos, s0, s1)) << "}";
    return os.str();
}

}  // namespace g3m::univ3
