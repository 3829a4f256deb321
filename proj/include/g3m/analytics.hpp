#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace g3m::analytics {

struct PoolRecord {
    std::int64_t ts = 0;  // unix seconds, hourly grid
    double reserve0 = 0.0;
    double reserve1 = 0.0;
    double price0 = 0.0;
    double price1 = 0.0;
    double cum_fees = 0.0;  // cumulative fee income, numeraire
    double tvl = 0.0;
    bool forward_filled = false;
};

struct PoolSeries {
    std::string id;
    std::vector<PoolRecord> records;
};

struct LoadReport {
    size_t records_total = 0;
    size_t records_dropped_tvl = 0;
    size_t gaps_forward_filled = 0;  // hours
    size_t segment_breaks = 0;       // gaps too long to fill
    size_t pools_excluded = 0;       // all records below the TVL floor
    std::vector<std::string> notes;
};

struct PanelOptions {
    int window_hours = 168;              // realized-covariance window
    double tvl_floor = 200000.0;         // records below are dropped
    int max_forward_fill_hours = 6;      // longer gaps restart the window
    bool il_apy_compounded = true;       // exp(drift) - 1; false: plain drift
    bool fee_apr_compounded = false;     // false: simple annualization
    std::vector<double> weights = {0.5, 0.5};
};

struct PoolPanel {
    std::vector<PoolSeries> pools;
    LoadReport report;
};

// Input CSV header: timestamp,reserve0,reserve1,price0,price1,cum_fees,tvl
// with ISO-8601 UTC timestamps. Throws std::invalid_argument on schema
// violations, non-monotone timestamps or non-positive reserves/prices.
PoolSeries parse_pool_csv(std::istream& is, std::string id, const PanelOptions& opts,
                          LoadReport& report);

PoolPanel load_panel(const std::vector<std::string>& files, const PanelOptions& opts = {});

// NaN marks an undefined metric (insufficient window data or missing fees).
struct MetricPoint {
    std::int64_t ts = 0;
    double il_apy = 0.0;
    double fee_apr = 0.0;
    double net_apr = 0.0;
};

struct MetricSeries {
    std::vector<std::string> pool_ids;
    std::vector<std::vector<MetricPoint>> per_pool;
};

MetricSeries compute_metrics(const PoolPanel& panel, const PanelOptions& opts = {});

enum class Metric { il_apy, fee_apr, net_apr };

struct QuartileRow {
    std::int64_t ts = 0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    size_t count = 0;
};

// Cross-sectional quartiles per timestamp (linear interpolation between
// order statistics); timestamps with fewer than 4 defined pools are skipped.
std::vector<QuartileRow> cross_section_quartiles(const MetricSeries& series, Metric metric);

enum class CorrelationMode { temporal, cross_sectional };

struct CorrelationSet {
    std::vector<std::string> labels;  // pool id or timestamp
    std::vector<double> coefficients;
    size_t excluded = 0;  // undefined: zero variance or too few samples
};

// Pearson correlation between fee APR and IL APY, per pool across time or
// per timestamp across pools.
CorrelationSet fee_il_correlation(const MetricSeries& series, CorrelationMode mode);

// Average over t of the cross-sectional Spearman rank correlation between
// net APR at t and t + lag (average-rank ties). NaN when no timestamp has
// at least 4 pools on both sides.
double rank_autocorrelation(const MetricSeries& series, int lag_hours);

// Pearson autocorrelation of net APR after subtracting the cross-sectional
// daily mean, pooled over pools and times.
double relative_autocorrelation(const MetricSeries& series, int lag_hours);

double pearson(std::span<const double> a, std::span<const double> b);
double spearman(std::span<const double> a, std::span<const double> b);
std::vector<double> average_ranks(std::span<const double> values);

// quartiles.csv: time,metric,q1,median,q3
void write_quartiles_csv(const MetricSeries& series, std::ostream& os);
// autocorr.csv: lag_hours,spearman,pearson
void write_autocorr_csv(const MetricSeries& series, std::span<const int> lags, std::ostream& os);
// corr_hist.csv: pool_or_time,coefficient
void write_corr_hist_csv(const CorrelationSet& set, std::ostream& os);

}  // namespace g3m::analytics
