#include "g3m/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "g3m/csv.hpp"

namespace g3m::analytics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::int64_t kHour = 3600;
constexpr double kHoursPerYear = 8760.0;

const char* kHeader = "timestamp,reserve0,reserve1,price0,price1,cum_fees,tvl";

bool defined(double x) { return !std::isnan(x); }

std::string pool_id_from_path(const std::string& path) {
    size_t slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    size_t dot = name.find_last_of('.');
    return dot == std::string::npos ? name : name.substr(0, dot);
}

}  // namespace

PoolSeries parse_pool_csv(std::istream& is, std::string id, const PanelOptions& opts,
                          LoadReport& report) {
    PoolSeries series;
    series.id = std::move(id);
    std::string line;
    if (!std::getline(is, line))
        throw std::invalid_argument("pool '" + series.id + "': empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader)
        throw std::invalid_argument("pool '" + series.id + "': bad header '" + line +
                                    "', expected '" + kHeader + "'");
    size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = csv::split(line);
        if (fields.size() != 7)
            throw std::invalid_argument("pool '" + series.id + "' line " +
                                        std::to_string(line_no) + ": expected 7 fields, got " +
                                        std::to_string(fields.size()));
        PoolRecord rec;
        try {
            rec.ts = csv::parse_iso8601_utc(fields[0]);
            rec.reserve0 = csv::parse_double(fields[1]);
            rec.reserve1 = csv::parse_double(fields[2]);
            rec.price0 = csv::parse_double(fields[3]);
            rec.price1 = csv::parse_double(fields[4]);
            rec.cum_fees = csv::parse_double(fields[5]);
            rec.tvl = csv::parse_double(fields[6]);
        } catch (const std::exception& e) {
            throw std::invalid_argument("pool '" + series.id + "' line " +
                                        std::to_string(line_no) + ": " + e.what());
        }
        report.records_total += 1;
        if (!series.records.empty() && rec.ts <= series.records.back().ts)
            throw std::invalid_argument("pool '" + series.id + "' line " +
                                        std::to_string(line_no) + ": non-monotone timestamp");
        if (!(rec.reserve0 > 0.0) || !(rec.reserve1 > 0.0))
            throw std::invalid_argument("pool '" + series.id + "' line " +
                                        std::to_string(line_no) + ": non-positive reserves");
        if (!(rec.price0 > 0.0) || !(rec.price1 > 0.0))
            throw std::invalid_argument("pool '" + series.id + "' line " +
                                        std::to_string(line_no) + ": non-positive prices");
        if (!(rec.tvl > 0.0) || rec.tvl < opts.tvl_floor) {
            report.records_dropped_tvl += 1;
            continue;
        }
        if (!series.records.empty()) {
            const std::int64_t gap = rec.ts - series.records.back().ts;
            if (gap % kHour != 0)
                throw std::invalid_argument("pool '" + series.id + "' line " +
                                            std::to_string(line_no) +
                                            ": spacing is not a whole number of hours");
            const std::int64_t missing = gap / kHour - 1;
            if (missing > 0 && missing <= opts.max_forward_fill_hours) {
                PoolRecord fill = series.records.back();
                fill.forward_filled = true;
                for (std::int64_t k = 0; k < missing; ++k) {
                    fill.ts += kHour;
                    series.records.push_back(fill);
                    report.gaps_forward_filled += 1;
                }
            } else if (missing > 0) {
                report.segment_breaks += 1;
            }
        }
        series.records.push_back(rec);
    }
    return series;
}

PoolPanel load_panel(const std::vector<std::string>& files, const PanelOptions& opts) {
    PoolPanel panel;
    for (const auto& file : files) {
        std::ifstream is(file);
        if (!is) throw std::runtime_error("cannot open panel file '" + file + "'");
        PoolSeries series = parse_pool_csv(is, pool_id_from_path(file), opts, panel.report);
        if (series.records.empty()) {
            panel.report.pools_excluded += 1;
            panel.report.notes.push_back("pool '" + series.id +
                                         "' excluded: no records above the TVL floor");
            continue;
        }
        panel.pools.push_back(std::move(series));
    }
    return panel;
}

namespace {

// Contiguous hourly runs; realized-vol windows never span a break.
std::vector<std::pair<size_t, size_t>> hourly_runs(const std::vector<PoolRecord>& recs) {
    std::vector<std::pair<size_t, size_t>> runs;
    size_t start = 0;
    for (size_t i = 1; i <= recs.size(); ++i) {
        if (i == recs.size() || recs[i].ts - recs[i - 1].ts != kHour) {
            runs.emplace_back(start, i);
            start = i;
        }
    }
    return runs;
}

}  // namespace

MetricSeries compute_metrics(const PoolPanel& panel, const PanelOptions& opts) {
    if (opts.window_hours < 2) throw std::invalid_argument("metrics: window must be >= 2 hours");
    if (opts.weights.size() != 2) throw std::invalid_argument("metrics: need two pool weights");
    const int W = opts.window_hours;
    const double w0 = opts.weights[0], w1 = opts.weights[1];

    MetricSeries out;
    for (const PoolSeries& pool : panel.pools) {
        out.pool_ids.push_back(pool.id);
        std::vector<MetricPoint> points(pool.records.size());
        for (size_t i = 0; i < pool.records.size(); ++i)
            points[i] = {pool.records[i].ts, kNaN, kNaN, kNaN};

        for (auto [lo, hi] : hourly_runs(pool.records)) {
            const size_t len = hi - lo;
            if (len < static_cast<size_t>(W) + 1) continue;
            // Hourly log returns within the run.
            std::vector<double> r0(len - 1), r1(len - 1);
            for (size_t i = lo + 1; i < hi; ++i) {
                r0[i - lo - 1] = std::log(pool.records[i].price0 / pool.records[i - 1].price0);
                r1[i - lo - 1] = std::log(pool.records[i].price1 / pool.records[i - 1].price1);
            }
            for (size_t i = lo + W; i < hi; ++i) {
                const size_t rlo = i - lo - W;  // first return of the window
                double m0 = 0.0, m1 = 0.0;
                for (size_t k = 0; k < static_cast<size_t>(W); ++k) {
                    m0 += r0[rlo + k];
                    m1 += r1[rlo + k];
                }
                m0 /= W;
                m1 /= W;
                double v00 = 0.0, v11 = 0.0, v01 = 0.0;
                for (size_t k = 0; k < static_cast<size_t>(W); ++k) {
                    const double a = r0[rlo + k] - m0;
                    const double b = r1[rlo + k] - m1;
                    v00 += a * a;
                    v11 += b * b;
                    v01 += a * b;
                }
                const double norm = kHoursPerYear / (W - 1);
                v00 *= norm;
                v11 *= norm;
                v01 *= norm;
                // f = w' Sigma w - w' sigma^2 via the pairwise-difference form.
                const double d = std::max(v00 + v11 - 2.0 * v01, 0.0);
                const double f = -w0 * w1 * d;
                const double drift = 0.5 * f;
                const double il =
                    opts.il_apy_compounded ? std::expm1(drift) : drift;

                const double dfees =
                    pool.records[i].cum_fees - pool.records[i - W].cum_fees;
                double tvl_sum = 0.0;
                for (size_t k = i - W; k <= i; ++k) tvl_sum += pool.records[k].tvl;
                const double tvl_avg = tvl_sum / (W + 1);
                double fee = dfees / tvl_avg * (kHoursPerYear / W);
                if (opts.fee_apr_compounded) fee = std::expm1(fee);

                points[i].il_apy = il;
                points[i].fee_apr = fee;
                points[i].net_apr = fee + il;
            }
        }
        out.per_pool.push_back(std::move(points));
    }
    return out;
}

namespace {

double metric_of(const MetricPoint& p, Metric m) {
    switch (m) {
        case Metric::il_apy: return p.il_apy;
        case Metric::fee_apr: return p.fee_apr;
        case Metric::net_apr: return p.net_apr;
    }
    return kNaN;
}

// value per pool index at a timestamp, NaN when absent/undefined
std::map<std::int64_t, std::vector<double>> by_timestamp(const MetricSeries& series, Metric m) {
    std::map<std::int64_t, std::vector<double>> table;
    const size_t n_pools = series.per_pool.size();
    for (size_t p = 0; p < n_pools; ++p) {
        for (const MetricPoint& pt : series.per_pool[p]) {
            auto& row = table[pt.ts];
            if (row.empty()) row.assign(n_pools, kNaN);
            row[p] = metric_of(pt, m);
        }
    }
    return table;
}

double quantile_linear(std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

std::vector<QuartileRow> cross_section_quartiles(const MetricSeries& series, Metric metric) {
    std::vector<QuartileRow> rows;
    for (auto& [ts, values] : by_timestamp(series, metric)) {
        std::vector<double> v;
        for (double x : values)
            if (defined(x)) v.push_back(x);
        if (v.size() < 4) continue;
        std::sort(v.begin(), v.end());
        rows.push_back({ts, quantile_linear(v, 0.25), quantile_linear(v, 0.5),
                        quantile_linear(v, 0.75), v.size()});
    }
    return rows;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) return kNaN;
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return kNaN;
    return sab / std::sqrt(saa * sbb);
}

std::vector<double> average_ranks(std::span<const double> values) {
    const size_t n = values.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::sort(idx.begin(), idx.end(), [&](size_t i, size_t j) { return values[i] < values[j]; });
    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
        for (size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) return kNaN;
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    return pearson(ra, rb);
}

CorrelationSet fee_il_correlation(const MetricSeries& series, CorrelationMode mode) {
    CorrelationSet set;
    if (mode == CorrelationMode::temporal) {
        for (size_t p = 0; p < series.per_pool.size(); ++p) {
            std::vector<double> fee, il;
            for (const MetricPoint& pt : series.per_pool[p]) {
                if (defined(pt.fee_apr) && defined(pt.il_apy)) {
                    fee.push_back(pt.fee_apr);
                    il.push_back(pt.il_apy);
                }
            }
            const double c = pearson(fee, il);
            if (defined(c)) {
                set.labels.push_back(series.pool_ids[p]);
                set.coefficients.push_back(c);
            } else {
                set.excluded += 1;
            }
        }
        return set;
    }
    auto fee_tab = by_timestamp(series, Metric::fee_apr);
    auto il_tab = by_timestamp(series, Metric::il_apy);
    for (auto& [ts, fees] : fee_tab) {
        auto it = il_tab.find(ts);
        if (it == il_tab.end()) continue;
        std::vector<double> fee, il;
        for (size_t p = 0; p < fees.size(); ++p) {
            if (defined(fees[p]) && defined(it->second[p])) {
                fee.push_back(fees[p]);
                il.push_back(it->second[p]);
            }
        }
        const double c = pearson(fee, il);
        if (defined(c)) {
            set.labels.push_back(csv::format_iso8601_utc(ts));
            set.coefficients.push_back(c);
        } else {
            set.excluded += 1;
        }
    }
    return set;
}

double rank_autocorrelation(const MetricSeries& series, int lag_hours) {
    auto table = by_timestamp(series, Metric::net_apr);
    const std::int64_t lag = static_cast<std::int64_t>(lag_hours) * kHour;
    double sum = 0.0;
    size_t count = 0;
    for (auto& [ts, now] : table) {
        auto it = table.find(ts + lag);
        if (it == table.end()) continue;
        std::vector<double> a, b;
        for (size_t p = 0; p < now.size(); ++p) {
            if (defined(now[p]) && defined(it->second[p])) {
                a.push_back(now[p]);
                b.push_back(it->second[p]);
            }
        }
        if (a.size() < 4) continue;
        const double c = spearman(a, b);
        if (defined(c)) {
            sum += c;
            count += 1;
        }
    }
    return count ? sum / static_cast<double>(count) : kNaN;
}

double relative_autocorrelation(const MetricSeries& series, int lag_hours) {
    auto table = by_timestamp(series, Metric::net_apr);
    // Cross-sectional mean per calendar day.
    std::map<std::int64_t, std::pair<double, size_t>> day_sum;
    for (auto& [ts, values] : table) {
        auto& acc = day_sum[ts / 86400];
        for (double v : values)
            if (defined(v)) {
                acc.first += v;
                acc.second += 1;
            }
    }
    const std::int64_t lag = static_cast<std::int64_t>(lag_hours) * kHour;
    auto deviation = [&](std::int64_t ts, double v) {
        const auto& acc = day_sum.at(ts / 86400);
        return v - acc.first / static_cast<double>(acc.second);
    };
    std::vector<double> a, b;
    for (auto& [ts, now] : table) {
        auto it = table.find(ts + lag);
        if (it == table.end()) continue;
        for (size_t p = 0; p < now.size(); ++p) {
            if (defined(now[p]) && defined(it->second[p])) {
                a.push_back(deviation(ts, now[p]));
                b.push_back(deviation(ts + lag, it->second[p]));
            }
        }
    }
    return pearson(a, b);
}

void write_quartiles_csv(const MetricSeries& series, std::ostream& os) {
    os << "time,metric,q1,median,q3\n";
    static constexpr std::pair<Metric, const char*> kMetrics[] = {
        {Metric::il_apy, "il_apy"}, {Metric::fee_apr, "fee_apr"}, {Metric::net_apr, "net_apr"}};
    for (auto [metric, name] : kMetrics) {
        for (const QuartileRow& row : cross_section_quartiles(series, metric)) {
            os << csv::format_iso8601_utc(row.ts) << ',' << name << ',' << csv::fmt(row.q1) << ','
               << csv::fmt(row.median) << ',' << csv::fmt(row.q3) << "\n";
        }
    }
}

void write_autocorr_csv(const MetricSeries& series, std::span<const int> lags, std::ostream& os) {
    os << "lag_hours,spearman,pearson\n";
    for (int lag : lags) {
        const double s = rank_autocorrelation(series, lag);
        const double p = relative_autocorrelation(series, lag);
        os << lag << ',' << (defined(s) ? csv::fmt(s) : "") << ','
           << (defined(p) ? csv::fmt(p) : "") << "\n";
    }
}

void write_corr_hist_csv(const CorrelationSet& set, std::ostream& os) {
    os << "pool_or_time,coefficient\n";
    for (size_t i = 0; i < set.labels.size(); ++i)
        os << set.labels[i] << ',' << csv::fmt(set.coefficients[i]) << "\n";
}

}  // namespace g3m::analytics
