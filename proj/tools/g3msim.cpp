// g3msim: scenario runner for weighted geometric-mean pool simulation,
// impermanent-loss Monte Carlo, concentrated-liquidity checks and pool-panel
// analytics. See README.md for the config format.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "g3m/analytics.hpp"
#include "g3m/arb.hpp"
#include "g3m/bench.hpp"
#include "g3m/csv.hpp"
#include "g3m/market.hpp"
#include "g3m/pool.hpp"
#include "g3m/univ3.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum ExitCode { kOk = 0, kConfigError = 1, kVerificationFailure = 2, kIoError = 3 };

struct ScenarioConfig {
    // market
    int n = 2;
    std::vector<double> sigma = {0.8, 0.6};
    std::vector<std::vector<double>> rho = {{1.0, 0.3}, {0.3, 1.0}};
    std::vector<double> mu = {0.0, 0.0};
    // pool
    std::vector<double> weights = {0.5, 0.5};
    double fee = 0.003;
    std::vector<double> inventory = {100.0, 100.0};
    // grid
    double horizon_years = 1.0;
    double dt_hours = 1.0;
    // mc
    size_t paths = 4;
    std::uint64_t seed = 42;
    // v3
    double v3_lambda = 4.0;
    std::optional<double> v3_p_lower, v3_p_upper, v3_liquidity;
    double v3_initial_wealth = 1.0;
    double v3_rebalance_hours = 1.0;
    double v3_rebalance_cost = 0.0;
    // analytics
    g3m::analytics::PanelOptions panel;
    // output
    std::string out_dir = "out";
};

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + where + it.key() + "'");
    }
}

ScenarioConfig load_config(const std::string& path) {
    ScenarioConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream is(path);
    if (!is) throw io_error("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config parse error in '" + path + "': " + e.what());
    }
    reject_unknown(j, {"market", "pool", "grid", "mc", "v3", "analytics", "output"}, "");
    if (j.contains("market")) {
        const json& m = j["market"];
        reject_unknown(m, {"n", "sigma", "rho", "mu"}, "market.");
        if (m.contains("n")) cfg.n = m["n"].get<int>();
        if (m.contains("sigma")) cfg.sigma = m["sigma"].get<std::vector<double>>();
        if (m.contains("rho")) cfg.rho = m["rho"].get<std::vector<std::vector<double>>>();
        if (m.contains("mu")) cfg.mu = m["mu"].get<std::vector<double>>();
    }
    if (j.contains("pool")) {
        const json& p = j["pool"];
        reject_unknown(p, {"weights", "fee", "inventory"}, "pool.");
        if (p.contains("weights")) cfg.weights = p["weights"].get<std::vector<double>>();
        if (p.contains("fee")) cfg.fee = p["fee"].get<double>();
        if (p.contains("inventory")) cfg.inventory = p["inventory"].get<std::vector<double>>();
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        reject_unknown(g, {"horizon_years", "dt_hours"}, "grid.");
        if (g.contains("horizon_years")) cfg.horizon_years = g["horizon_years"].get<double>();
        if (g.contains("dt_hours")) cfg.dt_hours = g["dt_hours"].get<double>();
    }
    if (j.contains("mc")) {
        const json& m = j["mc"];
        reject_unknown(m, {"paths", "seed"}, "mc.");
        if (m.contains("paths")) cfg.paths = m["paths"].get<size_t>();
        if (m.contains("seed")) cfg.seed = m["seed"].get<std::uint64_t>();
    }
    if (j.contains("v3")) {
        const json& v = j["v3"];
        reject_unknown(v, {"lambda", "p_a", "p_b", "liquidity", "initial_wealth",
                           "rebalance_hours", "rebalance_cost"},
                       "v3.");
        if (v.contains("lambda")) cfg.v3_lambda = v["lambda"].get<double>();
        if (v.contains("p_a")) cfg.v3_p_lower = v["p_a"].get<double>();
        if (v.contains("p_b")) cfg.v3_p_upper = v["p_b"].get<double>();
        if (v.contains("liquidity")) cfg.v3_liquidity = v["liquidity"].get<double>();
        if (v.contains("initial_wealth")) cfg.v3_initial_wealth = v["initial_wealth"].get<double>();
        if (v.contains("rebalance_hours")) cfg.v3_rebalance_hours = v["rebalance_hours"].get<double>();
        if (v.contains("rebalance_cost")) cfg.v3_rebalance_cost = v["rebalance_cost"].get<double>();
    }
    if (j.contains("analytics")) {
        const json& a = j["analytics"];
        reject_unknown(a,
                       {"window_hours", "tvl_floor", "max_forward_fill_hours",
                        "il_apy_compounded", "fee_apr_compounded", "weights"},
                       "analytics.");
        if (a.contains("window_hours")) cfg.panel.window_hours = a["window_hours"].get<int>();
        if (a.contains("tvl_floor")) cfg.panel.tvl_floor = a["tvl_floor"].get<double>();
        if (a.contains("max_forward_fill_hours"))
            cfg.panel.max_forward_fill_hours = a["max_forward_fill_hours"].get<int>();
        if (a.contains("il_apy_compounded"))
            cfg.panel.il_apy_compounded = a["il_apy_compounded"].get<bool>();
        if (a.contains("fee_apr_compounded"))
            cfg.panel.fee_apr_compounded = a["fee_apr_compounded"].get<bool>();
        if (a.contains("weights")) cfg.panel.weights = a["weights"].get<std::vector<double>>();
    }
    if (j.contains("output")) {
        reject_unknown(j["output"], {"dir"}, "output.");
        if (j["output"].contains("dir")) cfg.out_dir = j["output"]["dir"].get<std::string>();
    }
    return cfg;
}

json config_to_json(const ScenarioConfig& c) {
    json j;
    j["market"] = {{"n", c.n}, {"sigma", c.sigma}, {"rho", c.rho}, {"mu", c.mu}};
    j["pool"] = {{"weights", c.weights}, {"fee", c.fee}, {"inventory", c.inventory}};
    j["grid"] = {{"horizon_years", c.horizon_years}, {"dt_hours", c.dt_hours}};
    j["mc"] = {{"paths", c.paths}, {"seed", c.seed}};
    json v3 = {{"lambda", c.v3_lambda},
               {"initial_wealth", c.v3_initial_wealth},
               {"rebalance_hours", c.v3_rebalance_hours},
               {"rebalance_cost", c.v3_rebalance_cost}};
    if (c.v3_p_lower) v3["p_a"] = *c.v3_p_lower;
    if (c.v3_p_upper) v3["p_b"] = *c.v3_p_upper;
    if (c.v3_liquidity) v3["liquidity"] = *c.v3_liquidity;
    j["v3"] = v3;
    j["analytics"] = {{"window_hours", c.panel.window_hours},
                      {"tvl_floor", c.panel.tvl_floor},
                      {"max_forward_fill_hours", c.panel.max_forward_fill_hours},
                      {"il_apy_compounded", c.panel.il_apy_compounded},
                      {"fee_apr_compounded", c.panel.fee_apr_compounded},
                      {"weights", c.panel.weights}};
    j["output"] = {{"dir", c.out_dir}};
    return j;
}

g3m::CovarianceSpec market_spec(const ScenarioConfig& cfg) {
    g3m::CovarianceSpec spec;
    spec.n = cfg.n;
    spec.sigma = cfg.sigma;
    spec.mu = cfg.mu;
    spec.rho.reserve(static_cast<size_t>(cfg.n) * cfg.n);
    if (static_cast<int>(cfg.rho.size()) != cfg.n)
        throw std::invalid_argument("config: rho must be n x n");
    for (const auto& row : cfg.rho) {
        if (static_cast<int>(row.size()) != cfg.n)
            throw std::invalid_argument("config: rho must be n x n");
        for (double x : row) spec.rho.push_back(x);
    }
    return g3m::validate_spec(std::move(spec));
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw io_error("cannot open output file '" + p.string() + "'");
    return os;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create output directory '" + dir.string() + "'");
}

int cmd_simulate(const ScenarioConfig& cfg) {
    const auto spec = market_spec(cfg);
    const auto pool = g3m::make_pool(cfg.weights, cfg.fee, cfg.inventory);
    const double dt = cfg.dt_hours / 8760.0;
    const auto paths = g3m::sample_paths(spec, cfg.horizon_years, dt, cfg.paths, cfg.seed);

    ensure_dir(cfg.out_dir);
    {
        auto os = open_out(fs::path(cfg.out_dir) / "prices.csv");
        os << "# seed=" << cfg.seed << "\n";
        g3m::write_paths_csv(paths, os);
    }

    size_t violations = 0;
    double max_identity_gap = 0.0, max_band_excess = 0.0;
    double total_profit = 0.0, total_fees = 0.0;
    for (size_t p = 0; p < paths.n_paths; ++p) {
        char name[32];
        std::snprintf(name, sizeof(name), "trace_%04zu.csv", p);
        try {
            g3m::SimTrace trace = g3m::run_simulation(paths.view(p), pool);
            auto os = open_out(fs::path(cfg.out_dir) / name);
            os << "# seed=" << cfg.seed << " path=" << p << "\n";
            g3m::write_trace_csv(trace, os);
            max_identity_gap = std::max(max_identity_gap, trace.max_identity_gap);
            max_band_excess = std::max(max_band_excess, trace.max_band_excess);
            total_profit += trace.total_profit;
            total_fees += trace.total_fees;
            if (trace.max_band_excess > 1e-9) {
                violations += 1;
                std::cerr << "path " << p << ": band excess "
                          << g3m::csv::fmt(trace.max_band_excess) << " beyond 1e-9\n";
            }
        } catch (const g3m::bound_violation& e) {
            violations += 1;
            std::cerr << "path " << p << ": " << e.what() << "\n";
        }
    }

    json summary = {{"seed", cfg.seed},
                    {"paths", paths.n_paths},
                    {"grid_points", paths.times.size()},
                    {"fee", cfg.fee},
                    {"bound_violations", violations},
                    {"max_identity_gap", max_identity_gap},
                    {"max_band_excess", max_band_excess},
                    {"total_arb_profit", total_profit},
                    {"total_fee_income", total_fees}};
    open_out(fs::path(cfg.out_dir) / "summary.json") << summary.dump(2) << "\n";

    std::cout << "simulate: " << paths.n_paths << " paths, " << paths.times.size()
              << " grid points\n"
              << "  max |K/(c k v) - 1| = " << g3m::csv::fmt(max_identity_gap) << "\n"
              << "  max band excess     = " << g3m::csv::fmt(max_band_excess) << "\n"
              << "  bound violations    = " << violations << "\n";
    return violations == 0 ? kOk : kVerificationFailure;
}

int cmd_il(const ScenarioConfig& cfg) {
    const auto spec = market_spec(cfg);
    const double dt = cfg.dt_hours / 8760.0;
    const auto report =
        g3m::bench::mc_verify_il(spec, cfg.weights, cfg.horizon_years, dt, cfg.paths, cfg.seed);

    ensure_dir(cfg.out_dir);
    {
        // decomposition of one sample path for plotting
        auto paths = g3m::sample_paths(spec, cfg.horizon_years, dt, 1, cfg.seed);
        auto d = g3m::bench::decompose(paths.view(0), cfg.weights, spec);
        auto os = open_out(fs::path(cfg.out_dir) / "il_decomposition.csv");
        os << "# seed=" << cfg.seed << " path=0\n";
        g3m::bench::write_il_csv(d, os);
    }
    json j = {{"seed", cfg.seed},
              {"paths", report.n_paths},
              {"analytic_mean_log_vp", report.analytic},
              {"sample_mean_log_vp", report.sample_mean},
              {"standard_error", report.standard_error},
              {"deviation_in_se", report.deviation_in_se},
              {"v_le_h_paths", report.v_le_h_paths},
              {"v_lt_h_terminal", report.v_lt_h_terminal},
              {"rejected", report.rejected}};
    open_out(fs::path(cfg.out_dir) / "il_report.json") << j.dump(2) << "\n";

    std::cout << "il: mean log(V/P) = " << g3m::csv::fmt(report.sample_mean) << " vs analytic "
              << g3m::csv::fmt(report.analytic) << " (" << g3m::csv::fmt(report.deviation_in_se)
              << " SE)\n"
              << "  V<=H on " << report.v_le_h_paths << "/" << report.n_paths << " paths\n"
              << (report.rejected ? "  REJECTED at 4 SE\n" : "  consistent at 4 SE\n");
    const bool dominance_ok = report.v_le_h_paths == report.n_paths;
    return (!report.rejected && dominance_ok) ? kOk : kVerificationFailure;
}

int cmd_v3(const ScenarioConfig& cfg) {
    const auto spec = market_spec(cfg);
    if (spec.n != 2) throw std::invalid_argument("v3: market must have exactly 2 assets");
    ensure_dir(cfg.out_dir);

    // Position: explicit (p_a, p_b, L) or centered lambda-range at p = 1.
    g3m::univ3::RangePosition pos;
    if (cfg.v3_p_lower && cfg.v3_p_upper) {
        double liq = cfg.v3_liquidity.value_or(1.0);
        pos = g3m::univ3::make_position(liq, *cfg.v3_p_lower, *cfg.v3_p_upper);
    } else {
        const double lam = cfg.v3_lambda;
        const double liq = cfg.v3_liquidity.value_or(
            cfg.v3_initial_wealth / (2.0 * (1.0 - 1.0 / std::sqrt(lam))));
        pos = g3m::univ3::make_position(liq, 1.0 / lam, lam);
    }

    const double dt = cfg.v3_rebalance_hours / 8760.0;
    const auto paths = g3m::sample_paths(spec, cfg.horizon_years, dt, cfg.paths, cfg.seed);

    // Replication identity along the first path.
    const auto rep = g3m::univ3::replication_check(pos, paths.view(0));

    // Recentered-position drift vs the closed form, relative to the 50/50
    // constant mix.
    const double analytic =
        g3m::univ3::il_drift_centered(cfg.v3_lambda, spec.sigma[0], spec.sigma[1],
                                      spec.rho_at(0, 1));
    std::vector<double> drifts(paths.n_paths);
    const std::vector<double> w = {0.5, 0.5};
    for (size_t p = 0; p < paths.n_paths; ++p) {
        const auto view = paths.view(p);
        const auto wealth = g3m::univ3::simulate_recentered(view, cfg.v3_lambda,
                                                            cfg.v3_initial_wealth);
        const auto mix = g3m::bench::constant_mix_path(view, w);
        drifts[p] = (std::log(wealth.back() / wealth.front()) - std::log(mix.back())) /
                    cfg.horizon_years;
    }
    double mean = 0.0;
    for (double d : drifts) mean += d;
    mean /= static_cast<double>(drifts.size());
    double var = 0.0;
    for (double d : drifts) var += (d - mean) * (d - mean);
    var = drifts.size() > 1 ? var / static_cast<double>(drifts.size() - 1) : 0.0;
    const double se = std::sqrt(var / static_cast<double>(drifts.size()));
    const double dev_se = se > 0.0 ? std::abs(mean - analytic) / se : 0.0;
    const bool rejected = dev_se > 4.0;

    json j = {{"seed", cfg.seed},
              {"position", json::parse(g3m::univ3::position_report_json(pos, 1.0, 1.0))},
              {"replication_max_in_range_gap", rep.max_in_range_gap},
              {"replication_in_range_samples", rep.in_range_samples},
              {"recentered_drift_mc", mean},
              {"recentered_drift_analytic", analytic},
              {"standard_error", se},
              {"deviation_in_se", dev_se},
              {"rejected", rejected}};
    if (rep.first_exit_time) j["replication_first_exit_time"] = *rep.first_exit_time;
    open_out(fs::path(cfg.out_dir) / "v3_report.json") << j.dump(2) << "\n";

    std::cout << "v3: replication gap (in range) = " << g3m::csv::fmt(rep.max_in_range_gap)
              << " over " << rep.in_range_samples << " samples\n"
              << "  recentered drift = " << g3m::csv::fmt(mean) << " vs analytic "
              << g3m::csv::fmt(analytic) << " (" << g3m::csv::fmt(dev_se) << " SE)\n"
              << (rejected ? "  REJECTED at 4 SE\n" : "  consistent at 4 SE\n");
    const bool replication_ok = rep.max_in_range_gap <= 1e-10;
    return (!rejected && replication_ok) ? kOk : kVerificationFailure;
}

int cmd_analyze(const ScenarioConfig& cfg, std::vector<std::string> inputs) {
    std::vector<std::string> files;
    for (const auto& input : inputs) {
        if (fs::is_directory(input)) {
            for (const auto& entry : fs::directory_iterator(input))
                if (entry.path().extension() == ".csv") files.push_back(entry.path().string());
        } else if (fs::exists(input)) {
            files.push_back(input);
        } else {
            throw io_error("panel input '" + input + "' does not exist");
        }
    }
    std::sort(files.begin(), files.end());

    const auto panel = g3m::analytics::load_panel(files, cfg.panel);
    const auto metrics = g3m::analytics::compute_metrics(panel, cfg.panel);

    ensure_dir(cfg.out_dir);
    {
        auto os = open_out(fs::path(cfg.out_dir) / "quartiles.csv");
        g3m::analytics::write_quartiles_csv(metrics, os);
    }
    {
        std::vector<int> lags;
        for (int lag = 24; lag <= 504; lag += 24) lags.push_back(lag);
        auto os = open_out(fs::path(cfg.out_dir) / "autocorr.csv");
        g3m::analytics::write_autocorr_csv(metrics, lags, os);
    }
    {
        auto temporal = g3m::analytics::fee_il_correlation(
            metrics, g3m::analytics::CorrelationMode::temporal);
        auto cross = g3m::analytics::fee_il_correlation(
            metrics, g3m::analytics::CorrelationMode::cross_sectional);
        auto os = open_out(fs::path(cfg.out_dir) / "corr_hist.csv");
        os << "pool_or_time,coefficient\n";
        for (size_t i = 0; i < temporal.labels.size(); ++i)
            os << temporal.labels[i] << ',' << g3m::csv::fmt(temporal.coefficients[i]) << "\n";
        for (size_t i = 0; i < cross.labels.size(); ++i)
            os << cross.labels[i] << ',' << g3m::csv::fmt(cross.coefficients[i]) << "\n";
    }

    std::cout << "analyze: " << panel.pools.size() << " pools, " << panel.report.records_total
              << " records (" << panel.report.records_dropped_tvl << " below TVL floor, "
              << panel.report.gaps_forward_filled << " hours forward-filled, "
              << panel.report.segment_breaks << " window restarts)\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric-mean market maker simulation and analytics"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    std::optional<std::uint64_t> seed_flag;
    std::optional<size_t> paths_flag;
    std::optional<std::string> out_flag;
    std::optional<double> fee_flag;
    bool print_config = false;
    app.add_option("--config", config_path, "JSON scenario config");
    app.add_option("--seed", seed_flag, "root RNG seed (overrides config)");
    app.add_option("--paths", paths_flag, "Monte Carlo path count (overrides config)");
    app.add_option("--out-dir", out_flag, "output directory (overrides config)");
    app.add_option("--fee", fee_flag, "pool fee (overrides config)");
    app.add_flag("--print-config", print_config, "print the resolved config and exit");

    auto* sim = app.add_subcommand("simulate", "arbitraged pool simulation with bound checks");
    auto* il = app.add_subcommand("il", "Monte Carlo impermanent-loss verification");
    auto* v3 = app.add_subcommand("v3", "concentrated-liquidity identities and drift");
    auto* analyze = app.add_subcommand("analyze", "pool-panel metrics from CSV files");
    std::vector<std::string> panel_inputs;
    analyze->add_option("inputs", panel_inputs, "panel CSV files or directories");

    CLI11_PARSE(app, argc, argv);

    try {
        ScenarioConfig cfg = load_config(config_path);
        if (seed_flag) cfg.seed = *seed_flag;
        if (paths_flag) cfg.paths = *paths_flag;
        if (out_flag) cfg.out_dir = *out_flag;
        if (fee_flag) cfg.fee = *fee_flag;

        if (print_config) {
            std::cout << config_to_json(cfg).dump(2) << "\n";
            return kOk;
        }
        if (sim->parsed()) return cmd_simulate(cfg);
        if (il->parsed()) return cmd_il(cfg);
        if (v3->parsed()) return cmd_v3(cfg);
        if (analyze->parsed()) return cmd_analyze(cfg, panel_inputs);
        return kConfigError;
    } catch (const g3m::bound_violation& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return kVerificationFailure;
    } catch (const io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kVerificationFailure;
    }
}
