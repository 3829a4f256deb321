#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace g3m {

// Joint lognormal market: per-asset volatilities, a correlation matrix and
// drifts. mu_fn / sigma_fn optionally override the constant vectors as
// functions of time, sampled at step starts (held constant over each step);
// the correlation matrix stays fixed.
struct CovarianceSpec {
    int n = 0;
    std::vector<double> sigma;  // per sqrt(year)
    std::vector<double> rho;    // n x n row-major correlation
    std::vector<double> mu;     // per year
    std::function<std::vector<double>(double)> mu_fn;
    std::function<std::vector<double>(double)> sigma_fn;

    // Filled by validate_spec.
    std::vector<double> chol_rho;  // lower-triangular factor of rho
    double min_rho_eigenvalue = 0.0;
    bool validated = false;

    double rho_at(int i, int j) const { return rho[static_cast<size_t>(i) * n + j]; }
    // Instantaneous covariance entry rho_ij * sigma_i * sigma_j.
    double cov(int i, int j) const { return rho_at(i, j) * sigma[i] * sigma[j]; }
};

// Checks dimensions, sigma >= 0, symmetry/unit diagonal, and positive
// semi-definiteness of rho (smallest eigenvalue >= -1e-10 * largest, then
// clipped to zero); caches a factor A with A*A^T = rho. Throws
// std::invalid_argument with the offending quantity in the message.
CovarianceSpec validate_spec(CovarianceSpec spec);

// {0, dt, 2dt, ..., horizon}; the last step is shortened when horizon is
// not a multiple of dt.
std::vector<double> make_time_grid(double horizon, double dt);

// One immutable view over a single path: times plus a [time][asset] block.
struct PathView {
    std::span<const double> times;
    std::span<const double> data;
    int n_assets = 0;

    size_t n_times() const { return times.size(); }
    double price(size_t t, int asset) const { return data[t * n_assets + asset]; }
    std::span<const double> prices_at(size_t t) const {
        return data.subspan(t * static_cast<size_t>(n_assets), n_assets);
    }
};

struct PricePathSet {
    std::vector<double> times;
    int n_assets = 0;
    size_t n_paths = 0;
    std::vector<double> prices;  // [path][time][asset]
    CovarianceSpec spec;
    std::uint64_t seed = 0;

    PathView view(size_t path) const {
        size_t block = times.size() * static_cast<size_t>(n_assets);
        return PathView{times, std::span<const double>(prices).subspan(path * block, block),
                        n_assets};
    }
    double price(size_t path, size_t t, int asset) const {
        return prices[(path * times.size() + t) * n_assets + asset];
    }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

// Exact log-space GBM stepping over a fixed grid. Each path owns an
// independent RNG stream derived from (seed, path index), so generation is
// reproducible regardless of which thread or order produces a path.
class PathSampler {
public:
    PathSampler(CovarianceSpec spec, std::vector<double> times, std::uint64_t seed);

    const std::vector<double>& times() const { return times_; }
    int n_assets() const { return spec_.n; }
    const CovarianceSpec& spec() const { return spec_; }
    std::uint64_t seed() const { return seed_; }

    // Calls on_step(step_index, dlog) for every grid step of one path, where
    // dlog[i] is the log-price increment of asset i over that step.
    template <class F>
    void walk(size_t path_index, F&& on_step) const {
        const int n = spec_.n;
        std::mt19937_64 rng(path_seed(path_index));
        std::normal_distribution<double> norm;
        std::vector<double> z(n), dlog(n);
        std::vector<double> drift = drift_;   // mu_i - sigma_i^2/2
        std::vector<double> scale = scale_;   // sigma_i applied to chol rows
        const bool varying = static_cast<bool>(spec_.mu_fn) || static_cast<bool>(spec_.sigma_fn);
        for (size_t s = 0; s + 1 < times_.size(); ++s) {
            const double t = times_[s];
            const double dt = times_[s + 1] - t;
            if (varying) refresh_coefficients(t, drift, scale);
            const double sq = std::sqrt(dt);
            for (int i = 0; i < n; ++i) z[i] = norm(rng);
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                const double* row = spec_.chol_rho.data() + static_cast<size_t>(i) * n;
                for (int j = 0; j <= i; ++j) acc += row[j] * z[j];
                dlog[i] = drift[i] * dt + sq * scale[i] * acc;
            }
            on_step(s, std::span<const double>(dlog));
        }
    }

    // Fills out (n_times * n_assets doubles, [time][asset]) with prices of
    // one path; row 0 is (1,...,1).
    void sample_into(size_t path_index, std::span<double> out) const;

private:
    std::uint64_t path_seed(size_t path_index) const {
        return detail::splitmix64(seed_ ^ detail::splitmix64(0x706174682bULL + path_index));
    }
    void refresh_coefficients(double t, std::vector<double>& drift,
                              std::vector<double>& scale) const;

    CovarianceSpec spec_;
    std::vector<double> times_;
    std::uint64_t seed_;
    std::vector<double> drift_;
    std::vector<double> scale_;
};

// Generates the full set; parallelized across paths, bit-identical to the
// serial order for any thread count.
PricePathSet sample_paths(const CovarianceSpec& spec, double horizon, double dt, size_t n_paths,
                          std::uint64_t seed);

// Columns: path_id,time,asset_0,...,asset_{n-1}
void write_paths_csv(const PricePathSet& paths, std::ostream& os);

}  // namespace g3m
