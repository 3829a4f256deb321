#include "g3m/market.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "g3m/csv.hpp"

namespace g3m {

namespace {

// Cholesky of a PSD matrix that tolerates semi-definite inputs: a column
// whose pivot falls below tol is zeroed out instead of failing.
std::vector<double> semidefinite_cholesky(const std::vector<double>& m, int n, double tol) {
    std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
    for (int j = 0; j < n; ++j) {
        double pivot = m[static_cast<size_t>(j) * n + j];
        for (int k = 0; k < j; ++k) pivot -= a[static_cast<size_t>(j) * n + k] * a[static_cast<size_t>(j) * n + k];
        if (pivot <= tol) {
            for (int i = j; i < n; ++i) a[static_cast<size_t>(i) * n + j] = 0.0;
            continue;
        }
        const double d = std::sqrt(pivot);
        a[static_cast<size_t>(j) * n + j] = d;
        for (int i = j + 1; i < n; ++i) {
            double s = m[static_cast<size_t>(i) * n + j];
            for (int k = 0; k < j; ++k)
                s -= a[static_cast<size_t>(i) * n + k] * a[static_cast<size_t>(j) * n + k];
            a[static_cast<size_t>(i) * n + j] = s / d;
        }
    }
    return a;
}

}  // namespace

CovarianceSpec validate_spec(CovarianceSpec spec) {
    const int n = spec.n;
    if (n < 1) throw std::invalid_argument("CovarianceSpec: asset count must be >= 1");
    if (static_cast<int>(spec.sigma.size()) != n)
        throw std::invalid_argument("CovarianceSpec: sigma size " +
                                    std::to_string(spec.sigma.size()) + " != n " +
                                    std::to_string(n));
    if (spec.mu.empty()) spec.mu.assign(n, 0.0);
    if (static_cast<int>(spec.mu.size()) != n)
        throw std::invalid_argument("CovarianceSpec: mu size " + std::to_string(spec.mu.size()) +
                                    " != n " + std::to_string(n));
    if (spec.rho.size() != static_cast<size_t>(n) * n)
        throw std::invalid_argument("CovarianceSpec: rho must be " + std::to_string(n) + "x" +
                                    std::to_string(n));
    for (int i = 0; i < n; ++i)
        if (!(spec.sigma[i] >= 0.0))
            throw std::invalid_argument("CovarianceSpec: negative volatility sigma[" +
                                        std::to_string(i) + "] = " + csv::fmt(spec.sigma[i]));
    for (int i = 0; i < n; ++i) {
        if (std::abs(spec.rho_at(i, i) - 1.0) > 1e-12)
            throw std::invalid_argument("CovarianceSpec: rho diagonal entry " + std::to_string(i) +
                                        " is " + csv::fmt(spec.rho_at(i, i)) + ", expected 1");
        for (int j = 0; j < i; ++j)
            if (std::abs(spec.rho_at(i, j) - spec.rho_at(j, i)) > 1e-12)
                throw std::invalid_argument("CovarianceSpec: rho not symmetric at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
    }

    Eigen::MatrixXd r(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = spec.rho_at(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("CovarianceSpec: eigenvalue computation failed");
    const double min_eig = es.eigenvalues().minCoeff();
    const double max_eig = es.eigenvalues().maxCoeff();
    spec.min_rho_eigenvalue = min_eig;
    if (min_eig < -1e-10 * std::max(max_eig, 1.0)) {
        std::ostringstream msg;
        msg << "CovarianceSpec: correlation matrix is not positive semi-definite "
               "(smallest eigenvalue "
            << csv::fmt(min_eig) << ")";
        throw std::invalid_argument(msg.str());
    }

    // Negative eigenvalues within tolerance are treated as zero: the
    // semidefinite factorization zeroes the corresponding directions.
    spec.chol_rho = semidefinite_cholesky(spec.rho, n, 64.0 * 1e-16 * std::max(max_eig, 1.0));
    spec.validated = true;
    return spec;
}

std::vector<double> make_time_grid(double horizon, double dt) {
    if (!(horizon > 0.0)) throw std::invalid_argument("time grid: horizon must be > 0");
    if (!(dt > 0.0) || dt > horizon)
        throw std::invalid_argument("time grid: need 0 < dt <= horizon");
    const size_t steps = static_cast<size_t>(std::ceil(horizon / dt - 1e-9));
    std::vector<double> times(steps + 1);
    for (size_t k = 0; k < steps; ++k) times[k] = static_cast<double>(k) * dt;
    times[steps] = horizon;
    if (steps >= 1 && times[steps] - times[steps - 1] < 1e-12 * dt) {
        times.erase(times.begin() + static_cast<std::ptrdiff_t>(steps) - 1);
    }
    return times;
}

PathSampler::PathSampler(CovarianceSpec spec, std::vector<double> times, std::uint64_t seed)
    : spec_(std::move(spec)), times_(std::move(times)), seed_(seed) {
    if (!spec_.validated) spec_ = validate_spec(std::move(spec_));
    if (times_.size() < 2) throw std::invalid_argument("PathSampler: need at least two times");
    if (times_.front() != 0.0) throw std::invalid_argument("PathSampler: grid must start at 0");
    for (size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            throw std::invalid_argument("PathSampler: grid must be strictly increasing");
    drift_.resize(spec_.n);
    scale_.resize(spec_.n);
    for (int i = 0; i < spec_.n; ++i) {
        drift_[i] = spec_.mu[i] - 0.5 * spec_.sigma[i] * spec_.sigma[i];
        scale_[i] = spec_.sigma[i];
    }
}

void PathSampler::refresh_coefficients(double t, std::vector<double>& drift,
                                       std::vector<double>& scale) const {
    std::vector<double> mu = spec_.mu_fn ? spec_.mu_fn(t) : spec_.mu;
    std::vector<double> sigma = spec_.sigma_fn ? spec_.sigma_fn(t) : spec_.sigma;
    if (static_cast<int>(mu.size()) != spec_.n || static_cast<int>(sigma.size()) != spec_.n)
        throw std::invalid_argument("PathSampler: time functional returned wrong dimension");
    for (int i = 0; i < spec_.n; ++i) {
        drift[i] = mu[i] - 0.5 * sigma[i] * sigma[i];
        scale[i] = sigma[i];
    }
}

void PathSampler::sample_into(size_t path_index, std::span<double> out) const {
    const int n = spec_.n;
    const size_t nt = times_.size();
    if (out.size() != nt * static_cast<size_t>(n))
        throw std::invalid_argument("PathSampler: output buffer has wrong size");
    std::vector<double> logs(n, 0.0);
    for (int i = 0; i < n; ++i) out[i] = 1.0;
    walk(path_index, [&](size_t step, std::span<const double> dlog) {
        double* row = out.data() + (step + 1) * n;
        for (int i = 0; i < n; ++i) {
            logs[i] += dlog[i];
            row[i] = std::exp(logs[i]);
        }
    });
}

PricePathSet sample_paths(const CovarianceSpec& spec, double horizon, double dt, size_t n_paths,
                          std::uint64_t seed) {
    PathSampler sampler(spec, make_time_grid(horizon, dt), seed);
    PricePathSet set;
    set.times = sampler.times();
    set.n_assets = sampler.n_assets();
    set.n_paths = n_paths;
    set.spec = sampler.spec();
    set.seed = seed;
    const size_t block = set.times.size() * static_cast<size_t>(set.n_assets);
    set.prices.resize(block * n_paths);

    auto fill_range = [&](size_t lo, size_t hi) {
        for (size_t p = lo; p < hi; ++p)
            sampler.sample_into(p, std::span<double>(set.prices).subspan(p * block, block));
    };
    const unsigned hw = std::thread::hardware_concurrency();
    const size_t n_threads = std::min<size_t>(hw ? hw : 1, n_paths);
    if (n_threads <= 1 || n_paths < 64) {
        fill_range(0, n_paths);
    } else {
        std::vector<std::thread> workers;
        const size_t chunk = (n_paths + n_threads - 1) / n_threads;
        for (size_t t = 0; t < n_threads; ++t) {
            const size_t lo = t * chunk;
            const size_t hi = std::min(n_paths, lo + chunk);
            if (lo >= hi) break;
            workers.emplace_back(fill_range, lo, hi);
        }
        for (auto& w : workers) w.join();
    }
    return set;
}

void write_paths_csv(const PricePathSet& paths, std::ostream& os) {
    os << "path_id,time";
    for (int a = 0; a < paths.n_assets; ++a) os << ",asset_" << a;
    os << "\n";
    for (size_t p = 0; p < paths.n_paths; ++p) {
        for (size_t t = 0; t < paths.times.size(); ++t) {
            os << p << ',' << csv::fmt(paths.times[t]);
            for (int a = 0; a < paths.n_assets; ++a) os << ',' << csv::fmt(paths.price(p, t, a));
            os << "\n";
        }
    }
}

}  // namespace g3m
