#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "g3m/market.hpp"

namespace g3m::bench {

// Weight vector on the simplex (corners allowed here, unlike pool weights).
void check_weights(std::span<const double> w);

// Discretely rebalanced constant-mix wealth: P_0 = 1,
// P_{t+dt} = P_t * sum_i w_i S_i(t+dt)/S_i(t).
std::vector<double> constant_mix_path(const PathView& path, std::span<const double> w);

// V_t = prod_i (S_i(t)/S_i(0))^{w_i}.
std::vector<double> geometric_mean_path(const PathView& path, std::span<const double> w);

// Buy-and-hold with initial weights w: H_t = sum_i w_i S_i(t)/S_i(0).
std::vector<double> hodl_path(const PathView& path, std::span<const double> w);

// f(w) = w' Sigma w - w' sigma^2, evaluated in the pairwise-difference form
//   f = -1/2 sum_{i,j} w_i w_j (sigma_i^2 + sigma_j^2 - 2 rho_ij sigma_i sigma_j)
// which is algebraically identical on the simplex and non-positive term by
// term, so the result can never round above zero.
double excess_growth_rate(std::span<const double> w, const CovarianceSpec& spec);

// f evaluated at each grid time (constant unless spec.sigma_fn is set).
std::vector<double> excess_growth_series(std::span<const double> times,
                                         std::span<const double> w, const CovarianceSpec& spec);

// I_t = exp(1/2 int_0^t f ds), trapezoid rule over the grid.
std::vector<double> il_factor_from_f(std::span<const double> times, std::span<const double> f);

std::vector<double> impermanent_loss_path(const PathView& path, std::span<const double> w,
                                          const CovarianceSpec& spec);

struct ILDecomposition {
    std::vector<double> times;
    std::vector<double> P;       // constant-mix wealth
    std::vector<double> V;       // geometric mean
    std::vector<double> H;       // buy-and-hold
    std::vector<double> I;       // impermanent loss factor
    std::vector<double> f_path;  // excess growth rate along the grid
};

ILDecomposition decompose(const PathView& path, std::span<const double> w,
                          const CovarianceSpec& spec);

// Columns: time,P,V,H,I
void write_il_csv(const ILDecomposition& d, std::ostream& os);

struct McIlReport {
    size_t n_paths = 0;
    double horizon = 0.0;
    double dt = 0.0;
    double analytic = 0.0;     // 0.5 * f(w) * horizon
    double sample_mean = 0.0;  // mean of log(V_T / P_T)
    double sample_sd = 0.0;
    double standard_error = 0.0;
    double deviation_in_se = 0.0;
    size_t v_le_h_paths = 0;        // paths with V_t <= H_t at every grid point
    size_t v_lt_h_terminal = 0;     // paths with V_T strictly below H_T
    bool rejected = false;          // deviation beyond 4 standard errors
};

// Streaming Monte Carlo check of the impermanent-loss drift; paths are never
// materialized. Statistical rejection is reported in the result, not thrown.
McIlReport mc_verify_il(const CovarianceSpec& spec, std::span<const double> w, double horizon,
                        double dt, size_t n_paths, std::uint64_t seed);

}  // namespace g3m::bench
