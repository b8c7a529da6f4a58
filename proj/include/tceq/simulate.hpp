#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tceq/params.hpp"
#include "tceq/riccati.hpp"

// Equilibrium sample paths driven by a Riccati solution, plus the pathwise
// FBSDE consistency checks and the trading-volume diagnostics.
namespace tceq {

struct PathConfig {
    std::size_t n_paths = 10000;
    std::size_t n_steps = 1024;     // must divide the Riccati grid
    std::uint64_t seed = 0;
    std::size_t record_stride = 8;  // thinning factor for the stored series
};

// Per-node accumulators over all paths at full simulation resolution.
struct NodeStats {
    std::vector<double> sum_dev;       // phi1 - phibar1
    std::vector<double> sum_dev2;
    std::vector<double> sum_rate;
    std::vector<double> sum_rate2;
    std::vector<double> sum_dev_rate;
    std::vector<double> sum_abs_rate;
    std::vector<double> sum_premium;
};

struct PathEnsemble {
    ModelParams params;
    PathConfig config;

    // recorded series, path-major: value(p, j) = series[p * n_rec + j]
    std::vector<double> times;  // recorded times including 0 and T
    std::size_t n_paths = 0;
    std::size_t n_rec = 0;
    std::vector<double> W, phi1, rate1, S, mu, premium;

    double at(const std::vector<double>& v, std::size_t p, std::size_t j) const {
        return v[p * n_rec + j];
    }
    // market clearing is definitional: agent 2 is never simulated separately
    double phi2(std::size_t p, std::size_t j) const { return params.supply - at(phi1, p, j); }
    double rate2(std::size_t p, std::size_t j) const { return -at(rate1, p, j); }
    double sbar(std::size_t p, std::size_t j) const;
    double phibar1(std::size_t p, std::size_t j) const;

    // full-resolution summaries accumulated during simulation
    std::vector<double> sim_times;  // the simulation grid
    NodeStats node_stats;
    double max_terminal_gap = 0.0;    // max_p |S_T - (bT + a W_T)|
    double max_clearing_gap = 0.0;    // max fp round-off of (s - phi1) + phi1 - s
    double max_drift_residual = 0.0;  // pathwise FBSDE drift-identity residual
    double qv_sum = 0.0;              // sum of squared increments of phi1 - phibar1
};

PathEnsemble simulate(const RiccatiSolution& sol, const ModelParams& p, const PathConfig& cfg);

// Max over the recorded ensemble of |(A' + B' W + C' phi1 + C rate1) + mu_bar - mu|
// with the coefficient derivatives taken from the Riccati right-hand sides.
double drift_identity_residual(const RiccatiSolution& sol, const ModelParams& p,
                               const PathEnsemble& ens);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    std::size_t n = 0;
};

// OLS of rate1 on (phi1 - phibar1) at one full-resolution node.
SlopeFit rate_regression_at(const PathEnsemble& ens, std::size_t sim_node);

struct VolumeBucket {
    double t_center;
    double slope;
    double slope_se;
    double f0_ref;  // F(t;0) at the bucket centre
    std::size_t n_obs;
};

struct VolumeReport {
    std::vector<VolumeBucket> buckets;
    double qv_rate;    // quadratic variation of phi1 - phibar1 per unit time
    double qv_target;  // (beta/a)^2
    std::vector<std::pair<double, double>> abs_rate_autocorr;  // (lag, correlation)
    double mean_abs_rate_mid;       // at t ~ T/2
    double mean_abs_rate_near_end;  // max over t in [0.99 T, T]
};

VolumeReport volume_diagnostics(const PathEnsemble& ens, const RiccatiSolution& sol,
                                std::size_t n_buckets = 10);

// deterministic mean premium E[mu_t - mu_bar] from the mean-position ODE
double expected_premium(const RiccatiSolution& sol, const ModelParams& p, double t);

// CSV export: path_id,t,W,phi1,phidot1,S,mu,premium at the recorded times.
void write_paths_csv(const PathEnsemble& ens, std::ostream& os);

}  // namespace tceq
