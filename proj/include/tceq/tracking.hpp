#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Single-agent LQ tracking: minimise E int_0^T (gamma sigma^2/2 (phi - xi)^2
// + lambda/2 phidot^2) dt for a target xi_t = k0(t) + k1(t) W_t and
// deterministic volatility. Solved by the scalar Riccati equation for the
// trading speed c, the discounted signal xi_bar, and the feedback
// phidot = xi_bar - c phi. A discrete dynamic-programming recursion serves
// as an independent oracle.
namespace tceq {

// piecewise-constant deterministic coefficient on [0, T]
struct PiecewiseConstant {
    std::vector<double> breaks;  // ascending interior breakpoints
    std::vector<double> values;  // breaks.size() + 1 piece values

    double operator()(double t) const;
    static PiecewiseConstant constant(double v) { return {{}, {v}}; }
};

struct TrackingProblem {
    double gamma = 1.0;
    double lambda_cost = 1.0;
    double x0 = 0.0;
    double horizon = 1.0;
    PiecewiseConstant sigma = PiecewiseConstant::constant(1.0);  // sigma(t) >= 0
    PiecewiseConstant k0 = PiecewiseConstant::constant(0.0);
    PiecewiseConstant k1 = PiecewiseConstant::constant(0.0);

    void validate() const;
    // all breakpoints must land on nodes of an n-step uniform grid
    void check_grid(std::size_t n_steps) const;
};

struct TrackingSolution {
    std::vector<double> grid;   // uniform nodes
    std::vector<double> c;      // trading speed, c(T) = 0
    std::vector<double> cum_c;  // int_0^t c
    std::vector<double> xi0;    // signal: xi_bar(t, w) = xi0(t) + xi1(t) w
    std::vector<double> xi1;
    double step = 0.0;
};

// c by backward RK4 (sigma constant per cell), signal by integrating-factor
// quadrature of its explicit formula.
TrackingSolution solve_tracking(const TrackingProblem& prob, std::size_t n_steps);

// xi_bar(t, w); linear interpolation between nodes.
double signal(const TrackingSolution& sol, double t, double w);

struct TrackingPath {
    std::vector<double> position;
    std::vector<double> rate;
};

// Positions along a Brownian path sampled on the solver grid, advanced with
// the exact integrating factor of the linear feedback ODE.
TrackingPath optimal_path(const TrackingProblem& prob, const TrackingSolution& sol,
                          std::span<const double> brownian);

// Discrete-time LQ recursion: value V_k(phi, w) = P/2 phi^2 + (q0 + q1 w) phi
// + r0 + r1 w + r2/2 w^2, feedback u_k = alpha_k + beta_w_k w + kappa_k phi.
// Uses exact Gaussian moments, no sampling.
struct DpOracle {
    std::vector<double> grid;  // n+1 nodes
    std::vector<double> kappa, beta_w, alpha;            // size n
    std::vector<double> P, q0, q1, r0, r1, r2;           // size n+1
    double value(std::size_t node, double phi, double w) const;
};

DpOracle dp_oracle(const TrackingProblem& prob, std::size_t n_steps);

}  // namespace tceq
