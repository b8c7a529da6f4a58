#include "tceq/tracking.hpp"

#include <cmath>
#include <stdexcept>

#include "tceq/gridfn.hpp"

namespace tceq {

double PiecewiseConstant::operator()(double t) const {
    if (values.empty()) throw std::invalid_argument("piecewise coefficient has no values");
    if (values.size() != breaks.size() + 1) {
        throw std::invalid_argument("piecewise coefficient needs breaks.size()+1 values");
    }
    std::size_t i = 0;
    while (i < breaks.size() && t >= breaks[i]) ++i;
    return values[i];
}

void TrackingProblem::validate() const {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (!(lambda_cost > 0.0)) throw std::invalid_argument("lambda_cost must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (!std::isfinite(x0)) throw std::invalid_argument("x0 must be finite");
    for (double v : sigma.values) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("sigma must be >= 0");
    }
    for (const auto* pc : {&sigma, &k0, &k1}) {
        if (pc->values.size() != pc->breaks.size() + 1) {
            throw std::invalid_argument("piecewise coefficient needs breaks.size()+1 values");
        }
        for (std::size_t i = 1; i < pc->breaks.size(); ++i) {
            if (!(pc->breaks[i] > pc->breaks[i - 1])) {
                throw std::invalid_argument("breakpoints must be ascending");
            }
        }
    }
}

void TrackingProblem::check_grid(std::size_t n_steps) const {
    const double h = horizon / static_cast<double>(n_steps);
    for (const auto* pc : {&sigma, &k0, &k1}) {
        for (double br : pc->breaks) {
            const double ratio = br / h;
            if (std::abs(ratio - std::round(ratio)) > 1e-9) {
                throw std::invalid_argument("piecewise breakpoints must lie on the solver grid");
            }
        }
    }
}

TrackingSolution solve_tracking(const TrackingProblem& prob, std::size_t n_steps) {
    prob.validate();
    if (n_steps < 4) throw std::invalid_argument("n_steps must be at least 4");
    prob.check_grid(n_steps);

    const std::size_t N = n_steps;
    const double T = prob.horizon;
    const double h = T / static_cast<double>(N);
    const double gl = prob.gamma / prob.lambda_cost;

    TrackingSolution sol;
    sol.step = h;
    sol.grid.resize(N + 1);
    for (std::size_t k = 0; k <= N; ++k) sol.grid[k] = static_cast<double>(k) * T / static_cast<double>(N);
    sol.grid[N] = T;

    // per-cell coefficient values (sampled at cell midpoints, constant per cell)
    std::vector<double> s2(N), c_k0(N), c_k1(N);
    for (std::size_t k = 0; k < N; ++k) {
        const double tm = (static_cast<double>(k) + 0.5) * h;
        const double sg = prob.sigma(tm);
        s2[k] = sg * sg;
        c_k0[k] = prob.k0(tm);
        c_k1[k] = prob.k1(tm);
    }

    // c' = c^2 - (gamma/lambda) sigma^2, c(T) = 0, backward RK4
    sol.c.assign(N + 1, 0.0);
    double c = 0.0;
    for (std::size_t k = N; k-- > 0;) {
        const double q = gl * s2[k];
        const double k1 = c * c - q;
        const double c2 = c - 0.5 * h * k1;
        const double k2 = c2 * c2 - q;
        const double c3 = c - 0.5 * h * k2;
        const double k3 = c3 * c3 - q;
        const double c4 = c - h * k3;
        const double k4 = c4 * c4 - q;
        c -= h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
        if (!std::isfinite(c)) throw std::runtime_error("non-finite trading speed");
        sol.c[k] = c;
    }

    // cum_c with the per-cell one-sided derivative c' = c^2 - q
    sol.cum_c.assign(N + 1, 0.0);
    for (std::size_t k = 0; k < N; ++k) {
        const double q = gl * s2[k];
        const double d0 = sol.c[k] * sol.c[k] - q;
        const double d1 = sol.c[k + 1] * sol.c[k + 1] - q;
        sol.cum_c[k + 1] = sol.cum_c[k] + 0.5 * h * (sol.c[k] + sol.c[k + 1]) - h * h / 12.0 * (d1 - d0);
    }

    // xi0(t) = (gamma/lambda) e^{K(t)} int_t^T e^{-K(s)} sigma^2 k0 ds (xi1 alike),
    // per-cell trapezoid of the weight since sigma^2 k is constant on each cell
    sol.xi0.assign(N + 1, 0.0);
    sol.xi1.assign(N + 1, 0.0);
    double acc0 = 0.0, acc1 = 0.0;
    for (std::size_t k = N; k-- > 0;) {
        const double w0 = std::exp(-sol.cum_c[k]);
        const double w1 = std::exp(-sol.cum_c[k + 1]);
        const double cell = 0.5 * h * (w0 + w1);
        acc0 += cell * s2[k] * c_k0[k];
        acc1 += cell * s2[k] * c_k1[k];
        sol.xi0[k] = gl * std::exp(sol.cum_c[k]) * acc0;
        sol.xi1[k] = gl * std::exp(sol.cum_c[k]) * acc1;
    }
    return sol;
}

double signal(const TrackingSolution& sol, double t, double w) {
    const double T = sol.grid.back();
    if (!(t >= 0.0 && t <= T)) throw std::invalid_argument("t outside [0, T]");
    const std::size_t N = sol.grid.size() - 1;
    std::size_t k = static_cast<std::size_t>(t / sol.step);
    if (k >= N) return sol.xi0[N] + sol.xi1[N] * w;
    const double s = (t - sol.grid[k]) / sol.step;
    const double x0 = sol.xi0[k] + s * (sol.xi0[k + 1] - sol.xi0[k]);
    const double x1 = sol.xi1[k] + s * (sol.xi1[k + 1] - sol.xi1[k]);
    return x0 + x1 * w;
}

TrackingPath optimal_path(const TrackingProblem& prob, const TrackingSolution& sol,
                          std::span<const double> brownian) {
    if (brownian.size() != sol.grid.size()) {
        throw std::invalid_argument("brownian path must be sampled on the solver grid");
    }
    const std::size_t N = sol.grid.size() - 1;
    const double h = sol.step;

    TrackingPath out;
    out.position.resize(N + 1);
    out.rate.resize(N + 1);
    out.position[0] = prob.x0;
    for (std::size_t k = 0; k <= N; ++k) {
        if (k > 0) {
            const double decay = std::exp(-(sol.cum_c[k] - sol.cum_c[k - 1]));
            const double g0 = sol.xi0[k - 1] + sol.xi1[k - 1] * brownian[k - 1];
            const double g1 = sol.xi0[k] + sol.xi1[k] * brownian[k];
            out.position[k] = decay * out.position[k - 1] + 0.5 * h * (decay * g0 + g1);
        }
        const double xb = sol.xi0[k] + sol.xi1[k] * brownian[k];
        out.rate[k] = xb - sol.c[k] * out.position[k];
    }
    return out;
}

double DpOracle::value(std::size_t node, double phi, double w) const {
    return 0.5 * P[node] * phi * phi + (q0[node] + q1[node] * w) * phi + r0[node] +
           r1[node] * w + 0.5 * r2[node] * w * w;
}

DpOracle dp_oracle(const TrackingProblem& prob, std::size_t n_steps) {
    prob.validate();
    if (n_steps < 4) throw std::invalid_argument("n_steps must be at least 4");
    prob.check_grid(n_steps);

    const std::size_t n = n_steps;
    const double T = prob.horizon;
    const double dt = T / static_cast<double>(n);
    const double lam = prob.lambda_cost;

    DpOracle d;
    d.grid.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) d.grid[k] = static_cast<double>(k) * T / static_cast<double>(n);
    d.kappa.assign(n, 0.0);
    d.beta_w.assign(n, 0.0);
    d.alpha.assign(n, 0.0);
    d.P.assign(n + 1, 0.0);
    d.q0.assign(n + 1, 0.0);
    d.q1.assign(n + 1, 0.0);
    d.r0.assign(n + 1, 0.0);
    d.r1.assign(n + 1, 0.0);
    d.r2.assign(n + 1, 0.0);

    for (std::size_t k = n; k-- > 0;) {
        const double tm = (static_cast<double>(k) + 0.5) * dt;
        const double sg = prob.sigma(tm);
        const double s2 = sg * sg;
        const double k0 = prob.k0(tm);
        const double k1 = prob.k1(tm);

        const double P1 = d.P[k + 1], Q0 = d.q0[k + 1], Q1 = d.q1[k + 1];
        const double M = lam + P1 * dt;

        d.kappa[k] = -P1 / M;
        d.beta_w[k] = -Q1 / M;
        d.alpha[k] = -Q0 / M;

        const double gs = prob.gamma * s2 * dt;
        d.P[k] = gs + P1 * lam / M;
        d.q0[k] = -gs * k0 + lam / M * Q0;
        d.q1[k] = -gs * k1 + lam / M * Q1;
        // E_Z[r_{k+1}(w + sqrt(dt) Z)] adds r2*dt/2 from the Gaussian second moment
        d.r0[k] = 0.5 * gs * k0 * k0 - dt * Q0 * Q0 / (2.0 * M) + d.r0[k + 1] + 0.5 * d.r2[k + 1] * dt;
        d.r1[k] = gs * k0 * k1 - dt * Q0 * Q1 / M + d.r1[k + 1];
        d.r2[k] = gs * k1 * k1 - dt * Q1 * Q1 / M + d.r2[k + 1];
    }
    return d;
}

}  // namespace tceq
