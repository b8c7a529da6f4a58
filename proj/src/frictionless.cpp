#include "tceq/frictionless.hpp"

#include <cmath>
#include <stdexcept>

#include "tceq/gridfn.hpp"
#include "tceq/rng.hpp"

namespace tceq {

namespace {

void check_time(const ModelParams& p, double t) {
    if (!(t >= 0.0 && t <= p.horizon)) {
        throw std::invalid_argument("t outside [0, T]");
    }
}

}  // namespace

double bachelier_price(const ModelParams& p, double t, double w) {
    check_time(p, t);
    const DerivedScalars d = derive(p);
    // grouped so that the terminal condition b*T + a*w holds exactly at t = T
    return p.b * p.horizon + d.gamma_bar * p.supply * p.a * p.a * (t - p.horizon) + p.a * w;
}

double bachelier_drift(const ModelParams& p) {
    const DerivedScalars d = derive(p);
    return d.gamma_bar * p.supply * p.a * p.a;
}

double bachelier_vol(const ModelParams& p) {
    p.validate();
    return p.a;
}

double initial_price(const ModelParams& p) {
    return bachelier_price(p, 0.0, 0.0);
}

double frictionless_position(const ModelParams& p, int agent, double t, double w) {
    check_time(p, t);
    if (agent != 1 && agent != 2) {
        throw std::invalid_argument("agent must be 1 or 2");
    }
    const double phi1 = p.gamma2 * p.supply / (p.gamma1 + p.gamma2) - (p.beta / p.a) * w;
    return agent == 1 ? phi1 : p.supply - phi1;
}

double laplace_price_exact(const ModelParams& p, double t, double w) {
    check_time(p, t);
    const DerivedScalars d = derive(p);
    const double gs = d.gamma_bar * p.supply;
    if (gs == 0.0) {
        throw std::invalid_argument("supply must be nonzero for the Laplace price");
    }
    const double terminal_mean = p.b * p.horizon + p.a * w;
    // log E_t[exp(-2*gs*S_T)] = -2*gs*mean + 2*gs^2*a^2*(T-t)
    const double log_laplace = -2.0 * gs * terminal_mean + 2.0 * gs * gs * p.a * p.a * (p.horizon - t);
    return -log_laplace / (2.0 * gs);
}

McEstimate laplace_price_mc(const ModelParams& p, double t, double w,
                            std::size_t n_samples, std::uint64_t seed) {
    check_time(p, t);
    if (n_samples < 2) {
        throw std::invalid_argument("n_samples must be at least 2");
    }
    const DerivedScalars d = derive(p);
    const double gs = d.gamma_bar * p.supply;
    if (gs == 0.0) {
        throw std::invalid_argument("supply must be nonzero for the Laplace price");
    }
    const double scale = 2.0 * std::abs(gs) * p.a * std::sqrt(p.horizon - t);
    if (scale > 30.0) {
        throw std::domain_error("Laplace Monte Carlo refused: exponent scale exceeds 30");
    }

    // exponent: -2*gs*(bT + a*w) + u_i with u_i = -2*gs*a*sqrt(T-t)*Z_i
    const double coef = -2.0 * gs * p.a * std::sqrt(p.horizon - t);
    const CounterRng rng(seed, 0);

    double umax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_samples; ++i) {
        umax = std::max(umax, coef * rng.normal(i));
    }
    KahanSum sum, sum2;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double y = std::exp(coef * rng.normal(i) - umax);
        sum.add(y);
        sum2.add(y * y);
    }
    const double n = static_cast<double>(n_samples);
    const double mean = sum.value() / n;
    const double var = std::max(0.0, (sum2.value() - n * mean * mean) / (n - 1.0));

    McEstimate est;
    est.n_samples = n_samples;
    // price = (bT + a*w) - (umax + log mean)/(2*gs)
    est.value = p.b * p.horizon + p.a * w - (umax + std::log(mean)) / (2.0 * gs);
    // delta method: se(log mean)/|2*gs|, invariant under the umax shift
    est.std_error = std::sqrt(var / n) / mean / (2.0 * std::abs(gs));
    return est;
}

}  // namespace tceq
