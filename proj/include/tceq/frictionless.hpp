#pragma once

#include <cstddef>
#include <cstdint>

#include "tceq/params.hpp"

// Frictionless (lambda = 0) Bachelier equilibrium: the baseline against
// which all frictional diagnostics are measured.
namespace tceq {

struct McEstimate {
    double value;
    double std_error;
    std::size_t n_samples;
};

// S_bar(t, w) = (b - gbar*s*a^2)*T + gbar*s*a^2*t + a*w
double bachelier_price(const ModelParams& p, double t, double w);
double bachelier_drift(const ModelParams& p);  // mu_bar = gbar*s*a^2
double bachelier_vol(const ModelParams& p);    // sigma_bar = a
double initial_price(const ModelParams& p);    // (b - gbar*s*a^2)*T

// Agent 1: gamma2*s/(gamma1+gamma2) - (beta/a)*w; agent 2 clears the market.
double frictionless_position(const ModelParams& p, int agent, double t, double w);

// Gaussian closed form of the log-Laplace equilibrium price
// -1/(2*gbar*s) * log E_t[exp(-2*gbar*s*(bT + a W_T))].
double laplace_price_exact(const ModelParams& p, double t, double w);

// Monte Carlo evaluation of the same expectation with log-sum-exp
// stabilisation and a delta-method standard error. Deterministic given the
// seed and independent of any chunking (counter-based draws).
McEstimate laplace_price_mc(const ModelParams& p, double t, double w,
                            std::size_t n_samples, std::uint64_t seed);

}  // namespace tceq
