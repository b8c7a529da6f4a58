#pragma once

#include "tceq/params.hpp"
#include "tceq/riccati.hpp"

// Closed-form small-eps limits of the Riccati coefficients and the derived
// economic quantities (illiquidity discount, liquidity premium, volatility
// correction). These double as analytic oracles for the numeric solvers.
namespace tceq {

// overflow-safe log(cosh(x))
double log_cosh(double x);

class AsymptoticKit {
public:
    explicit AsymptoticKit(const ModelParams& p);

    // leading order (eps = 0)
    double F0(double t) const;  // -delta tanh(delta (T-t))
    double E0(double t) const;  // (beta/a) F0
    double D0(double t) const;  // -(gamma2 s/(gamma1+gamma2)) F0
    // first order, proportional to eps = gamma1 - gamma2 taken from params
    double B1(double t) const;  // (eps beta a / (2 delta^2)) F0
    double C1(double t) const;  // (eps a^2 / (2 delta^2)) F0
    double A1(double t) const;

    const ModelParams& params() const { return p_; }
    const DerivedScalars& scalars() const { return d_; }

private:
    double check(double t) const;
    ModelParams p_;
    DerivedScalars d_;
};

AsymptoticKit leading_order(const ModelParams& p);

enum class DiscountMode { leading, numeric };

// -(A(0) + C(0) x1) in numeric mode; the displayed large-T leading term
// -(gamma1-gamma2) gamma2 s / sqrt(2 (gamma1+gamma2)) * T beta a sqrt(lambda)
// in leading mode.
double illiquidity_discount(const ModelParams& p, DiscountMode mode,
                            const RiccatiSolution* sol = nullptr);

// (eps/2) a^2 (phi1 - phibar1(t,w)) + gamma2 s a B1(t)
double liquidity_premium_first_order(const ModelParams& p, double t, double w, double phi1);

}  // namespace tceq
