#include "tceq/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include "tceq/frictionless.hpp"

namespace tceq {

double log_cosh(double x) {
    const double ax = std::abs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

AsymptoticKit::AsymptoticKit(const ModelParams& p) : p_(p), d_(derive(p)) {}

double AsymptoticKit::check(double t) const {
    if (!(t >= 0.0 && t <= p_.horizon)) throw std::invalid_argument("t outside [0, T]");
    return t;
}

double AsymptoticKit::F0(double t) const {
    check(t);
    return -d_.delta * std::tanh(d_.delta * (p_.horizon - t));
}

double AsymptoticKit::E0(double t) const { return p_.beta / p_.a * F0(t); }

double AsymptoticKit::D0(double t) const {
    return -p_.gamma2 * p_.supply / (p_.gamma1 + p_.gamma2) * F0(t);
}

double AsymptoticKit::B1(double t) const {
    return d_.eps * p_.beta * p_.a / (2.0 * d_.delta * d_.delta) * F0(t);
}

double AsymptoticKit::C1(double t) const {
    return d_.eps * p_.a * p_.a / (2.0 * d_.delta * d_.delta) * F0(t);
}

double AsymptoticKit::A1(double t) const {
    check(t);
    const double g = p_.gamma1 + p_.gamma2;
    const double g2s = p_.gamma2 * p_.supply;
    return -d_.eps * g2s * p_.a * p_.a / (2.0 * g * d_.delta * d_.delta) * F0(t) +
           d_.eps * g2s * p_.beta * p_.lambda_cost / g * log_cosh(d_.delta * (p_.horizon - t));
}

AsymptoticKit leading_order(const ModelParams& p) { return AsymptoticKit(p); }

double illiquidity_discount(const ModelParams& p, DiscountMode mode,
                            const RiccatiSolution* sol) {
    p.validate();
    if (mode == DiscountMode::leading) {
        const double eps = p.gamma1 - p.gamma2;
        return -eps * p.gamma2 * p.supply / std::sqrt(2.0 * (p.gamma1 + p.gamma2)) * p.horizon *
               p.beta * p.a * std::sqrt(p.lambda_cost);
    }
    if (sol == nullptr) {
        throw std::invalid_argument("numeric discount mode requires a Riccati solution");
    }
    return -(sol->coeff(Coeff::A).front() + sol->coeff(Coeff::C).front() * p.x1);
}

double liquidity_premium_first_order(const ModelParams& p, double t, double w, double phi1) {
    const AsymptoticKit kit(p);
    const double eps = p.gamma1 - p.gamma2;
    const double phibar1 = frictionless_position(p, 1, t, w);
    return 0.5 * eps * p.a * p.a * (phi1 - phibar1) + p.gamma2 * p.supply * p.a * kit.B1(t);
}

}  // namespace tceq
