#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "tceq/asymptotics.hpp"
#include "tceq/frictionless.hpp"
#include "tceq/params.hpp"
#include "tceq/riccati.hpp"

using namespace tceq;

namespace {

// composite Simpson on [a, b] (independent quadrature oracle for the tests)
double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double acc = f(a) + f(b);
    for (std::size_t k = 1; k < n; ++k) {
        acc += f(a + static_cast<double>(k) * h) * (k % 2 == 0 ? 2.0 : 4.0);
    }
    return acc * h / 3.0;
}

ModelParams eps_family(double eps) {
    ModelParams p = reference_params();
    p.gamma1 = 2.0 + 0.5 * eps;
    p.gamma2 = 2.0 - 0.5 * eps;
    return p;
}

}  // namespace

TEST_CASE("log_cosh: stable evaluation") {
    CHECK(log_cosh(0.0) == 0.0);
    CHECK(log_cosh(1.0) == doctest::Approx(std::log(std::cosh(1.0))).epsilon(1e-15));
    CHECK(log_cosh(-3.0) == log_cosh(3.0));
    CHECK(log_cosh(800.0) == doctest::Approx(800.0 - std::log(2.0)).epsilon(1e-15));
    CHECK(std::isfinite(log_cosh(1e8)));
}

TEST_CASE("leading order: frozen values at the symmetric reference set") {
    const AsymptoticKit kit(reference_params());
    CHECK(kit.F0(0.0) == doctest::Approx(-1.2563669098108796).epsilon(1e-14));
    CHECK(kit.E0(0.0) == doctest::Approx(-0.6281834549054398).epsilon(1e-14));
    CHECK(kit.D0(0.0) == doctest::Approx(0.6281834549054398).epsilon(1e-14));
    CHECK(log_cosh(std::sqrt(2.0)) == doctest::Approx(0.7784912985576697).epsilon(1e-14));
    CHECK(kit.F0(1.0) == 0.0);
    CHECK(kit.E0(1.0) == 0.0);
    CHECK(kit.D0(1.0) == 0.0);
}

TEST_CASE("small-horizon limit: F0(0) ~ -delta^2 T") {
    ModelParams p = reference_params();
    p.horizon = 1e-3;
    const AsymptoticKit kit(p);
    const DerivedScalars d = derive(p);
    const double approx = -d.delta * d.delta * p.horizon;
    CHECK(std::abs(kit.F0(0.0) - approx) <=
          std::pow(d.delta, 4.0) * std::pow(p.horizon, 3.0));
}

TEST_CASE("first order: B1/C1 = beta/a and terminal zeros") {
    const ModelParams p = eps_family(-0.1);
    const AsymptoticKit kit(p);
    for (double t : {0.0, 0.3, 0.77}) {
        CHECK(kit.B1(t) / kit.C1(t) == doctest::Approx(p.beta / p.a).epsilon(1e-13));
    }
    CHECK(kit.B1(p.horizon) == 0.0);
    CHECK(kit.C1(p.horizon) == 0.0);
    CHECK(kit.A1(p.horizon) == 0.0);
}

TEST_CASE("tanh workhorse identities via quadrature") {
    const ModelParams p = reference_params();
    const AsymptoticKit kit(p);
    const DerivedScalars d = derive(p);
    const double T = p.horizon;
    const double d2 = d.delta * d.delta;

    for (double t : {0.0, 0.35, 0.8}) {
        // int_t^T exp(int_t^s F0) ds = -F0(t)/delta^2; the inner integral has
        // the exact antiderivative log cosh(delta (T-.)), so the weight is exact
        const double lhs1 = simpson(
            [&](double s) {
                return std::exp(log_cosh(d.delta * (T - s)) - log_cosh(d.delta * (T - t)));
            },
            t, T, 4096);
        CHECK(std::abs(lhs1 - (-kit.F0(t) / d2)) <= 1e-10);

        // int_t^T F0^2 ds = delta^2 (T - t) + F0(t)
        const double lhs2 = simpson([&](double s) { return kit.F0(s) * kit.F0(s); }, t, T, 4096);
        CHECK(std::abs(lhs2 - (d2 * (T - t) + kit.F0(t))) <= 1e-10);

        // int_t^T F0 ds = -log cosh(delta (T-t)); F0 <= 0 forces the sign
        const double lhs3 = simpson([&](double s) { return kit.F0(s); }, t, T, 4096);
        CHECK(std::abs(lhs3 - (-log_cosh(d.delta * (T - t)))) <= 1e-10);
        CHECK(lhs3 <= 0.0);
    }
}

TEST_CASE("first-order expansions have O(eps^2) remainders") {
    std::vector<double> eps_list{0.04, 0.02, 0.01};
    for (double sign : {1.0, -1.0}) {
        std::vector<double> ka, kb, kc;
        for (double e : eps_list) {
            const ModelParams p = eps_family(sign * e);
            const RiccatiSolution sol = solve_direct(p, 4096, true);
            const AsymptoticKit kit(p);
            double ea = 0.0, eb = 0.0, ec = 0.0;
            for (std::size_t k = 0; k < sol.grid.size(); ++k) {
                const double t = sol.grid[k];
                ea = std::max(ea, std::abs(sol.coeff(Coeff::A)[k] - kit.A1(t)));
                eb = std::max(eb, std::abs(sol.coeff(Coeff::B)[k] - kit.B1(t)));
                ec = std::max(ec, std::abs(sol.coeff(Coeff::C)[k] - kit.C1(t)));
            }
            ka.push_back(ea / (e * e));
            kb.push_back(eb / (e * e));
            kc.push_back(ec / (e * e));
        }
        for (std::size_t i = 0; i + 1 < eps_list.size(); ++i) {
            CHECK(ka[i] / ka[i + 1] == doctest::Approx(1.0).epsilon(3.0));
            CHECK(kb[i] / kb[i + 1] == doctest::Approx(1.0).epsilon(3.0));
            CHECK(kc[i] / kc[i + 1] == doctest::Approx(1.0).epsilon(3.0));
            CHECK(ka[i] <= 1.0);
            CHECK(kb[i] <= 1.0);
            CHECK(kc[i] <= 1.0);
        }
    }
}

TEST_CASE("illiquidity discount: zero at eps = 0, positive for gamma2 > gamma1") {
    const ModelParams sym = reference_params();
    CHECK(illiquidity_discount(sym, DiscountMode::leading) == 0.0);
    const RiccatiSolution sol = solve_direct(sym, 1024);
    CHECK(std::abs(illiquidity_discount(sym, DiscountMode::numeric, &sol)) <= 1e-10);

    const ModelParams p = perturbed_reference_params();
    CHECK(illiquidity_discount(p, DiscountMode::leading) > 0.0);
    CHECK_THROWS_AS(illiquidity_discount(p, DiscountMode::numeric), std::invalid_argument);
}

TEST_CASE("leading discount is increasing and concave in lambda") {
    const std::vector<double> lams{0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> vals;
    for (double lam : lams) {
        ModelParams p = perturbed_reference_params();
        p.lambda_cost = lam;
        vals.push_back(illiquidity_discount(p, DiscountMode::leading));
    }
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) CHECK(vals[i + 1] > vals[i]);
    std::vector<double> slopes;
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        slopes.push_back((vals[i + 1] - vals[i]) / (lams[i + 1] - lams[i]));
    }
    for (std::size_t i = 0; i + 1 < slopes.size(); ++i) CHECK(slopes[i + 1] <= slopes[i]);
}

TEST_CASE("discount gap to gamma2*s*a*T*B(0) stays bounded over a horizon sweep") {
    std::vector<double> discounts, scaled;
    for (double T : {1.0, 2.0, 4.0, 8.0}) {
        ModelParams p = perturbed_reference_params();
        p.horizon = T;
        const std::size_t n = static_cast<std::size_t>(4096 * T);
        const RiccatiSolution sol = solve_direct(p, n, true);
        const double disc = illiquidity_discount(p, DiscountMode::numeric, &sol);
        const double other = p.gamma2 * p.supply * p.a * T * sol.coeff(Coeff::B).front();
        CHECK(std::abs(disc - other) <= 0.1);
        discounts.push_back(disc);
        scaled.push_back(other);
    }
    // both quantities grow roughly linearly in T
    for (std::size_t i = 0; i + 1 < discounts.size(); ++i) {
        CHECK(discounts[i + 1] / discounts[i] > 1.5);
        CHECK(discounts[i + 1] / discounts[i] < 3.0);
        CHECK(scaled[i + 1] / scaled[i] > 1.5);
        CHECK(scaled[i + 1] / scaled[i] < 3.0);
    }
}

TEST_CASE("liquidity premium: first order vanishes identically at eps = 0") {
    const ModelParams p = reference_params();
    for (double t : {0.0, 0.4}) {
        for (double w : {-1.0, 0.5}) {
            const double phibar = frictionless_position(p, 1, t, w);
            CHECK(liquidity_premium_first_order(p, t, w, phibar) == 0.0);
        }
    }
}
