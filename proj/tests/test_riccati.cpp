#include <array>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "tceq/gridfn.hpp"
#include "tceq/params.hpp"
#include "tceq/riccati.hpp"
#include "tceq/rng.hpp"

using namespace tceq;

namespace {

// closed forms of the decoupled (eps = 0) solution
double f0_closed(const ModelParams& p, double t) {
    const DerivedScalars d = derive(p);
    return -d.delta * std::tanh(d.delta * (p.horizon - t));
}

// randomized parameter sets that satisfy the existence bound
ModelParams random_valid_params(const CounterRng& rng, std::uint64_t& ctr) {
    for (;;) {
        ModelParams p;
        const double ghat = 0.5 + 2.5 * rng.uniform(ctr++);
        p.lambda_cost = 0.75 + 1.25 * rng.uniform(ctr++);
        p.a = 0.5 + 1.0 * rng.uniform(ctr++);
        p.beta = 0.1 + 0.9 * rng.uniform(ctr++);
        p.horizon = 0.25 + 1.25 * rng.uniform(ctr++);
        p.supply = 0.25 + 1.75 * rng.uniform(ctr++);
        p.b = -1.0 + 2.0 * rng.uniform(ctr++);
        p.gamma1 = ghat;
        p.gamma2 = ghat;
        p.x1 = p.supply * rng.uniform(ctr++);
        const ExistenceReport rep0 = check_existence(p);
        const double eps = (2.0 * rng.uniform(ctr++) - 1.0) * 0.8 *
                           std::min(rep0.bound1, rep0.bound2);
        p.gamma1 = ghat + 0.5 * eps;
        p.gamma2 = ghat - 0.5 * eps;
        if (p.gamma1 > 0.0 && p.gamma2 > 0.0 && check_existence(p).satisfied) return p;
    }
}

}  // namespace

TEST_CASE("existence bounds: exact arithmetic on the printed formulas") {
    SUBCASE("symmetric set is satisfied with margin = min bound") {
        const ExistenceReport rep = check_existence(reference_params());
        CHECK(rep.satisfied);
        CHECK(rep.eps_abs == 0.0);
        CHECK(rep.margin == std::min(rep.bound1, rep.bound2));
    }
    SUBCASE("perturbed reference set: bound1 = 16/132, bound2 = 32/1456") {
        const ExistenceReport rep = check_existence(perturbed_reference_params());
        CHECK(rep.bound1 == doctest::Approx(16.0 / 132.0).epsilon(1e-15));
        CHECK(rep.bound2 == doctest::Approx(32.0 / 1456.0).epsilon(1e-15));
        CHECK(rep.eps_abs == doctest::Approx(0.1).epsilon(1e-13));
        // |eps| = 0.1 < bound1 but exceeds bound2 ~ 0.02198, so the
        // sufficient condition fails and the margin is negative
        CHECK(rep.eps_abs < rep.bound1);
        CHECK_FALSE(rep.satisfied);
        CHECK(rep.margin < 0.0);
    }
    SUBCASE("bounds decay with the horizon") {
        ModelParams p = reference_params();
        p.gamma1 = 2.0 + 5e-7;
        p.gamma2 = 2.0 - 5e-7;
        p.horizon = 1e4;
        const ExistenceReport rep = check_existence(p);
        CHECK(rep.bound1 < 1e-6);
        CHECK_FALSE(rep.satisfied);
    }
}

TEST_CASE("direct solver: eps = 0 decoupling and closed forms") {
    const ModelParams p = reference_params();
    const RiccatiSolution sol = solve_direct(p, 4096);
    const DerivedScalars d = derive(p);

    CHECK(max_abs(sol.coeff(Coeff::A)) <= 1e-10);
    CHECK(max_abs(sol.coeff(Coeff::B)) <= 1e-10);
    CHECK(max_abs(sol.coeff(Coeff::C)) <= 1e-10);

    double f_err = 0.0, e_err = 0.0, d_err = 0.0;
    const double dslope = p.gamma2 * p.supply / (p.gamma1 + p.gamma2);
    for (std::size_t k = 0; k < sol.grid.size(); ++k) {
        const double f0 = f0_closed(p, sol.grid[k]);
        f_err = std::max(f_err, std::abs(sol.coeff(Coeff::F)[k] - f0));
        e_err = std::max(e_err, std::abs(sol.coeff(Coeff::E)[k] - p.beta / p.a * f0));
        d_err = std::max(d_err, std::abs(sol.coeff(Coeff::D)[k] + dslope * f0));
    }
    CHECK(f_err <= 1e-8);
    CHECK(e_err <= 1e-8);
    CHECK(d_err <= 1e-8);

    // frozen closed-form values at t = 0
    CHECK(sol.coeff(Coeff::F).front() == doctest::Approx(-1.2563669098108796).epsilon(1e-12));
    CHECK(sol.coeff(Coeff::E).front() == doctest::Approx(-0.6281834549054398).epsilon(1e-12));
    CHECK(sol.coeff(Coeff::D).front() == doctest::Approx(0.6281834549054398).epsilon(1e-12));

    // interior bounds from the existence proof
    const double bsup = p.a + max_abs(sol.coeff(Coeff::B));
    const double fcap = std::sqrt(d.gamma_hat / p.lambda_cost) * bsup;
    for (std::size_t k = 0; k < sol.grid.size(); ++k) {
        CHECK(sol.coeff(Coeff::F)[k] <= 0.0);
        CHECK(sol.coeff(Coeff::F)[k] >= -fcap - 1e-12);
        const double tleft = p.horizon - sol.grid[k];
        CHECK(std::abs(sol.coeff(Coeff::E)[k]) <=
              d.gamma_hat * p.beta / p.lambda_cost * bsup * tleft + 1e-12);
    }
}

TEST_CASE("direct solver: terminal condition and preconditions") {
    const RiccatiSolution sol = solve_direct(perturbed_reference_params(), 64, true);
    for (int i = 0; i < 6; ++i) CHECK(sol.coeffs[i].back() == 0.0);
    CHECK(sol.step == doctest::Approx(1.0 / 64).epsilon(1e-15));

    CHECK_THROWS_AS(solve_direct(reference_params(), 8), std::invalid_argument);
    // the perturbed set violates the sufficient bound: refused without force
    CHECK_THROWS_AS(solve_direct(perturbed_reference_params(), 64), std::invalid_argument);
}

TEST_CASE("direct solver: blow-up is detected and reported with a time") {
    ModelParams p;
    p.gamma1 = 0.1;
    p.gamma2 = 3000.0;
    p.lambda_cost = 0.01;
    p.a = 1.0;
    p.b = 0.0;
    p.beta = 1.0;
    p.supply = 1.0;
    p.x1 = 0.5;
    p.horizon = 100.0;
    CHECK_THROWS_WITH_AS(solve_direct(p, 4096, true),
                         doctest::Contains("non-finite state"), std::runtime_error);
}

TEST_CASE("eval_coeff: grid nodes exact, interior Hermite matches the closed form") {
    const ModelParams p = reference_params();
    const RiccatiSolution sol = solve_direct(p, 4096);

    CHECK(eval_coeff(sol, Coeff::F, sol.grid[100]) == sol.coeff(Coeff::F)[100]);
    CHECK(eval_coeff(sol, Coeff::F, p.horizon) == 0.0);
    CHECK(eval_coeff(sol, Coeff::F, 0.5) == doctest::Approx(f0_closed(p, 0.5)).epsilon(1e-10));

    const CounterRng rng(5, 0);
    for (int i = 0; i < 50; ++i) {
        const double t = p.horizon * rng.uniform(i);
        CHECK(std::abs(eval_coeff(sol, Coeff::F, t) - f0_closed(p, t)) <= 1e-8);
        CHECK(std::abs(eval_coeff(sol, Coeff::E, t) - p.beta / p.a * f0_closed(p, t)) <= 1e-8);
    }
    CHECK_THROWS_AS(eval_coeff(sol, Coeff::F, -0.01), std::invalid_argument);
    CHECK_THROWS_AS(eval_coeff(sol, Coeff::F, 1.01), std::invalid_argument);
}

TEST_CASE("rk4 global error obeys the h^4 delta^5 envelope at coarse grids") {
    const ModelParams p = reference_params();
    const DerivedScalars d = derive(p);
    for (std::size_t n : {64u, 128u}) {
        const RiccatiSolution sol = solve_direct(p, n);
        double err = 0.0;
        for (std::size_t k = 0; k < sol.grid.size(); ++k) {
            err = std::max(err, std::abs(sol.coeff(Coeff::F)[k] - f0_closed(p, sol.grid[k])));
        }
        const double h = p.horizon / static_cast<double>(n);
        CHECK(err <= 10.0 * h * h * h * h * std::pow(d.delta, 5.0));
    }
}

TEST_CASE("residual norm: convergence rate, analytic injection, fake detection") {
    const ModelParams p = reference_params();
    const DerivedScalars d = derive(p);

    SUBCASE("halving the step cuts the residual by about four") {
        const double r512 = solve_direct(p, 512).residual;
        const double r1024 = solve_direct(p, 1024).residual;
        const double r2048 = solve_direct(p, 2048).residual;
        CHECK(r512 / r1024 == doctest::Approx(4.0).epsilon(0.25));
        CHECK(r1024 / r2048 == doctest::Approx(4.0).epsilon(0.25));
    }

    SUBCASE("injected closed-form solution sits at the differencing level") {
        const std::size_t n = 512;
        std::vector<double> grid(n + 1);
        std::array<std::vector<double>, 6> coeffs;
        for (auto& c : coeffs) c.assign(n + 1, 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            grid[k] = static_cast<double>(k) * p.horizon / static_cast<double>(n);
            const double f0 = f0_closed(p, grid[k]);
            coeffs[3][k] = -p.gamma2 * p.supply / (p.gamma1 + p.gamma2) * f0;
            coeffs[4][k] = p.beta / p.a * f0;
            coeffs[5][k] = f0;
        }
        const RiccatiSolution fake =
            make_solution(p, std::move(grid), std::move(coeffs), RiccatiMethod::direct);
        const double h = p.horizon / static_cast<double>(n);
        const double res = residual_norm(fake);
        CHECK(res <= 10.0 * h * h * std::pow(d.delta, 3.0));
        CHECK(res > 0.0);
    }

    SUBCASE("constant-zero solution is rejected at the forcing level") {
        const std::size_t n = 128;
        std::vector<double> grid(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
            grid[k] = static_cast<double>(k) * p.horizon / static_cast<double>(n);
        }
        std::array<std::vector<double>, 6> coeffs;
        for (auto& c : coeffs) c.assign(n + 1, 0.0);
        const RiccatiSolution fake =
            make_solution(p, std::move(grid), std::move(coeffs), RiccatiMethod::direct);
        // F' forcing at the terminal time is ghat a^2 / lambda = delta^2
        CHECK(residual_norm(fake) >= d.delta * d.delta - 1e-12);
    }
}

TEST_CASE("picard: eps = 0 fixed point is immediate") {
    const RiccatiSolution sol = solve_picard(reference_params(), 1024);
    CHECK(sol.picard_iters <= 2);
    CHECK(max_abs(sol.coeff(Coeff::B)) <= 1e-12);
    CHECK(max_abs(sol.coeff(Coeff::C)) <= 1e-12);
    CHECK(max_abs(sol.coeff(Coeff::A)) <= 1e-10);
    const RiccatiSolution direct = solve_direct(reference_params(), 1024);
    double gap = 0.0;
    for (std::size_t k = 0; k < sol.grid.size(); ++k) {
        gap = std::max(gap, std::abs(sol.coeff(Coeff::F)[k] - direct.coeff(Coeff::F)[k]));
    }
    CHECK(gap <= 1e-9);
}

TEST_CASE("picard: perturbed set converges geometrically and matches direct") {
    PicardOptions opt;
    opt.force = true;
    const ModelParams p = perturbed_reference_params();
    const RiccatiSolution pic = solve_picard(p, 4096, opt);
    const RiccatiSolution dir = solve_direct(p, 4096, true);

    REQUIRE(pic.picard_gaps.size() >= 3);
    for (std::size_t i = 0; i + 1 < pic.picard_gaps.size(); ++i) {
        if (pic.picard_gaps[i] < 1e-13) break;
        CHECK(pic.picard_gaps[i + 1] / pic.picard_gaps[i] < 1.0);
    }
    // contraction-style ratio bound with R = 3a/2 (very loose here)
    const DerivedScalars d = derive(p);
    const double R = 1.5 * p.a;
    const double rr = d.gamma_hat * R * R * p.horizon * p.horizon / p.lambda_cost;
    const double kbound =
        p.horizon * (std::abs(d.eps) * p.beta + 2.0 * std::abs(d.eps) * p.beta * rr * (1.0 + rr));
    for (std::size_t i = 0; i + 1 < pic.picard_gaps.size(); ++i) {
        if (pic.picard_gaps[i] < 1e-13) break;
        CHECK(pic.picard_gaps[i + 1] / pic.picard_gaps[i] <= kbound);
    }

    double gap = 0.0;
    for (int i = 0; i < 6; ++i) {
        for (std::size_t k = 0; k < pic.grid.size(); ++k) {
            gap = std::max(gap, std::abs(pic.coeffs[i][k] - dir.coeffs[i][k]));
        }
    }
    CHECK(gap <= 1e-6);
    for (int i = 0; i < 6; ++i) CHECK(pic.coeffs[i].back() == 0.0);
}

TEST_CASE("picard: iteration cap reports the last two gaps") {
    PicardOptions opt;
    opt.force = true;
    opt.max_iter = 1;
    CHECK_THROWS_WITH_AS(solve_picard(perturbed_reference_params(), 256, opt),
                         doctest::Contains("last gaps"), std::runtime_error);
    PicardOptions bad;
    CHECK_THROWS_AS(solve_picard(perturbed_reference_params(), 256, bad),
                    std::invalid_argument);
}

TEST_CASE("cross-solver equivalence on randomized valid parameter sets") {
    const CounterRng rng(20240810, 0);
    std::uint64_t ctr = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const ModelParams p = random_valid_params(rng, ctr);
        const DerivedScalars d = derive(p);
        const RiccatiSolution dir = solve_direct(p, 4096);
        const RiccatiSolution pic = solve_picard(p, 4096);
        double gap = 0.0;
        for (int i = 0; i < 6; ++i) {
            for (std::size_t k = 0; k < dir.grid.size(); ++k) {
                gap = std::max(gap, std::abs(dir.coeffs[i][k] - pic.coeffs[i][k]));
            }
        }
        CHECK(gap <= 1e-6);
        worst = std::max(worst, gap);

        // a-priori bound from the existence proof
        CHECK(p.a + max_abs(dir.coeff(Coeff::B)) <= 1.5 * p.a + 1e-12);

        // sign structure strictly inside the horizon
        const std::size_t n = dir.n_steps();
        for (std::size_t k = 0; k + 1 < n; k += n / 16) {
            CHECK(dir.coeff(Coeff::F)[k] < 0.0);
            CHECK(dir.coeff(Coeff::E)[k] < 0.0);
            CHECK(dir.coeff(Coeff::D)[k] * p.supply > 0.0);
            if (std::abs(d.eps) > 1e-8 && std::abs(d.eps) <= 0.1) {
                CHECK(dir.coeff(Coeff::C)[k] * d.eps < 0.0);
                CHECK(dir.coeff(Coeff::B)[k] * d.eps < 0.0);
            }
        }
    }
    MESSAGE("worst cross-solver gap: ", worst);
}

TEST_CASE("csv export round-trips at full precision") {
    const RiccatiSolution sol = solve_direct(reference_params(), 64);
    std::ostringstream os;
    write_riccati_csv(sol, os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,A,B,C,D,E,F");
    std::getline(is, line);  // first data row, t = 0
    std::size_t rows = 1;
    std::string first_row = line;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 65);

    // parse the F(0) column back and compare bitwise
    std::istringstream row(first_row);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
    REQUIRE(vals.size() == 7);
    CHECK(vals[0] == 0.0);
    CHECK(vals[6] == sol.coeff(Coeff::F).front());
}
