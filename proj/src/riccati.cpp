#include "tceq/riccati.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "tceq/gridfn.hpp"

namespace tceq {

namespace {

std::vector<double> make_grid(double T, std::size_t n) {
    std::vector<double> g(n + 1);
    for (std::size_t k = 0; k <= n; ++k) g[k] = static_cast<double>(k) * T / static_cast<double>(n);
    g[n] = T;
    return g;
}

void check_steps(std::size_t n_steps) {
    if (n_steps < 16) throw std::invalid_argument("n_steps must be at least 16");
}

void check_bound_or_force(const ModelParams& p, bool force, const char* who) {
    if (force) return;
    const ExistenceReport rep = check_existence(p);
    if (!rep.satisfied) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "%s: |gamma1-gamma2| = %.6g exceeds the existence bound %.6g "
                      "(pass force to proceed)",
                      who, rep.eps_abs, std::min(rep.bound1, rep.bound2));
        throw std::invalid_argument(buf);
    }
}

bool all_finite(const std::array<double, 6>& y) {
    for (double v : y) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

[[noreturn]] void throw_nonfinite(double t) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "non-finite state during integration at t = %.12g", t);
    throw std::runtime_error(buf);
}

}  // namespace

ExistenceReport check_existence(const ModelParams& p) {
    p.validate();
    const double g = p.gamma1 + p.gamma2;
    const double lam = p.lambda_cost;
    const double a2 = p.a * p.a;
    const double T = p.horizon;
    const double T3 = T * T * T;
    const double T5 = T3 * T * T;

    ExistenceReport rep;
    rep.bound1 = 16.0 * lam / (27.0 * a2 * T3 * g + 48.0 * T * p.beta * lam);
    rep.bound2 = 32.0 * lam * lam /
                 (81.0 * a2 * a2 * T5 * g * g + 72.0 * a2 * T3 * p.beta * g * lam +
                  32.0 * T * p.beta * lam * lam);
    rep.eps_abs = std::abs(p.gamma1 - p.gamma2);
    const double bound = std::min(rep.bound1, rep.bound2);
    rep.satisfied = rep.eps_abs < bound;
    rep.margin = bound - rep.eps_abs;
    return rep;
}

std::array<double, 6> riccati_rhs(const ModelParams& p, const std::array<double, 6>& y) {
    const double gbar = p.gamma1 * p.gamma2 / (p.gamma1 + p.gamma2);
    const double eps = p.gamma1 - p.gamma2;
    const double ghat_lam = 0.5 * (p.gamma1 + p.gamma2) / p.lambda_cost;
    const double s = p.supply;

    const double A = y[0], B = y[1], C = y[2], D = y[3], E = y[4], F = y[5];
    (void)A;
    const double ab = p.a + B;
    const double ab2 = ab * ab;

    return {
        -gbar * s * p.a * p.a + 0.5 * p.gamma2 * s * ab2 - C * D,  // A'
        0.5 * eps * p.beta * ab - C * E,                           // B'
        0.5 * eps * ab2 - C * F,                                   // C'
        -0.5 * p.gamma2 * s / p.lambda_cost * ab2 - F * D,         // D'
        ghat_lam * p.beta * ab - E * F,                            // E'
        ghat_lam * ab2 - F * F,                                    // F'
    };
}

RiccatiSolution solve_direct(const ModelParams& p, std::size_t n_steps, bool force) {
    p.validate();
    check_steps(n_steps);
    check_bound_or_force(p, force, "solve_direct");

    RiccatiSolution sol;
    sol.params = p;
    sol.grid = make_grid(p.horizon, n_steps);
    sol.step = p.horizon / static_cast<double>(n_steps);
    sol.method = RiccatiMethod::direct;
    for (auto& c : sol.coeffs) c.assign(n_steps + 1, 0.0);

    const double h = sol.step;
    std::array<double, 6> y{};  // zero terminal condition
    for (std::size_t k = n_steps; k-- > 0;) {
        std::array<double, 6> k1 = riccati_rhs(p, y);
        std::array<double, 6> tmp;
        for (int i = 0; i < 6; ++i) tmp[i] = y[i] - 0.5 * h * k1[i];
        std::array<double, 6> k2 = riccati_rhs(p, tmp);
        for (int i = 0; i < 6; ++i) tmp[i] = y[i] - 0.5 * h * k2[i];
        std::array<double, 6> k3 = riccati_rhs(p, tmp);
        for (int i = 0; i < 6; ++i) tmp[i] = y[i] - h * k3[i];
        std::array<double, 6> k4 = riccati_rhs(p, tmp);
        for (int i = 0; i < 6; ++i) y[i] -= h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        if (!all_finite(y)) throw_nonfinite(sol.grid[k]);
        for (int i = 0; i < 6; ++i) sol.coeffs[i][k] = y[i];
    }
    sol.residual = residual_norm(sol);
    return sol;
}

RiccatiSolution solve_picard(const ModelParams& p, std::size_t n_steps, const PicardOptions& opt) {
    p.validate();
    check_steps(n_steps);
    check_bound_or_force(p, opt.force, "solve_picard");

    const std::size_t N = n_steps;
    const double T = p.horizon;
    const double h = T / static_cast<double>(N);
    const double eps = p.gamma1 - p.gamma2;
    const double gbar = p.gamma1 * p.gamma2 / (p.gamma1 + p.gamma2);
    const double ghat_lam = 0.5 * (p.gamma1 + p.gamma2) / p.lambda_cost;

    std::vector<double> Bt(N + 1, p.a);  // B~ = a + B, started at the frictionless value
    std::vector<double> F(N + 1), C(N + 1), E(N + 1);

    // one inner pass: (C,E,F) from the explicit solutions given B~
    auto inner = [&](const std::vector<double>& bt) {
        const std::vector<double> bm = cubic_midpoints(bt);
        // F by backward RK4; B~ at stage midpoints interpolated cubically
        double f = 0.0;
        F[N] = 0.0;
        for (std::size_t k = N; k-- > 0;) {
            const double b1 = bt[k + 1], b2 = bm[k], b3 = bt[k];
            const double k1 = ghat_lam * b1 * b1 - f * f;
            const double f2 = f - 0.5 * h * k1;
            const double k2 = ghat_lam * b2 * b2 - f2 * f2;
            const double f3 = f - 0.5 * h * k2;
            const double k3 = ghat_lam * b2 * b2 - f3 * f3;
            const double f4 = f - h * k3;
            const double k4 = ghat_lam * b3 * b3 - f4 * f4;
            f -= h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
            if (!std::isfinite(f)) throw_nonfinite(static_cast<double>(k) * h);
            F[k] = f;
        }
        // cumulative G = int_0^t F with derivative-corrected trapezoid
        std::vector<double> Fp(N + 1);
        for (std::size_t k = 0; k <= N; ++k) Fp[k] = ghat_lam * bt[k] * bt[k] - F[k] * F[k];
        const std::vector<double> G = cum_integral(F, Fp, h);
        // E(t) = -(ghat beta / lam) int_t^T B~ e^{int_t^s F} ds, and the C analogue,
        // via backward-cumulative trapezoid of the weighted integrands
        std::vector<double> we(N + 1), wc(N + 1);
        for (std::size_t k = 0; k <= N; ++k) {
            const double w = std::exp(G[k]);
            we[k] = bt[k] * w;
            wc[k] = bt[k] * bt[k] * w;
        }
        const std::vector<double> Se = backward_cum_trapezoid(we, h);
        const std::vector<double> Sc = backward_cum_trapezoid(wc, h);
        for (std::size_t k = 0; k <= N; ++k) {
            const double inv = std::exp(-G[k]);
            E[k] = -ghat_lam * p.beta * Se[k] * inv;
            C[k] = -0.5 * eps * Sc[k] * inv;
        }
    };

    RiccatiSolution sol;
    int iters = 0;
    bool converged = false;
    for (int it = 1; it <= opt.max_iter; ++it) {
        inner(Bt);
        // B~(t) = a - int_t^T ( (eps/2) beta B~ - E C ) ds
        std::vector<double> q(N + 1);
        for (std::size_t k = 0; k <= N; ++k) q[k] = 0.5 * eps * p.beta * Bt[k] - E[k] * C[k];
        const std::vector<double> I = backward_cum_trapezoid(q, h);
        double gap = 0.0;
        std::vector<double> Bn(N + 1);
        for (std::size_t k = 0; k <= N; ++k) {
            Bn[k] = p.a - I[k];
            gap = std::max(gap, std::abs(Bn[k] - Bt[k]));
        }
        Bt.swap(Bn);
        sol.picard_gaps.push_back(gap);
        iters = it;
        if (gap < opt.tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        const std::size_t n = sol.picard_gaps.size();
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "picard iteration did not reach tol in %d iterations; "
                      "last gaps %.6e, %.6e",
                      opt.max_iter, n >= 2 ? sol.picard_gaps[n - 2] : -1.0,
                      sol.picard_gaps[n - 1]);
        throw std::runtime_error(buf);
    }
    inner(Bt);  // refresh (C,E,F) at the converged iterate

    // A and D in one backward RK4 pass over the frozen (B~,C,F)
    const std::vector<double> bm = cubic_midpoints(Bt);
    const std::vector<double> cm = cubic_midpoints(C);
    const std::vector<double> fm = cubic_midpoints(F);
    std::vector<double> A(N + 1, 0.0), D(N + 1, 0.0);
    {
        const double g2s = p.gamma2 * p.supply;
        auto rhsAD = [&](double dA, double dD, double bt_, double c_, double f_,
                         double* outA, double* outD) {
            (void)dA;
            const double ab2 = bt_ * bt_;
            *outA = -gbar * p.supply * p.a * p.a + 0.5 * g2s * ab2 - c_ * dD;
            *outD = -0.5 * g2s / p.lambda_cost * ab2 - f_ * dD;
        };
        double av = 0.0, dv = 0.0;
        for (std::size_t k = N; k-- > 0;) {
            double a1, d1, a2, d2, a3, d3, a4, d4;
            rhsAD(av, dv, Bt[k + 1], C[k + 1], F[k + 1], &a1, &d1);
            rhsAD(av - 0.5 * h * a1, dv - 0.5 * h * d1, bm[k], cm[k], fm[k], &a2, &d2);
            rhsAD(av - 0.5 * h * a2, dv - 0.5 * h * d2, bm[k], cm[k], fm[k], &a3, &d3);
            rhsAD(av - h * a3, dv - h * d3, Bt[k], C[k], F[k], &a4, &d4);
            av -= h / 6.0 * (a1 + 2.0 * (a2 + a3) + a4);
            dv -= h / 6.0 * (d1 + 2.0 * (d2 + d3) + d4);
            if (!std::isfinite(av) || !std::isfinite(dv)) throw_nonfinite(static_cast<double>(k) * h);
            A[k] = av;
            D[k] = dv;
        }
    }

    sol.params = p;
    sol.grid = make_grid(T, N);
    sol.step = h;
    sol.method = RiccatiMethod::picard;
    sol.picard_iters = iters;
    sol.coeffs[0] = std::move(A);
    sol.coeffs[1].resize(N + 1);
    for (std::size_t k = 0; k <= N; ++k) sol.coeffs[1][k] = Bt[k] - p.a;
    sol.coeffs[1][N] = 0.0;
    sol.coeffs[2] = std::move(C);
    sol.coeffs[3] = std::move(D);
    sol.coeffs[4] = std::move(E);
    sol.coeffs[5] = std::move(F);
    sol.residual = residual_norm(sol);
    return sol;
}

double eval_coeff(const RiccatiSolution& sol, Coeff which, double t) {
    const double T = sol.params.horizon;
    if (!(t >= 0.0 && t <= T)) throw std::invalid_argument("t outside [0, T]");
    const std::size_t N = sol.n_steps();
    const double h = sol.step;
    const std::size_t i = static_cast<std::size_t>(which);

    std::size_t k = static_cast<std::size_t>(t / h);
    if (k >= N) return sol.coeffs[i][N];
    const double s = (t - sol.grid[k]) / h;
    if (s == 0.0) return sol.coeffs[i][k];

    std::array<double, 6> y0, y1;
    for (int j = 0; j < 6; ++j) {
        y0[j] = sol.coeffs[j][k];
        y1[j] = sol.coeffs[j][k + 1];
    }
    const std::array<double, 6> m0 = riccati_rhs(sol.params, y0);
    const std::array<double, 6> m1 = riccati_rhs(sol.params, y1);
    return hermite(y0[i], y1[i], m0[i], m1[i], h, s);
}

double residual_norm(const RiccatiSolution& sol) {
    const std::size_t N = sol.n_steps();
    const double h = sol.step;
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 <= N; ++k) {
        std::array<double, 6> y;
        for (int j = 0; j < 6; ++j) y[j] = sol.coeffs[j][k];
        const std::array<double, 6> rhs = riccati_rhs(sol.params, y);
        for (int j = 0; j < 6; ++j) {
            const double diff = (sol.coeffs[j][k + 1] - sol.coeffs[j][k - 1]) / (2.0 * h);
            worst = std::max(worst, std::abs(diff - rhs[j]));
        }
    }
    return worst;
}

RiccatiSolution make_solution(const ModelParams& p, std::vector<double> grid,
                              std::array<std::vector<double>, 6> coeffs,
                              RiccatiMethod method) {
    if (grid.size() < 2) throw std::invalid_argument("grid needs at least two nodes");
    for (const auto& c : coeffs) {
        if (c.size() != grid.size()) throw std::invalid_argument("coefficient/grid size mismatch");
    }
    RiccatiSolution sol;
    sol.params = p;
    sol.step = grid[1] - grid[0];
    sol.grid = std::move(grid);
    sol.coeffs = std::move(coeffs);
    sol.method = method;
    return sol;
}

void write_riccati_csv(const RiccatiSolution& sol, std::ostream& os) {
    os << "t,A,B,C,D,E,F\n";
    char buf[32];
    for (std::size_t k = 0; k < sol.grid.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", sol.grid[k]);
        os << buf;
        for (int j = 0; j < 6; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", sol.coeffs[j][k]);
            os << ',' << buf;
        }
        os << '\n';
    }
}

}  // namespace tceq
