#include "tceq/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "tceq/asymptotics.hpp"
#include "tceq/frictionless.hpp"
#include "tceq/gridfn.hpp"
#include "tceq/rng.hpp"

namespace tceq {

namespace {

void check_config(const RiccatiSolution& sol, const ModelParams& p, const PathConfig& cfg) {
    p.validate();
    const ModelParams& q = sol.params;
    if (q.gamma1 != p.gamma1 || q.gamma2 != p.gamma2 || q.lambda_cost != p.lambda_cost ||
        q.a != p.a || q.b != p.b || q.beta != p.beta || q.supply != p.supply || q.x1 != p.x1 ||
        q.horizon != p.horizon) {
        throw std::invalid_argument("params differ from the ones the solution was built with");
    }
    if (cfg.n_paths < 1) throw std::invalid_argument("n_paths must be at least 1");
    if (cfg.n_steps < 2) throw std::invalid_argument("n_steps must be at least 2");
    if (sol.n_steps() % cfg.n_steps != 0) {
        throw std::invalid_argument("n_steps must divide the Riccati grid");
    }
    if (cfg.record_stride < 1 || cfg.n_steps % cfg.record_stride != 0) {
        throw std::invalid_argument("record_stride must divide n_steps");
    }
}

double bachelier_at(const ModelParams& p, double gbar, double t, double w) {
    return p.b * p.horizon + gbar * p.supply * p.a * p.a * (t - p.horizon) + p.a * w;
}

}  // namespace

double PathEnsemble::sbar(std::size_t p_, std::size_t j) const {
    const DerivedScalars d = derive(params);
    return bachelier_at(params, d.gamma_bar, times[j], at(W, p_, j));
}

double PathEnsemble::phibar1(std::size_t p_, std::size_t j) const {
    return params.gamma2 * params.supply / (params.gamma1 + params.gamma2) -
           params.beta / params.a * at(W, p_, j);
}

PathEnsemble simulate(const RiccatiSolution& sol, const ModelParams& p, const PathConfig& cfg) {
    check_config(sol, p, cfg);
    const DerivedScalars d = derive(p);
    const std::size_t M = cfg.n_steps;
    const std::size_t stride_fine = sol.n_steps() / M;
    const double T = p.horizon;
    const double hs = T / static_cast<double>(M);
    const double sqrt_hs = std::sqrt(hs);
    const double mubar = d.gamma_bar * p.supply * p.a * p.a;
    const double k0 = p.gamma2 * p.supply / (p.gamma1 + p.gamma2);

    // coefficients on the simulation grid
    std::vector<double> A(M + 1), B(M + 1), C(M + 1), D(M + 1), E(M + 1), F(M + 1);
    for (std::size_t k = 0; k <= M; ++k) {
        const std::size_t i = k * stride_fine;
        A[k] = sol.coeff(Coeff::A)[i];
        B[k] = sol.coeff(Coeff::B)[i];
        C[k] = sol.coeff(Coeff::C)[i];
        D[k] = sol.coeff(Coeff::D)[i];
        E[k] = sol.coeff(Coeff::E)[i];
        F[k] = sol.coeff(Coeff::F)[i];
    }
    // exact integrating factors e^{int F} per step from the fine grid
    std::vector<double> efac(M);
    {
        const std::size_t N = sol.n_steps();
        const auto& Ff = sol.coeff(Coeff::F);
        const auto& Bf = sol.coeff(Coeff::B);
        std::vector<double> Fp(N + 1);
        const double ghat_lam = 0.5 * (p.gamma1 + p.gamma2) / p.lambda_cost;
        for (std::size_t k = 0; k <= N; ++k) {
            const double ab = p.a + Bf[k];
            Fp[k] = ghat_lam * ab * ab - Ff[k] * Ff[k];
        }
        const std::vector<double> G = cum_integral(Ff, Fp, sol.step);
        for (std::size_t k = 0; k < M; ++k) {
            efac[k] = std::exp(G[(k + 1) * stride_fine] - G[k * stride_fine]);
        }
    }

    PathEnsemble ens;
    ens.params = p;
    ens.config = cfg;
    ens.n_paths = cfg.n_paths;
    ens.n_rec = M / cfg.record_stride + 1;
    ens.sim_times.resize(M + 1);
    for (std::size_t k = 0; k <= M; ++k) {
        ens.sim_times[k] = static_cast<double>(k) * T / static_cast<double>(M);
    }
    ens.sim_times[M] = T;
    ens.times.resize(ens.n_rec);
    for (std::size_t j = 0; j < ens.n_rec; ++j) ens.times[j] = ens.sim_times[j * cfg.record_stride];

    const std::size_t total = cfg.n_paths * ens.n_rec;
    ens.W.resize(total);
    ens.phi1.resize(total);
    ens.rate1.resize(total);
    ens.S.resize(total);
    ens.mu.resize(total);
    ens.premium.resize(total);

    auto& ns = ens.node_stats;
    for (auto* v : {&ns.sum_dev, &ns.sum_dev2, &ns.sum_rate, &ns.sum_rate2, &ns.sum_dev_rate,
                    &ns.sum_abs_rate, &ns.sum_premium}) {
        v->assign(M + 1, 0.0);
    }

    KahanSum qv;
    std::vector<double> Wpath(M + 1), phipath(M + 1);
    for (std::size_t pidx = 0; pidx < cfg.n_paths; ++pidx) {
        const CounterRng rng(cfg.seed, pidx);
        Wpath[0] = 0.0;
        for (std::size_t k = 0; k < M; ++k) {
            Wpath[k + 1] = Wpath[k] + sqrt_hs * rng.normal(k);
        }
        phipath[0] = p.x1;
        for (std::size_t k = 0; k < M; ++k) {
            const double g0 = D[k] + E[k] * Wpath[k];
            const double g1 = D[k + 1] + E[k + 1] * Wpath[k + 1];
            phipath[k + 1] = efac[k] * phipath[k] + 0.5 * hs * (efac[k] * g0 + g1);
        }

        double prev_dev = 0.0;
        for (std::size_t k = 0; k <= M; ++k) {
            const double t = ens.sim_times[k];
            const double w = Wpath[k];
            const double phi = phipath[k];
            const double rate = D[k] + E[k] * w + F[k] * phi;
            const double sig = p.a + B[k];
            const double mu = sig * (0.5 * d.eps * p.beta * w + sig * (0.5 * p.gamma2 * p.supply +
                                                                       0.5 * d.eps * phi));
            const double sbar = bachelier_at(p, d.gamma_bar, t, w);
            const double price = sbar + A[k] + B[k] * w + C[k] * phi;
            const double prem = mu - mubar;
            const double dev = phi - (k0 - p.beta / p.a * w);

            // drift identity: Ito drift of S minus the clearing drift
            std::array<double, 6> y{A[k], B[k], C[k], D[k], E[k], F[k]};
            const std::array<double, 6> r = riccati_rhs(p, y);
            const double resid = std::abs(r[0] + r[1] * w + r[2] * phi + C[k] * rate + mubar - mu);
            ens.max_drift_residual = std::max(ens.max_drift_residual, resid);

            const double clear = std::abs((p.supply - phi) + phi - p.supply);
            ens.max_clearing_gap = std::max(ens.max_clearing_gap, clear);

            ns.sum_dev[k] += dev;
            ns.sum_dev2[k] += dev * dev;
            ns.sum_rate[k] += rate;
            ns.sum_rate2[k] += rate * rate;
            ns.sum_dev_rate[k] += dev * rate;
            ns.sum_abs_rate[k] += std::abs(rate);
            ns.sum_premium[k] += prem;

            if (k > 0) {
                const double inc = dev - prev_dev;
                qv.add(inc * inc);
            }
            prev_dev = dev;

            if (k == M) {
                const double gap = std::abs(price - (p.b * T + p.a * w));
                ens.max_terminal_gap = std::max(ens.max_terminal_gap, gap);
            }
            if (k % cfg.record_stride == 0) {
                const std::size_t j = pidx * ens.n_rec + k / cfg.record_stride;
                ens.W[j] = w;
                ens.phi1[j] = phi;
                ens.rate1[j] = rate;
                ens.S[j] = price;
                ens.mu[j] = mu;
                ens.premium[j] = prem;
            }
        }
    }
    ens.qv_sum = qv.value();
    return ens;
}

double drift_identity_residual(const RiccatiSolution& sol, const ModelParams& p,
                               const PathEnsemble& ens) {
    p.validate();
    const DerivedScalars d = derive(p);
    const double mubar = d.gamma_bar * p.supply * p.a * p.a;
    const std::size_t stride = ens.config.record_stride;
    const std::size_t fine = sol.n_steps() / ens.config.n_steps;

    double worst = 0.0;
    for (std::size_t pi = 0; pi < ens.n_paths; ++pi) {
        for (std::size_t j = 0; j < ens.n_rec; ++j) {
            const std::size_t i = j * stride * fine;  // fine-grid index of the recorded node
            std::array<double, 6> y;
            for (int q = 0; q < 6; ++q) y[q] = sol.coeffs[q][i];
            const std::array<double, 6> r = riccati_rhs(p, y);
            const double w = ens.at(ens.W, pi, j);
            const double phi = ens.at(ens.phi1, pi, j);
            const double rate = ens.at(ens.rate1, pi, j);
            const double mu = ens.at(ens.mu, pi, j);
            const double resid = r[0] + r[1] * w + r[2] * phi + y[2] * rate + mubar - mu;
            worst = std::max(worst, std::abs(resid));
        }
    }
    return worst;
}

SlopeFit rate_regression_at(const PathEnsemble& ens, std::size_t sim_node) {
    if (sim_node >= ens.node_stats.sum_dev.size()) {
        throw std::invalid_argument("sim_node outside the simulation grid");
    }
    const auto& ns = ens.node_stats;
    const double n = static_cast<double>(ens.n_paths);
    if (ens.n_paths < 3) throw std::invalid_argument("need at least 3 paths for a regression");

    const double mx = ns.sum_dev[sim_node] / n;
    const double my = ns.sum_rate[sim_node] / n;
    const double sxx = ns.sum_dev2[sim_node] - n * mx * mx;
    const double sxy = ns.sum_dev_rate[sim_node] - n * mx * my;
    const double syy = ns.sum_rate2[sim_node] - n * my * my;

    SlopeFit fit;
    fit.n = ens.n_paths;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double ssr = std::max(0.0, syy - fit.slope * sxy);
    fit.slope_se = std::sqrt(ssr / (n - 2.0) / sxx);
    return fit;
}

VolumeReport volume_diagnostics(const PathEnsemble& ens, const RiccatiSolution& sol,
                                std::size_t n_buckets) {
    if (ens.n_paths < 100) throw std::invalid_argument("too few paths for volume diagnostics");
    if (n_buckets < 1) throw std::invalid_argument("n_buckets must be positive");
    const ModelParams& p = ens.params;
    const AsymptoticKit kit(p);

    VolumeReport rep;
    rep.qv_rate = ens.qv_sum / (static_cast<double>(ens.n_paths) * p.horizon);
    rep.qv_target = (p.beta / p.a) * (p.beta / p.a);

    // pooled OLS of rate on deviation per time bucket over the recorded nodes
    const std::size_t nj = ens.n_rec;
    for (std::size_t b = 0; b < n_buckets; ++b) {
        const std::size_t j0 = b * nj / n_buckets;
        const std::size_t j1 = (b + 1) * nj / n_buckets;
        KahanSum sx, sy, sxx, sxy, syy;
        std::size_t cnt = 0;
        for (std::size_t pi = 0; pi < ens.n_paths; ++pi) {
            for (std::size_t j = j0; j < j1; ++j) {
                const double x = ens.at(ens.phi1, pi, j) - ens.phibar1(pi, j);
                const double y = ens.at(ens.rate1, pi, j);
                sx.add(x);
                sy.add(y);
                sxx.add(x * x);
                sxy.add(x * y);
                syy.add(y * y);
                ++cnt;
            }
        }
        const double n = static_cast<double>(cnt);
        const double mx = sx.value() / n, my = sy.value() / n;
        const double vxx = sxx.value() - n * mx * mx;
        const double vxy = sxy.value() - n * mx * my;
        const double vyy = syy.value() - n * my * my;
        VolumeBucket bucket;
        bucket.n_obs = cnt;
        bucket.t_center = 0.5 * (ens.times[j0] + ens.times[j1 - 1]);
        bucket.slope = vxy / vxx;
        bucket.slope_se = std::sqrt(std::max(0.0, vyy - bucket.slope * vxy) / (n - 2.0) / vxx);
        bucket.f0_ref = kit.F0(bucket.t_center);
        rep.buckets.push_back(bucket);
    }

    // autocorrelation of |rate| anchored near T/2 at a few recorded lags
    const std::size_t mid = nj / 2;
    for (std::size_t lag : {std::size_t{1}, std::size_t{2}, std::size_t{4}}) {
        if (mid + lag >= nj) break;
        KahanSum sa, sb, saa, sbb, sab;
        for (std::size_t pi = 0; pi < ens.n_paths; ++pi) {
            const double x = std::abs(ens.at(ens.rate1, pi, mid));
            const double y = std::abs(ens.at(ens.rate1, pi, mid + lag));
            sa.add(x);
            sb.add(y);
            saa.add(x * x);
            sbb.add(y * y);
            sab.add(x * y);
        }
        const double n = static_cast<double>(ens.n_paths);
        const double ma = sa.value() / n, mb = sb.value() / n;
        const double corr = (sab.value() - n * ma * mb) /
                            std::sqrt((saa.value() - n * ma * ma) * (sbb.value() - n * mb * mb));
        rep.abs_rate_autocorr.emplace_back(ens.times[mid + lag] - ens.times[mid], corr);
    }

    const auto& ns = ens.node_stats;
    const std::size_t msim = ens.sim_times.size() - 1;
    rep.mean_abs_rate_mid = ns.sum_abs_rate[msim / 2] / static_cast<double>(ens.n_paths);
    double near_end = 0.0;
    for (std::size_t k = 0; k <= msim; ++k) {
        if (ens.sim_times[k] >= 0.99 * p.horizon) {
            near_end = std::max(near_end, ns.sum_abs_rate[k] / static_cast<double>(ens.n_paths));
        }
    }
    rep.mean_abs_rate_near_end = near_end;
    return rep;
}

double expected_premium(const RiccatiSolution& sol, const ModelParams& p, double t) {
    p.validate();
    if (!(t >= 0.0 && t <= p.horizon)) throw std::invalid_argument("t outside [0, T]");
    const DerivedScalars d = derive(p);
    // mean position m' = D + F m, m(0) = x1, advanced on the solution grid with
    // the same integrating-factor stepping as the paths
    const std::size_t N = sol.n_steps();
    const auto& D = sol.coeff(Coeff::D);
    const auto& F = sol.coeff(Coeff::F);
    const auto& B = sol.coeff(Coeff::B);
    const double h = sol.step;
    double m = p.x1;
    std::size_t k = 0;
    for (; k < N && sol.grid[k + 1] <= t; ++k) {
        const double ef = std::exp(0.5 * h * (F[k] + F[k + 1]));
        m = ef * m + 0.5 * h * (ef * D[k] + D[k + 1]);
    }
    const double Bk = eval_coeff(sol, Coeff::B, sol.grid[k]);
    const double sig = p.a + Bk;
    const double mubar = d.gamma_bar * p.supply * p.a * p.a;
    return sig * sig * (0.5 * p.gamma2 * p.supply + 0.5 * d.eps * m) - mubar;
}

void write_paths_csv(const PathEnsemble& ens, std::ostream& os) {
    os << "path_id,t,W,phi1,phidot1,S,mu,premium\n";
    char buf[32];
    for (std::size_t pi = 0; pi < ens.n_paths; ++pi) {
        for (std::size_t j = 0; j < ens.n_rec; ++j) {
            os << pi;
            const double row[7] = {ens.times[j],          ens.at(ens.W, pi, j),
                                   ens.at(ens.phi1, pi, j), ens.at(ens.rate1, pi, j),
                                   ens.at(ens.S, pi, j),    ens.at(ens.mu, pi, j),
                                   ens.at(ens.premium, pi, j)};
            for (double v : row) {
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                os << ',' << buf;
            }
            os << '\n';
        }
    }
}

}  // namespace tceq
