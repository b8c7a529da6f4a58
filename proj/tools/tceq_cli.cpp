// Command-line front end: existence checks, Riccati solves, path simulation,
// comparative-statics sweeps, tracking verification, and closed-form tables.
// Exit codes: 0 success, 2 validation/existence failure, 3 solver failure,
// 4 I/O failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tceq/asymptotics.hpp"
#include "tceq/frictionless.hpp"
#include "tceq/gridfn.hpp"
#include "tceq/io.hpp"
#include "tceq/params.hpp"
#include "tceq/riccati.hpp"
#include "tceq/simulate.hpp"
#include "tceq/tracking.hpp"

namespace {

using nlohmann::json;
using namespace tceq;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    // per-field overrides; flags win over the config file
    std::optional<double> gamma1, gamma2, lambda_cost, a, b, beta, supply, x1, horizon;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--config", c.config_path, "JSON config file with the model parameters")
        ->required();
    const char* env = std::getenv("TCEQ_OUT_DIR");
    c.out_dir = env ? env : ".";
    cmd->add_option("--out-dir", c.out_dir, "output directory (default $TCEQ_OUT_DIR or .)");
    cmd->add_option("--gamma1", c.gamma1, "override gamma1");
    cmd->add_option("--gamma2", c.gamma2, "override gamma2");
    cmd->add_option("--lambda", c.lambda_cost, "override lambda_cost");
    cmd->add_option("--a", c.a, "override a");
    cmd->add_option("--b", c.b, "override b");
    cmd->add_option("--beta", c.beta, "override beta");
    cmd->add_option("--supply", c.supply, "override supply");
    cmd->add_option("--x1", c.x1, "override x1");
    cmd->add_option("--horizon", c.horizon, "override horizon");
}

ModelParams resolve_params(const CommonOpts& c) {
    ModelParams p = load_params_file(c.config_path);
    if (c.gamma1) p.gamma1 = *c.gamma1;
    if (c.gamma2) p.gamma2 = *c.gamma2;
    if (c.lambda_cost) p.lambda_cost = *c.lambda_cost;
    if (c.a) p.a = *c.a;
    if (c.b) p.b = *c.b;
    if (c.beta) p.beta = *c.beta;
    if (c.supply) p.supply = *c.supply;
    if (c.x1) p.x1 = *c.x1;
    if (c.horizon) p.horizon = *c.horizon;
    p.validate();
    return p;
}

std::string out_path(const CommonOpts& c, const std::string& name) {
    return (std::filesystem::path(c.out_dir) / name).string();
}

json solution_summary(const RiccatiSolution& sol) {
    json j{{"method", sol.method == RiccatiMethod::direct ? "direct" : "picard"},
           {"n_steps", sol.n_steps()},
           {"step", sol.step},
           {"residual", sol.residual},
           {"picard_iters", sol.picard_iters},
           {"F0", sol.coeff(Coeff::F).front()},
           {"B0", sol.coeff(Coeff::B).front()},
           {"A0", sol.coeff(Coeff::A).front()}};
    if (!sol.picard_gaps.empty()) j["picard_gaps"] = sol.picard_gaps;
    return j;
}

int cmd_check(const CommonOpts& c) {
    const ModelParams p = resolve_params(c);
    const ExistenceReport rep = check_existence(p);
    std::printf("bound1    = %s\n", format_g17(rep.bound1).c_str());
    std::printf("bound2    = %s\n", format_g17(rep.bound2).c_str());
    std::printf("|eps|     = %s\n", format_g17(rep.eps_abs).c_str());
    std::printf("margin    = %s\n", format_g17(rep.margin).c_str());
    std::printf("satisfied = %s\n", rep.satisfied ? "true" : "false");
    write_text_file(out_path(c, "existence.json"), existence_to_json(rep).dump(2) + "\n");
    return rep.satisfied ? kExitOk : kExitValidation;
}

struct SolveOpts {
    std::size_t steps = 4096;
    std::string method = "direct";
    bool force = false;
    double tol = 1e-10;
    int max_iter = 200;
};

void warn_if_forced(const ModelParams& p, bool force) {
    const ExistenceReport rep = check_existence(p);
    if (!rep.satisfied && force) {
        std::fprintf(stderr,
                     "warning: |gamma1-gamma2| = %g exceeds the existence bound %g; "
                     "proceeding because --force was given\n",
                     rep.eps_abs, std::min(rep.bound1, rep.bound2));
    }
}

int cmd_solve(const CommonOpts& c, const SolveOpts& o) {
    const ModelParams p = resolve_params(c);
    warn_if_forced(p, o.force);
    json summary;
    std::optional<RiccatiSolution> direct, picard;
    if (o.method == "direct" || o.method == "both") {
        direct = solve_direct(p, o.steps, o.force);
        std::ostringstream csv;
        write_riccati_csv(*direct, csv);
        write_text_file(out_path(c, "riccati_direct.csv"), csv.str());
        summary["direct"] = solution_summary(*direct);
    }
    if (o.method == "picard" || o.method == "both") {
        PicardOptions po;
        po.tol = o.tol;
        po.max_iter = o.max_iter;
        po.force = o.force;
        picard = solve_picard(p, o.steps, po);
        std::ostringstream csv;
        write_riccati_csv(*picard, csv);
        write_text_file(out_path(c, "riccati_picard.csv"), csv.str());
        summary["picard"] = solution_summary(*picard);
    }
    if (o.method != "direct" && o.method != "picard" && o.method != "both") {
        throw std::invalid_argument("--method must be direct, picard, or both");
    }
    if (direct && picard) {
        double gap = 0.0;
        for (int i = 0; i < 6; ++i) {
            for (std::size_t k = 0; k < direct->grid.size(); ++k) {
                gap = std::max(gap, std::abs(direct->coeffs[i][k] - picard->coeffs[i][k]));
            }
        }
        summary["cross_gap"] = gap;
        std::printf("cross-solver sup gap = %s\n", format_g17(gap).c_str());
    }
    const RiccatiSolution& head = direct ? *direct : *picard;
    std::printf("residual = %s, F(0) = %s, B(0) = %s\n", format_g17(head.residual).c_str(),
                format_g17(head.coeff(Coeff::F).front()).c_str(),
                format_g17(head.coeff(Coeff::B).front()).c_str());
    write_text_file(out_path(c, "solve_summary.json"), summary.dump(2) + "\n");
    return kExitOk;
}

struct SimOpts {
    std::size_t riccati_steps = 4096;
    PathConfig cfg;
    bool force = false;
};

int cmd_simulate(const CommonOpts& c, const SimOpts& o) {
    const ModelParams p = resolve_params(c);
    warn_if_forced(p, o.force);
    const RiccatiSolution sol = solve_direct(p, o.riccati_steps, o.force);
    const PathEnsemble ens = simulate(sol, p, o.cfg);
    const VolumeReport vol = volume_diagnostics(ens, sol);

    std::ostringstream csv;
    write_paths_csv(ens, csv);
    write_text_file(out_path(c, "paths.csv"), csv.str());

    json j{{"n_paths", ens.n_paths},
           {"n_steps", o.cfg.n_steps},
           {"seed", o.cfg.seed},
           {"record_stride", o.cfg.record_stride},
           {"max_terminal_gap", ens.max_terminal_gap},
           {"max_clearing_gap", ens.max_clearing_gap},
           {"max_drift_residual", ens.max_drift_residual},
           {"qv_rate", vol.qv_rate},
           {"qv_target", vol.qv_target},
           {"mean_abs_rate_mid", vol.mean_abs_rate_mid},
           {"mean_abs_rate_near_end", vol.mean_abs_rate_near_end}};
    json buckets = json::array();
    for (const auto& b : vol.buckets) {
        buckets.push_back(json{{"t_center", b.t_center},
                               {"slope", b.slope},
                               {"slope_se", b.slope_se},
                               {"F0", b.f0_ref},
                               {"n_obs", b.n_obs}});
    }
    j["ou_slope_buckets"] = buckets;
    json ac = json::array();
    for (const auto& [lag, corr] : vol.abs_rate_autocorr) {
        ac.push_back(json{{"lag", lag}, {"corr", corr}});
    }
    j["abs_rate_autocorr"] = ac;
    write_text_file(out_path(c, "sim_summary.json"), j.dump(2) + "\n");

    std::printf("paths = %zu, terminal gap = %s, drift residual = %s\n", ens.n_paths,
                format_g17(ens.max_terminal_gap).c_str(),
                format_g17(ens.max_drift_residual).c_str());
    return kExitOk;
}

struct SweepOpts {
    std::string axis = "lambda";
    std::string values_csv;
    std::size_t steps = 4096;
    bool force = false;
};

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::istringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse sweep value '" + tok + "'");
        }
        if (pos != tok.size()) throw std::invalid_argument("cannot parse sweep value '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

int cmd_sweep(const CommonOpts& c, const SweepOpts& o) {
    const ModelParams base = resolve_params(c);
    const std::vector<double> values = parse_values(o.values_csv);
    if (values.empty()) throw std::invalid_argument("--values must not be empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw std::invalid_argument("sweep values must be finite");
        if (i > 0 && !(values[i] > values[i - 1])) {
            throw std::invalid_argument("sweep values must be strictly increasing");
        }
    }
    if (o.axis != "lambda" && o.axis != "eps") {
        throw std::invalid_argument("--axis must be lambda or eps");
    }

    std::ostringstream csv;
    csv << "axis,value,satisfied,discount_numeric,discount_leading,B0,vol_corr_sign,premium_mean\n";
    std::size_t solved = 0;
    for (double v : o.values) {
        ModelParams p = base;
        if (o.axis == "lambda") {
            p.lambda_cost = v;
        } else {
            // keep gamma_hat fixed, split the difference symmetrically
            const double ghat = 0.5 * (base.gamma1 + base.gamma2);
            p.gamma1 = ghat + 0.5 * v;
            p.gamma2 = ghat - 0.5 * v;
        }
        p.validate();
        const ExistenceReport rep = check_existence(p);
        csv << o.axis << ',' << format_g17(v) << ',' << (rep.satisfied ? 1 : 0);
        if (!rep.satisfied && !o.force) {
            csv << ",nan,nan,nan,nan,nan\n";
            continue;
        }
        const RiccatiSolution sol = solve_direct(p, o.steps, true);
        const double disc_num = illiquidity_discount(p, DiscountMode::numeric, &sol);
        const double disc_lead = illiquidity_discount(p, DiscountMode::leading);
        const double b0 = sol.coeff(Coeff::B).front();
        const int sign = b0 > 0.0 ? 1 : (b0 < 0.0 ? -1 : 0);
        const double prem = expected_premium(sol, p, 0.5 * p.horizon);
        csv << ',' << format_g17(disc_num) << ',' << format_g17(disc_lead) << ','
            << format_g17(b0) << ',' << sign << ',' << format_g17(prem) << '\n';
        ++solved;
    }
    write_text_file(out_path(c, "sweep.csv"), csv.str());
    if (solved == 0) {
        std::fprintf(stderr, "error: every sweep point failed the existence check\n");
        return kExitValidation;
    }
    std::printf("sweep: %zu of %zu points solved\n", solved, o.values.size());
    return kExitOk;
}

struct TrackOpts {
    std::size_t steps = 4096;
    std::vector<std::size_t> dp_steps{250, 500, 1000};
};

int cmd_tracking_verify(const CommonOpts& c, const TrackOpts& o) {
    const ModelParams p = resolve_params(c);
    const DerivedScalars d = derive(p);

    // equilibrium-consistency setup: both agents at gamma_hat, sigma = a,
    // target = agent 1's frictionless position
    TrackingProblem prob;
    prob.gamma = d.gamma_hat;
    prob.lambda_cost = p.lambda_cost;
    prob.x0 = p.x1;
    prob.horizon = p.horizon;
    prob.sigma = PiecewiseConstant::constant(p.a);
    prob.k0 = PiecewiseConstant::constant(p.gamma2 * p.supply / (p.gamma1 + p.gamma2));
    prob.k1 = PiecewiseConstant::constant(-p.beta / p.a);
    const TrackingSolution ts = solve_tracking(prob, o.steps);

    ModelParams sym = p;
    sym.gamma1 = d.gamma_hat;
    sym.gamma2 = d.gamma_hat;
    const RiccatiSolution sol = solve_direct(sym, o.steps);

    double gain_gap = 0.0, d_gap = 0.0, e_gap = 0.0;
    for (std::size_t k = 0; k < ts.grid.size(); ++k) {
        gain_gap = std::max(gain_gap, std::abs(ts.c[k] + sol.coeff(Coeff::F)[k]));
        d_gap = std::max(d_gap, std::abs(ts.xi0[k] - sol.coeff(Coeff::D)[k]));
        e_gap = std::max(e_gap, std::abs(ts.xi1[k] - sol.coeff(Coeff::E)[k]));
    }

    json dp_table = json::array();
    std::printf("DP oracle gap |kappa(0)+c(0)|:\n");
    for (std::size_t n : o.dp_steps) {
        const DpOracle oracle = dp_oracle(prob, n);
        const double err = std::abs(oracle.kappa.front() + ts.c.front());
        dp_table.push_back(json{{"n_steps", n}, {"gap", err}});
        std::printf("  n=%5zu  gap=%s\n", n, format_g17(err).c_str());
    }

    // zero-volatility sanity: all feedback coefficients vanish
    TrackingProblem silent = prob;
    silent.sigma = PiecewiseConstant::constant(0.0);
    const DpOracle zero = dp_oracle(silent, o.dp_steps.front());
    double zero_gain = 0.0;
    for (double v : zero.kappa) zero_gain = std::max(zero_gain, std::abs(v));
    for (double v : zero.beta_w) zero_gain = std::max(zero_gain, std::abs(v));
    for (double v : zero.alpha) zero_gain = std::max(zero_gain, std::abs(v));

    std::printf("equilibrium consistency: |c+F| = %s, |xi0-D| = %s, |xi1-E| = %s\n",
                format_g17(gain_gap).c_str(), format_g17(d_gap).c_str(),
                format_g17(e_gap).c_str());

    json j{{"gain_vs_F_gap", gain_gap},
           {"signal_intercept_vs_D_gap", d_gap},
           {"signal_slope_vs_E_gap", e_gap},
           {"dp_kappa_gaps", dp_table},
           {"zero_sigma_max_gain", zero_gain}};
    write_text_file(out_path(c, "tracking_verify.json"), j.dump(2) + "\n");
    return kExitOk;
}

struct AsymOpts {
    std::size_t steps = 4096;
};

int cmd_asymptotics(const CommonOpts& c, const AsymOpts& o) {
    const ModelParams p = resolve_params(c);
    const AsymptoticKit kit(p);
    std::ostringstream csv;
    csv << "t,F0,E0,D0,B1,C1,A1\n";
    for (std::size_t k = 0; k <= o.steps; ++k) {
        const double t = static_cast<double>(k) * p.horizon / static_cast<double>(o.steps);
        csv << format_g17(t) << ',' << format_g17(kit.F0(t)) << ',' << format_g17(kit.E0(t))
            << ',' << format_g17(kit.D0(t)) << ',' << format_g17(kit.B1(t)) << ','
            << format_g17(kit.C1(t)) << ',' << format_g17(kit.A1(t)) << '\n';
    }
    write_text_file(out_path(c, "asymptotics.csv"), csv.str());
    json j{{"delta", kit.scalars().delta},
           {"discount_leading", illiquidity_discount(p, DiscountMode::leading)}};
    write_text_file(out_path(c, "asymptotics.json"), j.dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"equilibrium asset pricing with quadratic trading costs"};
    app.require_subcommand(1);

    CommonOpts check_c, solve_c, sim_c, sweep_c, track_c, asym_c;
    SolveOpts solve_o;
    SimOpts sim_o;
    SweepOpts sweep_o;
    TrackOpts track_o;
    AsymOpts asym_o;

    CLI::App* check = app.add_subcommand("check", "evaluate the existence bounds");
    add_common(check, check_c);

    CLI::App* solve = app.add_subcommand("solve", "solve the coupled Riccati system");
    add_common(solve, solve_c);
    solve->add_option("--steps", solve_o.steps, "grid steps (default 4096)");
    solve->add_option("--method", solve_o.method, "direct | picard | both");
    solve->add_flag("--force", solve_o.force, "proceed even if the existence bound fails");
    solve->add_option("--tol", solve_o.tol, "picard sup-norm tolerance");
    solve->add_option("--max-iter", solve_o.max_iter, "picard iteration cap");

    CLI::App* sim = app.add_subcommand("simulate", "simulate equilibrium paths");
    add_common(sim, sim_c);
    sim->add_option("--riccati-steps", sim_o.riccati_steps, "Riccati grid steps");
    sim->add_option("--steps", sim_o.cfg.n_steps, "simulation steps (must divide the grid)");
    sim->add_option("--paths", sim_o.cfg.n_paths, "number of paths");
    sim->add_option("--seed", sim_o.cfg.seed, "random seed");
    sim->add_option("--stride", sim_o.cfg.record_stride, "recording stride");
    sim->add_flag("--force", sim_o.force, "proceed even if the existence bound fails");

    CLI::App* sweep = app.add_subcommand("sweep", "sweep lambda or eps and tabulate");
    add_common(sweep, sweep_c);
    sweep->add_option("--axis", sweep_o.axis, "lambda | eps");
    sweep->add_option("--values", sweep_o.values, "sweep values (ascending)")->required();
    sweep->add_option("--steps", sweep_o.steps, "grid steps");
    sweep->add_flag("--force", sweep_o.force, "solve points that fail the existence bound");

    CLI::App* track = app.add_subcommand("tracking-verify", "tracking solver vs DP oracle");
    add_common(track, track_c);
    track->add_option("--steps", track_o.steps, "solver grid steps");
    track->add_option("--dp-steps", track_o.dp_steps, "DP refinements");

    CLI::App* asym = app.add_subcommand("asymptotics", "emit closed-form coefficient tables");
    add_common(asym, asym_c);
    asym->add_option("--steps", asym_o.steps, "table rows");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (check->parsed()) return cmd_check(check_c);
        if (solve->parsed()) return cmd_solve(solve_c, solve_o);
        if (sim->parsed()) return cmd_simulate(sim_c, sim_o);
        if (sweep->parsed()) return cmd_sweep(sweep_c, sweep_o);
        if (track->parsed()) return cmd_tracking_verify(track_c, track_o);
        if (asym->parsed()) return cmd_asymptotics(asym_c, asym_o);
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolver;
    }
    return kExitOk;
}
