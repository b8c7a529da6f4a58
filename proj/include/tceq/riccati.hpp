#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "tceq/params.hpp"

// Coupled backward Riccati system for the equilibrium with transaction costs:
//   price  S_t = S_bar_t + A + B W_t + C phi1_t
//   rate   dphi1/dt = D + E W_t + F phi1_t
// All six coefficients vanish at t = T.
namespace tceq {

enum class Coeff { A = 0, B, C, D, E, F };
enum class RiccatiMethod { direct, picard };

struct RiccatiSolution {
    ModelParams params;
    std::vector<double> grid;                   // t_0 = 0, ..., t_N = T, uniform
    std::array<std::vector<double>, 6> coeffs;  // A,B,C,D,E,F sampled on the grid
    double step = 0.0;                          // h = T/N
    double residual = 0.0;                      // max ODE residual, see residual_norm
    RiccatiMethod method = RiccatiMethod::direct;
    int picard_iters = 0;                       // 0 for the direct solver
    std::vector<double> picard_gaps;            // sup-norm gap per outer iteration

    std::size_t n_steps() const { return grid.size() - 1; }
    const std::vector<double>& coeff(Coeff c) const {
        return coeffs[static_cast<std::size_t>(c)];
    }
};

struct ExistenceReport {
    double bound1;
    double bound2;
    double eps_abs;
    bool satisfied;  // eps_abs < min(bound1, bound2)
    double margin;   // min(bound1, bound2) - eps_abs
};

// Exact evaluation of the explicit sufficient bounds on |gamma1 - gamma2|.
ExistenceReport check_existence(const ModelParams& p);

// Right-hand side of the joint six-dimensional system at state y = (A..F).
std::array<double, 6> riccati_rhs(const ModelParams& p, const std::array<double, 6>& y);

// Classical RK4, fixed step, integrated backward from the zero terminal
// condition. Throws unless the existence bound holds or force is set; throws
// on non-finite state naming the first failing grid time.
RiccatiSolution solve_direct(const ModelParams& p, std::size_t n_steps, bool force = false);

struct PicardOptions {
    double tol = 1e-10;  // sup-norm gap between successive B iterates
    int max_iter = 200;
    bool force = false;  // proceed even if the existence bound fails
};

// Fixed-point iteration on B alone: given the previous iterate, (C,E,F) are
// rebuilt from their explicit integral solutions, then B is updated by
// quadrature of its own equation. A and D are computed once at the end.
RiccatiSolution solve_picard(const ModelParams& p, std::size_t n_steps,
                             const PicardOptions& opt = {});

// Cubic Hermite interpolation using the ODE right-hand sides as exact slopes.
double eval_coeff(const RiccatiSolution& sol, Coeff which, double t);

// Max over interior grid nodes and all six equations of
// |centered difference - right-hand side|.
double residual_norm(const RiccatiSolution& sol);

// Assemble a solution object from raw grid data (diagnostics and tests).
RiccatiSolution make_solution(const ModelParams& p, std::vector<double> grid,
                              std::array<std::vector<double>, 6> coeffs,
                              RiccatiMethod method);

// CSV export: header t,A,B,C,D,E,F, one row per node, 17 significant digits.
void write_riccati_csv(const RiccatiSolution& sol, std::ostream& os);

}  // namespace tceq
