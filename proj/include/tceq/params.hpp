#pragma once

namespace tceq {

// Exogenous constants of the linear benchmark model. Two agents with
// mean-variance preferences trade one risky asset against quadratic costs
// on the trading rate; endowment volatilities are +/- beta*W and the
// terminal price condition is b*T + a*W_T.
struct ModelParams {
    double gamma1 = 2.0;       // risk aversion, agent 1 (> 0)
    double gamma2 = 2.0;       // risk aversion, agent 2 (> 0)
    double lambda_cost = 1.0;  // quadratic cost weight on the trading rate (> 0)
    double a = 1.0;            // terminal-condition slope (> 0)
    double b = 0.0;            // terminal-condition intercept per unit time
    double beta = 0.5;         // endowment-volatility slope (> 0)
    double supply = 1.0;       // total risky supply s
    double x1 = 0.5;           // agent 1 initial position (agent 2 holds supply - x1)
    double horizon = 1.0;      // T (> 0)

    // Throws std::invalid_argument naming the violated field.
    void validate() const;
};

struct DerivedScalars {
    double gamma_bar;  // gamma1*gamma2/(gamma1+gamma2)
    double eps;        // gamma1 - gamma2
    double gamma_hat;  // (gamma1+gamma2)/2
    double delta;      // sqrt((gamma1+gamma2)*a^2/(2*lambda))
};

DerivedScalars derive(const ModelParams& p);

// Canonical benchmark sets used throughout the tests and docs.
ModelParams reference_params();            // symmetric, gamma1 = gamma2 = 2
ModelParams perturbed_reference_params();  // gamma1 = 1.95, gamma2 = 2.05

}  // namespace tceq
