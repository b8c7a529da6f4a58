#include "tceq/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tceq {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be finite");
    }
}

void require_positive(double v, const char* name) {
    require_finite(v, name);
    if (v <= 0.0) {
        throw std::invalid_argument(std::string(name) + " must be positive");
    }
}

}  // namespace

void ModelParams::validate() const {
    require_positive(gamma1, "gamma1");
    require_positive(gamma2, "gamma2");
    require_positive(lambda_cost, "lambda_cost");
    require_positive(a, "a");
    require_positive(beta, "beta");
    require_positive(horizon, "horizon");
    require_finite(b, "b");
    require_finite(supply, "supply");
    require_finite(x1, "x1");
}

DerivedScalars derive(const ModelParams& p) {
    p.validate();
    DerivedScalars d;
    d.gamma_bar = p.gamma1 * p.gamma2 / (p.gamma1 + p.gamma2);
    d.eps = p.gamma1 - p.gamma2;
    d.gamma_hat = 0.5 * (p.gamma1 + p.gamma2);
    d.delta = std::sqrt((p.gamma1 + p.gamma2) * p.a * p.a / (2.0 * p.lambda_cost));
    return d;
}

ModelParams reference_params() {
    return ModelParams{};
}

ModelParams perturbed_reference_params() {
    ModelParams p;
    p.gamma1 = 1.95;
    p.gamma2 = 2.05;
    return p;
}

}  // namespace tceq
