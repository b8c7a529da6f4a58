#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "json.hpp"
#include "tceq/io.hpp"
#include "tceq/params.hpp"

using namespace tceq;

TEST_CASE("derive: symmetric reference set") {
    const ModelParams p = reference_params();
    const DerivedScalars d = derive(p);
    CHECK(d.gamma_bar == 1.0);
    CHECK(d.eps == 0.0);
    CHECK(d.gamma_hat == 2.0);
    CHECK(d.delta == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    // delta^2 = (gamma1+gamma2) a^2 / (2 lambda)
    CHECK(d.delta * d.delta == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("derive: perturbed reference set") {
    const ModelParams p = perturbed_reference_params();
    const DerivedScalars d = derive(p);
    CHECK(d.eps == doctest::Approx(-0.10).epsilon(1e-14));
    CHECK(d.gamma_bar == doctest::Approx(0.999375).epsilon(1e-14));
    CHECK(d.gamma_hat == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("derive is deterministic") {
    const ModelParams p = perturbed_reference_params();
    const DerivedScalars d1 = derive(p);
    const DerivedScalars d2 = derive(p);
    CHECK(d1.gamma_bar == d2.gamma_bar);
    CHECK(d1.eps == d2.eps);
    CHECK(d1.gamma_hat == d2.gamma_hat);
    CHECK(d1.delta == d2.delta);
}

TEST_CASE("gamma_bar * (gamma1+gamma2) = gamma1*gamma2 within one rounding unit") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 200; ++i) {
        ModelParams p;
        p.gamma1 = u(gen);
        p.gamma2 = u(gen);
        const DerivedScalars d = derive(p);
        const double lhs = d.gamma_bar * (p.gamma1 + p.gamma2);
        const double rhs = p.gamma1 * p.gamma2;
        CHECK(std::abs(lhs - rhs) <= 2.0 * std::numeric_limits<double>::epsilon() * rhs);
        CHECK(d.gamma_bar <= std::min(p.gamma1, p.gamma2));
        CHECK(d.delta > 0.0);
    }
}

TEST_CASE("validate rejects bad fields by name") {
    ModelParams p = reference_params();
    p.lambda_cost = 0.0;
    CHECK_THROWS_WITH_AS(p.validate(), "lambda_cost must be positive", std::invalid_argument);

    p = reference_params();
    p.horizon = -1.0;
    CHECK_THROWS_WITH_AS(p.validate(), "horizon must be positive", std::invalid_argument);

    p = reference_params();
    p.b = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    CHECK_NOTHROW(reference_params().validate());
}

TEST_CASE("json config round trip, strict keys") {
    const ModelParams p = perturbed_reference_params();
    const nlohmann::json j = params_to_json(p);
    const ModelParams q = params_from_json(j);
    CHECK(q.gamma1 == p.gamma1);
    CHECK(q.gamma2 == p.gamma2);
    CHECK(q.lambda_cost == p.lambda_cost);
    CHECK(q.horizon == p.horizon);

    nlohmann::json bad = j;
    bad["typo_key"] = 1.0;
    CHECK_THROWS_AS(params_from_json(bad), std::invalid_argument);

    nlohmann::json missing = j;
    missing.erase("beta");
    CHECK_THROWS_AS(params_from_json(missing), std::invalid_argument);

    nlohmann::json wrong_type = j;
    wrong_type["a"] = "one";
    CHECK_THROWS_AS(params_from_json(wrong_type), std::invalid_argument);
}
