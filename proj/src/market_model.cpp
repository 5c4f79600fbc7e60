#include "tngpricer/market_model.hpp"

#include <cmath>

#include "tngpricer/errors.hpp"

namespace tngpricer {

Firm risk_neutral_firm(std::string id, double v0, double sigma, double barrier, double alpha,
                       const FlatCurve& curve) {
    return Firm{std::move(id), v0, curve.r, sigma, barrier, alpha};
}

void validate(const Firm& firm, const std::string& prefix) {
    auto fail = [&](const char* field, const char* what) { throw SchemaError(prefix + "." + field, what); };
    if (firm.id.empty()) fail("id", "must be a nonempty identifier");
    if (!std::isfinite(firm.v0) || firm.v0 <= 0.0) fail("v0", "must be positive");
    if (!std::isfinite(firm.mu)) fail("mu", "must be finite");
    if (!std::isfinite(firm.sigma) || firm.sigma <= 0.0) fail("sigma", "must be positive");
    if (!std::isfinite(firm.barrier) || firm.barrier <= 0.0 || firm.barrier >= firm.v0)
        fail("barrier", "must satisfy 0 < barrier < v0");
    if (!std::isfinite(firm.alpha) || std::abs(firm.alpha) > 1.0) fail("alpha", "must lie in [-1, 1]");
}

void validate(const FlatCurve& curve, const std::string& prefix) {
    if (!std::isfinite(curve.r)) throw SchemaError(prefix + ".r", "must be finite");
}

double riskless_discount(const FlatCurve& curve, double tau) {
    if (!(tau >= 0.0)) throw DomainError("riskless_discount: tau must be nonnegative");
    return std::exp(-curve.r * tau);
}

double quasi_debt_ratio(double firm_value, double face, const FlatCurve& curve, double tau) {
    if (!(firm_value > 0.0) || !(face > 0.0)) throw DomainError("quasi_debt_ratio: firm value and face must be positive");
    return face * riskless_discount(curve, tau) / firm_value;
}

double x_of_v(const Firm& firm, double v_t, double t) {
    if (!(v_t > 0.0)) throw DomainError("x_of_v: asset value must be positive");
    return (std::log(v_t) - std::log(firm.v0) - (firm.mu - 0.5 * firm.sigma * firm.sigma) * t) / firm.sigma;
}

double v_of_x(const Firm& firm, double x, double t) {
    return firm.v0 * std::exp(firm.sigma * x + (firm.mu - 0.5 * firm.sigma * firm.sigma) * t);
}

BarrierParams barrier_params(const Firm& firm) {
    return {(std::log(firm.barrier) - std::log(firm.v0)) / firm.sigma,
            -(firm.mu - 0.5 * firm.sigma * firm.sigma) / firm.sigma};
}

double barrier_level(const BarrierParams& params, double t) {
    if (!(t >= 0.0)) throw DomainError("barrier_level: t must be nonnegative");
    return params.beta + params.gamma * t;
}

}  // namespace tngpricer
