#pragma once

#include <string>

namespace tngpricer {

/// Flat, non-stochastic term structure with continuously compounded rate r.
/// Zero and negative rates are allowed.
struct FlatCurve {
    double r = 0.0;
};

/// One obligor's asset process dV = mu V dt + sigma V dX, with default once
/// V falls to `barrier` and loading `alpha` on the common factor.
struct Firm {
    std::string id;
    double v0 = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
    double barrier = 0.0;
    double alpha = 0.0;
};

/// Builds a firm whose drift is the risk-neutral one, mu = r.
Firm risk_neutral_firm(std::string id, double v0, double sigma, double barrier, double alpha,
                       const FlatCurve& curve);

/// Throws SchemaError naming `<prefix>.<field>` for the first violated invariant.
void validate(const Firm& firm, const std::string& prefix = "firm");
void validate(const FlatCurve& curve, const std::string& prefix = "curve");

/// Default barrier in the standardized coordinate: B*(t) = beta + gamma t.
struct BarrierParams {
    double beta = 0.0;
    double gamma = 0.0;
};

/// exp(-r tau); tau must be >= 0.
double riskless_discount(const FlatCurve& curve, double tau);

/// d = B exp(-r tau) / V.
double quasi_debt_ratio(double firm_value, double face, const FlatCurve& curve, double tau);

/// X(t) = [ln V(t) - ln V(0) - (mu - sigma^2/2) t] / sigma.
double x_of_v(const Firm& firm, double v_t, double t);

/// Inverse of x_of_v: the asset value at which the standardized process equals x.
double v_of_x(const Firm& firm, double x, double t);

BarrierParams barrier_params(const Firm& firm);

double barrier_level(const BarrierParams& params, double t);

}  // namespace tngpricer
