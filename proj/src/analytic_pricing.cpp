#include "tngpricer/analytic_pricing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tngpricer/errors.hpp"
#include "tngpricer/numerics.hpp"

namespace tngpricer {

namespace {

void require_positive(double value, const char* what) {
    if (!std::isfinite(value) || value <= 0.0) {
        std::ostringstream msg;
        msg << what << " must be positive, got " << value;
        throw DomainError(msg.str());
    }
}

}  // namespace

MertonH merton_h(double d, double sigma2tau) {
    require_positive(d, "merton_h: d");
    require_positive(sigma2tau, "merton_h: sigma^2 tau");
    const double s = std::sqrt(sigma2tau);
    const double log_d = std::log(d);
    return {-(0.5 * sigma2tau - log_d) / s, -(0.5 * sigma2tau + log_d) / s};
}

double merton_discount_bond(double firm_value, const DiscountBondSpec& spec, const FlatCurve& curve,
                            double sigma) {
    require_positive(firm_value, "merton_discount_bond: firm value");
    require_positive(spec.face, "merton_discount_bond: face");
    require_positive(spec.maturity, "merton_discount_bond: maturity");
    require_positive(sigma, "merton_discount_bond: sigma");
    if (!std::isfinite(curve.r)) throw DomainError("merton_discount_bond: rate must be finite");

    const double riskless = spec.face * riskless_discount(curve, spec.maturity);
    const double sigma2tau = sigma * sigma * spec.maturity;
    if (std::sqrt(sigma2tau) < 1e-12) return std::min(firm_value, riskless);

    const double d = riskless / firm_value;
    const auto [h1, h2] = merton_h(d, sigma2tau);
    // B e^{-r tau} Phi(h1) / d == V Phi(h1)
    const double price = riskless * norm_cdf(h2) + firm_value * norm_cdf(h1);
    return std::min({price, firm_value, riskless});
}

double credit_spread(double price, const DiscountBondSpec& spec, const FlatCurve& curve) {
    require_positive(price, "credit_spread: price");
    require_positive(spec.face, "credit_spread: face");
    require_positive(spec.maturity, "credit_spread: maturity");
    const double riskless = spec.face * riskless_discount(curve, spec.maturity);
    if (price > riskless * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "credit_spread: price " << price << " exceeds the riskless value " << riskless;
        throw DomainError(msg.str());
    }
    return std::max(0.0, -std::log(price / spec.face) / spec.maturity - curve.r);
}

double perpetual_coupon_bond(double firm_value, const PerpetualBondSpec& spec, const FlatCurve& curve,
                             double sigma) {
    if (!(curve.r > 0.0)) throw DomainError("perpetual_coupon_bond: perpetual formula requires positive rate");
    require_positive(firm_value, "perpetual_coupon_bond: firm value");
    require_positive(spec.coupon_rate, "perpetual_coupon_bond: coupon rate");
    require_positive(sigma, "perpetual_coupon_bond: sigma");

    const double riskless = spec.coupon_rate / curve.r;
    const double a = 2.0 * curve.r / (sigma * sigma);
    const double z = 2.0 * spec.coupon_rate / (sigma * sigma * firm_value);

    // z^a e^{-z} / Gamma(2 + a) * M(2, 2 + a, z)   (Kummer transformation of M(a, 2 + a, -z))
    const double log_scale = a * std::log(z) - z - ln_gamma(2.0 + a);
    const double default_weight = std::exp(log_scale) * kummer_m(2.0, 2.0 + a, z);
    if (!std::isfinite(default_weight)) throw NumericError("perpetual_coupon_bond: non-finite intermediate");

    const double price = riskless * (1.0 - default_weight);
    return std::clamp(price, 0.0, std::nextafter(riskless, 0.0));
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi > lo)) throw DomainError("uniform_grid: need hi > lo and step > 0");
    const auto intervals = static_cast<std::size_t>(std::llround((hi - lo) / step));
    std::vector<double> grid(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) grid[i] = lo + static_cast<double>(i) * step;
    grid.back() = hi;
    return grid;
}

GridSurface sample_surface(const std::function<double(double, double)>& claim, std::vector<double> v_grid,
                           std::vector<double> tau_grid) {
    GridSurface surface{std::move(v_grid), std::move(tau_grid), {}};
    surface.values = Matrix(surface.v_grid.size(), surface.tau_grid.size());
    for (std::size_t i = 0; i < surface.v_grid.size(); ++i)
        for (std::size_t j = 0; j < surface.tau_grid.size(); ++j)
            surface.values(i, j) = claim(surface.v_grid[i], surface.tau_grid[j]);
    return surface;
}

namespace {

void check_axis(const std::vector<double>& axis, const char* name, double lower_bound, bool strict_lower) {
    if (axis.size() < 3) throw DomainError(std::string("pde_residual: ") + name + " needs at least 3 points");
    for (std::size_t i = 0; i < axis.size(); ++i) {
        if (!std::isfinite(axis[i])) throw DomainError(std::string("pde_residual: ") + name + " has a non-finite node");
        if (i > 0 && !(axis[i] > axis[i - 1]))
            throw DomainError(std::string("pde_residual: ") + name + " must be strictly increasing");
    }
    if (strict_lower ? !(axis.front() > lower_bound) : !(axis.front() >= lower_bound))
        throw DomainError(std::string("pde_residual: ") + name + " out of range");
}

struct Stencil {
    double lower, centre, upper;
};

// Three-point weights for the first and second derivative at x[i].
Stencil first_derivative(const std::vector<double>& x, std::size_t i) {
    const double h1 = x[i] - x[i - 1];
    const double h2 = x[i + 1] - x[i];
    return {-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))};
}

Stencil second_derivative(const std::vector<double>& x, std::size_t i) {
    const double h1 = x[i] - x[i - 1];
    const double h2 = x[i + 1] - x[i];
    return {2.0 / (h1 * (h1 + h2)), -2.0 / (h1 * h2), 2.0 / (h2 * (h1 + h2))};
}

}  // namespace

Matrix pde_residual(const GridSurface& surface, const FlatCurve& curve, double sigma,
                    const PayoutFunction& payout_firm, const PayoutFunction& payout_claim) {
    check_axis(surface.v_grid, "v_grid", 0.0, true);
    check_axis(surface.tau_grid, "tau_grid", 0.0, false);
    require_positive(sigma, "pde_residual: sigma");
    const std::size_t nv = surface.v_grid.size();
    const std::size_t nt = surface.tau_grid.size();
    if (surface.values.rows() != nv || surface.values.cols() != nt)
        throw DomainError("pde_residual: value matrix does not match the grids");
    for (double value : surface.values.data())
        if (!std::isfinite(value)) throw DomainError("pde_residual: surface has non-finite values");

    const auto& f = surface.values;
    const double half_var = 0.5 * sigma * sigma;
    Matrix residual(nv - 2, nt - 2);
    for (std::size_t i = 1; i + 1 < nv; ++i) {
        const double v = surface.v_grid[i];
        const Stencil dv = first_derivative(surface.v_grid, i);
        const Stencil dvv = second_derivative(surface.v_grid, i);
        for (std::size_t j = 1; j + 1 < nt; ++j) {
            const double tau = surface.tau_grid[j];
            const Stencil dt = first_derivative(surface.tau_grid, j);
            const double f_v = dv.lower * f(i - 1, j) + dv.centre * f(i, j) + dv.upper * f(i + 1, j);
            const double f_vv = dvv.lower * f(i - 1, j) + dvv.centre * f(i, j) + dvv.upper * f(i + 1, j);
            const double f_tau = dt.lower * f(i, j - 1) + dt.centre * f(i, j) + dt.upper * f(i, j + 1);
            const double p = payout_firm ? payout_firm(v, tau) : 0.0;
            const double p_claim = payout_claim ? payout_claim(v, tau) : 0.0;
            residual(i - 1, j - 1) =
                half_var * v * v * f_vv + (curve.r * v - p) * f_v - curve.r * f(i, j) - f_tau + p_claim;
        }
    }
    return residual;
}

double max_relative_residual(const GridSurface& surface, const Matrix& residual) {
    double worst = 0.0;
    for (std::size_t i = 0; i < residual.rows(); ++i)
        for (std::size_t j = 0; j < residual.cols(); ++j)
            worst = std::max(worst, std::abs(residual(i, j)) / std::abs(surface.values(i + 1, j + 1)));
    return worst;
}

}  // namespace tngpricer
