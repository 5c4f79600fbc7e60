#pragma once

#include <functional>
#include <vector>

#include "tngpricer/market_model.hpp"
#include "tngpricer/matrix.hpp"

namespace tngpricer {

/// Zero-coupon promise of `face` at `maturity` (years).
struct DiscountBondSpec {
    double face = 0.0;
    double maturity = 0.0;
};

/// Perpetual bond paying `coupon_rate` per year continuously.
struct PerpetualBondSpec {
    double coupon_rate = 0.0;
};

struct MertonH {
    double h1 = 0.0;
    double h2 = 0.0;
};

/// h1 = -(s/2 - ln d / s), h2 = -(s/2 + ln d / s) with s = sqrt(sigma2tau).
MertonH merton_h(double d, double sigma2tau);

/// Merton risky zero-coupon debt:
///   F = B e^{-r tau} { Phi(h2) + Phi(h1) / d },  d = B e^{-r tau} / V.
/// When sigma sqrt(tau) vanishes the price is the limit min(V, B e^{-r tau}).
double merton_discount_bond(double firm_value, const DiscountBondSpec& spec, const FlatCurve& curve,
                            double sigma);

/// Promised yield over the riskless rate: -ln(price / face) / tau - r.
double credit_spread(double price, const DiscountBondSpec& spec, const FlatCurve& curve);

/// Merton's perpetual risky coupon bond,
///   F = (C/r) { 1 - z^a / Gamma(2 + a) * M(a, 2 + a, -z) },  a = 2r/sigma^2, z = 2C/(sigma^2 V),
/// with M(a, 2 + a, -z) evaluated as e^{-z} M(2, 2 + a, z). Requires r > 0.
double perpetual_coupon_bond(double firm_value, const PerpetualBondSpec& spec, const FlatCurve& curve,
                             double sigma);

/// Claim values F(V, tau) on a rectangular grid; values(i, j) sits at (v_grid[i], tau_grid[j]).
struct GridSurface {
    std::vector<double> v_grid;
    std::vector<double> tau_grid;
    Matrix values;
};

/// Uniform grid from `lo` to `hi` inclusive with spacing `step`.
std::vector<double> uniform_grid(double lo, double hi, double step);

GridSurface sample_surface(const std::function<double(double v, double tau)>& claim, std::vector<double> v_grid,
                           std::vector<double> tau_grid);

using PayoutFunction = std::function<double(double v, double tau)>;

/// Residual of the valuation PDE in time-to-maturity form,
///   1/2 sigma^2 V^2 f_VV + (rV - p) f_V - r f - f_tau + p',
/// at interior nodes (three-point central differences, nonuniform spacing allowed).
/// Result is (n_v - 2) x (n_tau - 2); entry (i, j) belongs to node (i + 1, j + 1).
Matrix pde_residual(const GridSurface& surface, const FlatCurve& curve, double sigma,
                    const PayoutFunction& payout_firm = {}, const PayoutFunction& payout_claim = {});

/// max |residual(i, j)| / |f(i + 1, j + 1)| over interior nodes.
double max_relative_residual(const GridSurface& surface, const Matrix& residual);

}  // namespace tngpricer
