#pragma once

// Reference computations used by the test suites. Nothing here calls into the
// library's pricing or simulation paths; random numbers come from <random>.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "tngpricer/market_model.hpp"

namespace tngpricer::oracle {

/// Composite Simpson rule on [lo, hi] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int panels) {
    if (panels % 2) ++panels;
    const double h = (hi - lo) / panels;
    double sum = f(lo) + f(hi);
    for (int k = 1; k < panels; ++k) sum += f(lo + k * h) * (k % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

/// Phi(x) by quadrature of the normal density from the symmetry point.
inline double normal_cdf_quadrature(double x) {
    const auto density = [](double s) { return std::exp(-0.5 * s * s) / std::sqrt(2.0 * std::numbers::pi); };
    return 0.5 + simpson(density, 0.0, x, 20000);
}

inline double erfc_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double black_scholes_call(double spot, double strike, double r, double tau, double sigma) {
    const double s = sigma * std::sqrt(tau);
    const double d1 = (std::log(spot / strike) + (r + 0.5 * sigma * sigma) * tau) / s;
    return spot * erfc_cdf(d1) - strike * std::exp(-r * tau) * erfc_cdf(d1 - s);
}

/// P(first passage of W_s - gamma s below beta by time t), the inverse-Gaussian law with b = beta, nu = -gamma.
inline double first_passage_cdf(double beta, double gamma, double t) {
    const double nu = -gamma;
    const double rt = std::sqrt(t);
    return erfc_cdf((beta - nu * t) / rt) + std::exp(2.0 * nu * beta) * erfc_cdf((beta + nu * t) / rt);
}

/// E[exp(-r tau) 1{tau <= T}] for a default time with CDF G, via integration by parts:
/// e^{-rT} G(T) + r int_0^T e^{-rs} G(s) ds.
inline double discounted_default_weight(const std::function<double(double)>& cdf, double r, double maturity) {
    const auto integrand = [&](double s) { return s == 0.0 ? 0.0 : std::exp(-r * s) * cdf(s); };
    return std::exp(-r * maturity) * cdf(maturity) + r * simpson(integrand, 0.0, maturity, 4000);
}

/// Firm whose standardized barrier is beta + gamma t.
inline Firm firm_with_barrier(std::string id, double beta, double gamma, double alpha, double sigma = 0.2,
                              double v0 = 100.0) {
    Firm f;
    f.id = std::move(id);
    f.v0 = v0;
    f.sigma = sigma;
    f.mu = 0.5 * sigma * sigma - gamma * sigma;
    f.barrier = v0 * std::exp(beta * sigma);
    f.alpha = alpha;
    return f;
}

struct MeanAndError {
    double mean = 0.0;
    double standard_error = 0.0;
};

/// E[e^{-r tau} min(V_tau, B)] with V_tau lognormal under the risk-neutral drift.
inline MeanAndError merton_terminal_mc(double v0, double face, double r, double tau, double sigma,
                                       std::size_t paths, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const double drift = (r - 0.5 * sigma * sigma) * tau;
    const double vol = sigma * std::sqrt(tau);
    const double discount = std::exp(-r * tau);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t p = 0; p < paths; ++p) {
        const double payoff = discount * std::min(v0 * std::exp(drift + vol * normal(rng)), face);
        sum += payoff;
        sum_sq += payoff * payoff;
    }
    const double n = static_cast<double>(paths);
    const double mean = sum / n;
    return {mean, std::sqrt((sum_sq / n - mean * mean) / (n - 1.0))};
}

/// Solves 1/2 sigma^2 V^2 F'' + (r V - C) F' - r F + C = 0, F(0) = 0, F(inf) = C/r,
/// in x = ln V on [ln v_lo, ln v_hi] by finite differences and a
/// tridiagonal (Thomas) solve. Returns F at `v` by linear interpolation in x.
inline std::vector<double> perpetual_ode(double coupon, double r, double sigma, const std::vector<double>& v,
                                         double v_lo = 1e-3, double v_hi = 1e7, int nodes = 400001) {
    const double x0 = std::log(v_lo);
    const double x1 = std::log(v_hi);
    const double h = (x1 - x0) / (nodes - 1);
    const double a = 0.5 * sigma * sigma;
    // The coupon is paid out of the firm: dV = (rV - C) dt + sigma V dW. In x = ln V:
    // a F'' + (r - a - C e^{-x}) F' - r F = -C
    const int m = nodes - 2;
    std::vector<double> c_prime(m), d_prime(m);
    const double left = 0.0;
    const double right = coupon / r;
    for (int i = 0; i < m; ++i) {
        const double b = r - a - coupon * std::exp(-(x0 + (i + 1) * h));
        // central drift where the stencil stays monotone, upwind near V = 0
        const bool central = std::abs(b) * h <= 2.0 * a;
        const double lower = a / (h * h) - (central ? b / (2 * h) : std::min(b, 0.0) / h);
        const double upper = a / (h * h) + (central ? b / (2 * h) : std::max(b, 0.0) / h);
        const double diag = -2.0 * a / (h * h) - r - (central ? 0.0 : std::abs(b) / h);
        double rhs = -coupon;
        if (i == 0) rhs -= lower * left;
        if (i == m - 1) rhs -= upper * right;
        const double denom = diag - (i ? lower * c_prime[i - 1] : 0.0);
        c_prime[i] = upper / denom;
        d_prime[i] = (rhs - (i ? lower * d_prime[i - 1] : 0.0)) / denom;
    }
    std::vector<double> f(nodes);
    f[0] = left;
    f[nodes - 1] = right;
    f[m] = d_prime[m - 1];
    for (int i = m - 2; i >= 0; --i) f[i + 1] = d_prime[i] - c_prime[i] * f[i + 2];

    std::vector<double> out;
    for (double value : v) {
        const double pos = (std::log(value) - x0) / h;
        const auto k = static_cast<int>(std::floor(pos));
        const double w = pos - k;
        out.push_back((1.0 - w) * f[k] + w * f[k + 1]);
    }
    return out;
}

/// Two correlated Brownian motions (Cholesky of [[1, rho], [rho, 1]]) with
/// per-step bridge-crossing checks; returns default-by-t indicator correlation
/// as a batch-means estimate.
inline MeanAndError two_firm_default_correlation(double beta, double rho, double t, std::size_t paths,
                                                 std::size_t steps, std::uint64_t seed, std::size_t batches = 20) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    const double dt = t / static_cast<double>(steps);
    const double sd = std::sqrt(dt);
    const double ortho = std::sqrt(1.0 - rho * rho);
    std::vector<double> estimates;
    const std::size_t per_batch = paths / batches;
    for (std::size_t batch = 0; batch < batches; ++batch) {
        double na = 0, nb = 0, nab = 0;
        for (std::size_t p = 0; p < per_batch; ++p) {
            double xa = 0, xb = 0;
            bool da = false, db = false;
            for (std::size_t k = 0; k < steps && !(da && db); ++k) {
                const double z1 = normal(rng), z2 = normal(rng);
                const double ya = xa + sd * z1;
                const double yb = xb + sd * (rho * z1 + ortho * z2);
                const double ua = uniform(rng), ub = uniform(rng);
                if (!da) da = ya <= beta || ua < std::exp(-2.0 * (xa - beta) * (ya - beta) / dt);
                if (!db) db = yb <= beta || ub < std::exp(-2.0 * (xb - beta) * (yb - beta) / dt);
                xa = ya;
                xb = yb;
            }
            na += da;
            nb += db;
            nab += da && db;
        }
        const double n = static_cast<double>(per_batch);
        const double pa = na / n, pb = nb / n;
        estimates.push_back((nab / n - pa * pb) / std::sqrt(pa * (1 - pa) * pb * (1 - pb)));
    }
    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= static_cast<double>(batches);
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    var /= static_cast<double>(batches - 1);
    return {mean, std::sqrt(var / static_cast<double>(batches))};
}

}  // namespace tngpricer::oracle
