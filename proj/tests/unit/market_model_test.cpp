#include <gtest/gtest.h>

#include <cmath>

#include "tngpricer/errors.hpp"
#include "tngpricer/market_model.hpp"

namespace tngpricer {
namespace {

Firm sample_firm() { return Firm{"f", 100.0, 0.05, 0.25, 60.0, 0.3}; }

TEST(RisklessDiscount, Examples) {
    EXPECT_EQ(riskless_discount({0.05}, 0.0), 1.0);
    EXPECT_EQ(riskless_discount({0.0}, 10.0), 1.0);
    EXPECT_NEAR(riskless_discount({0.05}, 1.0), 0.951229, 1e-6);
    EXPECT_GT(riskless_discount({-0.01}, 2.0), 1.0);
    EXPECT_THROW(riskless_discount({0.05}, -0.1), DomainError);
}

TEST(QuasiDebtRatio, Examples) {
    EXPECT_EQ(quasi_debt_ratio(100, 100, {0.0}, 1.0), 1.0);
    EXPECT_EQ(quasi_debt_ratio(200, 100, {0.0}, 1.0), 0.5);
    EXPECT_NEAR(quasi_debt_ratio(100, 100, {0.05}, 1.0), 0.951229, 1e-6);
    EXPECT_THROW(quasi_debt_ratio(0.0, 100, {0.05}, 1.0), DomainError);
    EXPECT_THROW(quasi_debt_ratio(100, -1.0, {0.05}, 1.0), DomainError);
}

TEST(XOfV, Examples) {
    Firm f{"f", 100.0, 0.05, 0.2, 50.0, 0.0};
    EXPECT_EQ(x_of_v(f, f.v0, 0.0), 0.0);
    for (double t : {0.5, 1.0, 7.0}) EXPECT_NEAR(x_of_v(f, f.v0 * std::exp((f.mu - 0.02) * t), t), 0.0, 1e-12);
    EXPECT_NEAR(x_of_v(f, 110.0, 1.0), (std::log(1.1) - 0.03) / 0.2, 1e-14);
    EXPECT_NEAR(x_of_v(f, 110.0, 1.0), 0.32655, 1e-5);
    EXPECT_THROW(x_of_v(f, 0.0, 1.0), DomainError);
}

TEST(XOfV, StrictlyIncreasingAndInvertible) {
    const Firm f = sample_firm();
    double previous = -INFINITY;
    for (double v = 1.0; v < 400.0; v *= 1.07) {
        const double x = x_of_v(f, v, 0.75);
        EXPECT_GT(x, previous);
        EXPECT_NEAR(v_of_x(f, x, 0.75) / v, 1.0, 1e-13);
        previous = x;
    }
}

TEST(BarrierParams, Examples) {
    Firm f{"f", 100.0, 0.05, 0.25, 60.0, 0.0};
    const BarrierParams p = barrier_params(f);
    EXPECT_NEAR(p.beta, std::log(0.6) / 0.25, 1e-14);
    EXPECT_NEAR(p.beta, -2.04330, 1e-5);
    EXPECT_NEAR(p.gamma, -0.075, 1e-15);

    f.mu = 0.5 * f.sigma * f.sigma;
    EXPECT_EQ(barrier_params(f).gamma, 0.0);

    f.barrier = 100.0 - 1e-9;
    EXPECT_NEAR(barrier_params(f).beta, 0.0, 1e-10);
    EXPECT_LT(barrier_params(f).beta, 0.0);
}

TEST(BarrierLevel, Examples) {
    EXPECT_EQ(barrier_level({-2.0, 0.3}, 0.0), -2.0);
    EXPECT_EQ(barrier_level({-2.0, 0.0}, 9.0), -2.0);
    EXPECT_NEAR(barrier_level({-2.04330, -0.075}, 2.0), -2.19330, 1e-12);
    EXPECT_THROW(barrier_level({-1.0, 0.0}, -1.0), DomainError);
}

TEST(BarrierLevel, AffineInTime) {
    const BarrierParams p = barrier_params(sample_firm());
    for (double t1 : {0.0, 0.3, 2.0})
        for (double t2 : {0.1, 1.7, 5.0})
            EXPECT_NEAR(barrier_level(p, t1) + barrier_level(p, t2), 2.0 * barrier_level(p, 0.5 * (t1 + t2)), 1e-12);
}

TEST(Barrier, AssetBarrierMapsOntoStandardizedBarrier) {
    for (double mu : {-0.05, 0.0, 0.03, 0.2}) {
        Firm f = sample_firm();
        f.mu = mu;
        const BarrierParams p = barrier_params(f);
        for (double t : {0.0, 0.25, 1.0, 10.0}) EXPECT_NEAR(x_of_v(f, f.barrier, t) - barrier_level(p, t), 0.0, 1e-12);
    }
}

TEST(FirmValidation, NamesTheOffendingField) {
    Firm f = sample_firm();
    EXPECT_NO_THROW(validate(f, "firms[0]"));
    f.sigma = 0.0;
    try {
        validate(f, "firms[3]");
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.field(), "firms[3].sigma");
    }
    f = sample_firm();
    f.barrier = f.v0;
    EXPECT_THROW(validate(f), SchemaError);
    f = sample_firm();
    f.alpha = 1.2;
    EXPECT_THROW(validate(f), SchemaError);
}

TEST(RiskNeutralFirm, UsesCurveRate) {
    const Firm f = risk_neutral_firm("x", 100, 0.2, 50, 0.1, FlatCurve{-0.01});
    EXPECT_EQ(f.mu, -0.01);
}

}  // namespace
}  // namespace tngpricer
