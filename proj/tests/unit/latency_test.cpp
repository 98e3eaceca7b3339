#include <gtest/gtest.h>

#include <cmath>

#include "tolldag/errors.hpp"
#include "tolldag/latency.hpp"

namespace tolldag {
namespace {

TEST(Latency, AffineValueAndSlope) {
    const LatencyFn s = LatencyFn::affine(2.0, 1.0);
    EXPECT_DOUBLE_EQ(s.value(0.5), 2.0);
    EXPECT_DOUBLE_EQ(s.derivative(0.5), 2.0);
    EXPECT_DOUBLE_EQ(s.second_derivative(0.5), 0.0);
}

TEST(Latency, AffineAtZeroFlow) {
    const LatencyFn s = LatencyFn::affine(1.0, 0.0);
    EXPECT_DOUBLE_EQ(s.value(0.0), 0.0);
    EXPECT_DOUBLE_EQ(s.derivative(0.0), 1.0);
}

TEST(Latency, BenchmarkFirstArcAtUnitFlow) {
    EXPECT_DOUBLE_EQ(LatencyFn::affine(2.0, 0.0).value(1.0), 2.0);
}

TEST(Latency, AffineIntegralClosedForm) {
    const LatencyFn s = LatencyFn::affine(2.0, 1.0);
    EXPECT_DOUBLE_EQ(s.integral(1.0), 2.0);
    EXPECT_DOUBLE_EQ(s.integral(0.0), 0.0);
}

TEST(Latency, BprMatchesFormula) {
    const LatencyFn s = LatencyFn::bpr(1.5, 0.8, 0.15, 4.0);
    const double w = 0.6;
    const double r = w / 0.8;
    EXPECT_NEAR(s.value(w), 1.5 * (1.0 + 0.15 * std::pow(r, 4)), 1e-15);
    EXPECT_NEAR(s.derivative(w), 1.5 * 0.15 * 4.0 * std::pow(r, 3) / 0.8, 1e-14);
    EXPECT_NEAR(s.integral(w), 1.5 * (w + 0.15 * 0.8 * std::pow(r, 5) / 5.0), 1e-14);
}

TEST(Latency, CustomIntegralByQuadrature) {
    const LatencyFn s = LatencyFn::custom([](double w) { return std::exp(w); },
                                          [](double w) { return std::exp(w); });
    EXPECT_NEAR(s.integral(1.3), std::exp(1.3) - 1.0, 1e-12);
    EXPECT_NEAR(s.value(0.2), std::exp(0.2), 1e-15);
}

TEST(Latency, NegativeFlowRejected) {
    const LatencyFn s = LatencyFn::affine(1.0, 0.0);
    EXPECT_THROW(s.value(-1e-3), NegativeFlow);
    EXPECT_THROW(s.value(std::nan("")), NegativeFlow);
}

TEST(Latency, ValidationRejectsNonIncreasing) {
    EXPECT_THROW(LatencyFn::affine(0.0, 1.0).validate(1.0), ValidationError);
    EXPECT_THROW(LatencyFn::affine(1.0, -0.5).validate(1.0), ValidationError);
    EXPECT_THROW(LatencyFn::bpr(1.0, 0.0).validate(1.0), ValidationError);
    EXPECT_THROW(LatencyFn::custom([](double) { return 1.0; }, [](double) { return 0.0; })
                     .validate(1.0),
                 ValidationError);
    EXPECT_NO_THROW(LatencyFn::affine(1.0, 0.0).validate(1.0));
}

TEST(Latency, Equality) {
    EXPECT_EQ(LatencyFn::affine(1.0, 2.0), LatencyFn::affine(1.0, 2.0));
    EXPECT_FALSE(LatencyFn::affine(1.0, 2.0) == LatencyFn::affine(1.0, 2.5));
    EXPECT_FALSE(LatencyFn::affine(1.0, 0.0) == LatencyFn::bpr(1.0, 1.0));
}

}  // namespace
}  // namespace tolldag
