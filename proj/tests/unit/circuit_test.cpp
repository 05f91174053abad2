#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "evsim/circuit.hpp"
#include "evsim/error.hpp"

using namespace evsim;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Reference values computed with plain std::complex arithmetic.
std::complex<double> zc(double c, double f) { return 1.0 / std::complex<double>(0.0, kTwoPi * f * c); }
std::complex<double> zl(double l, double f) { return {0.0, kTwoPi * f * l}; }
std::complex<double> par(std::complex<double> a, std::complex<double> b) { return a * b / (a + b); }

}  // namespace

TEST(Impedance, InfiniteIsASentinel) {
  const auto inf = Impedance::infinite();
  EXPECT_TRUE(inf.is_infinite());
  EXPECT_FALSE(inf.is_zero());
  EXPECT_THROW((void)inf.magnitude(), InputError);
  EXPECT_THROW((void)inf.complex(), InputError);
  EXPECT_EQ(inf, Impedance::infinite());
  EXPECT_NE(inf, Impedance::zero());
}

TEST(Impedance, SeriesAndParallelWithSentinels) {
  const auto r = Impedance::ohms(100);
  EXPECT_TRUE((r + Impedance::infinite()).is_infinite());
  EXPECT_EQ(parallel(r, Impedance::infinite()), r);
  EXPECT_TRUE(parallel(Impedance::zero(), Impedance::infinite()).is_zero());
  EXPECT_TRUE(parallel(r, Impedance::zero()).is_zero());
  EXPECT_TRUE(parallel(Impedance::infinite(), Impedance::infinite()).is_infinite());
}

TEST(Impedance, ParallelCpChargeState) {
  const double expected = 2740.0 * 1300.0 / (2740.0 + 1300.0);
  EXPECT_NEAR(parallel(Impedance::ohms(2740), Impedance::ohms(1300)).magnitude(), expected, 1e-9);
  EXPECT_NEAR(expected, 881.7, 0.05);
}

TEST(Elements, ReactiveImpedances) {
  EXPECT_TRUE(element_impedance(Capacitor{1e-6}, 0.0).is_infinite());
  EXPECT_TRUE(element_impedance(Inductor{1e-3}, 0.0).is_zero());
  const auto c = element_impedance(Capacitor{1e-6}, 1000.0);
  EXPECT_NEAR(c.reactance(), zc(1e-6, 1000.0).imag(), 1e-9);
  EXPECT_NEAR(c.magnitude(), 159.15494, 1e-4);
  const auto l = element_impedance(Inductor{10e-3}, 500.0);
  EXPECT_NEAR(l.reactance(), zl(10e-3, 500.0).imag(), 1e-12);
  EXPECT_TRUE(element_impedance(Switch{false}, 50.0).is_infinite());
  EXPECT_TRUE(element_impedance(Switch{true}, 50.0).is_zero());
}

TEST(Elements, ValidationRejectsNonPhysical) {
  EXPECT_THROW(resistor(-1.0), InputError);
  EXPECT_THROW(capacitor(0.0), InputError);
  EXPECT_THROW(inductor(-1e-3), InputError);
  EXPECT_THROW(resistor(NAN), InputError);
  EXPECT_NO_THROW(resistor(0.0));
}

TEST(Network, EmptyCompositionRejected) {
  EXPECT_THROW(series({}), InputError);
  EXPECT_THROW(parallel(std::vector<CircuitNetwork>{}), InputError);
}

TEST(Network, NegativeFrequencyRejected) {
  EXPECT_THROW(impedance_at(resistor(1), -1.0), InputError);
  EXPECT_THROW(impedance_at(resistor(1), INFINITY), InputError);
}

TEST(Network, SwitchedCcCircuit) {
  const auto net = series({resistor(150), parallel({resistor(330), open_switch()})});
  EXPECT_NEAR(impedance_at(net, 0).magnitude(), 480.0, 1e-12);
  const auto shorted = series({resistor(150), parallel({resistor(330), closed_switch()})});
  EXPECT_NEAR(impedance_at(shorted, 0).magnitude(), 150.0, 1e-12);
  EXPECT_EQ(net.describe(), "(R150 + (R330 || S0))");
  EXPECT_TRUE(net.is_resistive());
  EXPECT_FALSE(series({resistor(1), capacitor(1e-6)}).is_resistive());
}

TEST(Network, RcAgainstComplexOracle) {
  const auto net = parallel({series({resistor(950), inductor(1e-3)}), capacitor(10e-6)});
  for (const double f : {500.0, 1000.0, 7300.0, 50000.0}) {
    const auto want = par(std::complex<double>(950, 0) + zl(1e-3, f), zc(10e-6, f));
    const auto got = impedance_at(net, f).complex();
    EXPECT_NEAR(got.real(), want.real(), 1e-9 * std::abs(want));
    EXPECT_NEAR(got.imag(), want.imag(), 1e-9 * std::abs(want));
  }
  EXPECT_NEAR(impedance_at(net, 0).magnitude(), 950.0, 1e-12);
}

// Property: series sums and parallel of resistors matches the reciprocal-sum formula.
TEST(NetworkProperty, ResistiveComposition) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(1.0, 1e5);
  for (int i = 0; i < 500; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const auto s = impedance_at(series({resistor(a), resistor(b), resistor(c)}), 0).magnitude();
    EXPECT_NEAR(s, a + b + c, 1e-9 * (a + b + c));
    const auto p = impedance_at(parallel({resistor(a), resistor(b), resistor(c)}), 0).magnitude();
    EXPECT_NEAR(p, 1.0 / (1.0 / a + 1.0 / b + 1.0 / c), 1e-9 * p);
    // Parallel never exceeds its smallest branch; series never falls below its largest.
    EXPECT_LE(p, std::min({a, b, c}) * (1 + 1e-12));
    EXPECT_GE(s, std::max({a, b, c}));
  }
}

TEST(NetworkProperty, ParallelIsCommutative) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(10.0, 1e4);
  for (int i = 0; i < 200; ++i) {
    const auto a = resistor(u(rng));
    const auto b = capacitor(u(rng) * 1e-9);
    const double f = u(rng);
    EXPECT_EQ(impedance_at(parallel({a, b}), f).magnitude(), impedance_at(parallel({b, a}), f).magnitude());
  }
}

TEST(Divider, VoltageAndInverse) {
  EXPECT_NEAR(divider_voltage(5.0, 330.0, Impedance::ohms(480)), 5.0 * 480 / 810, 1e-12);
  EXPECT_DOUBLE_EQ(divider_voltage(5.0, 330.0, Impedance::infinite()), 5.0);
  EXPECT_DOUBLE_EQ(divider_voltage(5.0, 330.0, Impedance::zero()), 0.0);
  EXPECT_TRUE(infer_lower_resistance(5.0, 330.0, 5.0).is_infinite());
  EXPECT_TRUE(infer_lower_resistance(5.0, 330.0, 0.0).is_zero());
  for (const double r : {1.0, 150.0, 480.0, 3520.0, 1e5}) {
    const auto v = divider_voltage(5.0, 330.0, Impedance::ohms(r));
    EXPECT_NEAR(infer_lower_resistance(5.0, 330.0, v).magnitude(), r, 1e-9 * r);
  }
}

TEST(Pilot, DutyAnchors) {
  EXPECT_EQ(duty_to_current(50.0), 32.0);
  EXPECT_EQ(duty_to_current(85.0), 51.0);
  EXPECT_FALSE(duty_to_current(5.0).has_value());
  EXPECT_FALSE(duty_to_current(9.99).has_value());
  EXPECT_FALSE(duty_to_current(85.01).has_value());
  EXPECT_FALSE(duty_to_current(0.0).has_value());
  EXPECT_THROW(duty_to_current(-1.0), InputError);
  EXPECT_THROW(duty_to_current(100.5), InputError);
}

TEST(Pilot, LinearSegmentOracle) {
  // Two-point line through (50, 32) and (85, 51).
  for (double d = 10.0; d <= 85.0; d += 0.25) {
    const double want = 32.0 + (d - 50.0) * (51.0 - 32.0) / (85.0 - 50.0);
    EXPECT_NEAR(*duty_to_current(d), want, 1e-12);
    EXPECT_NEAR(current_to_duty(want), d, 1e-9);
  }
  EXPECT_DOUBLE_EQ(current_to_duty(51.0), 85.0);
  EXPECT_DOUBLE_EQ(current_to_duty(32.0), 50.0);
  EXPECT_THROW(current_to_duty(52.0), RangeError);
  EXPECT_THROW(current_to_duty(0.0), RangeError);
}

TEST(Pilot, TimingRoundTrip) {
  const auto p = PilotSignal::from_timing(0.5e-3, 1e-3);
  EXPECT_NEAR(p.duty_percent, 50.0, 1e-12);
  EXPECT_NEAR(p.frequency, 1000.0, 1e-9);
  EXPECT_NEAR(p.time_on_s(), 0.5e-3, 1e-15);
  EXPECT_THROW(PilotSignal::from_timing(2e-3, 1e-3), InputError);
}
