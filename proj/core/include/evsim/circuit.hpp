#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace evsim {

using Ohms = double;
using Hertz = double;
using Volts = double;
using Amperes = double;
using Percent = double;

inline constexpr Hertz kNominalPilotFrequency = 1000.0;

// Steady-state complex impedance. "Infinite" (open circuit) is a distinct
// state rather than a floating-point infinity so that comparisons against it
// are exact and never produce NaN.
class Impedance {
 public:
  constexpr Impedance() = default;
  constexpr Impedance(double resistance, double reactance)
      : resistance_(resistance), reactance_(reactance) {}

  static constexpr Impedance ohms(double r) { return {r, 0.0}; }
  static constexpr Impedance zero() { return {0.0, 0.0}; }
  static constexpr Impedance infinite() {
    Impedance z;
    z.infinite_ = true;
    return z;
  }
  static Impedance from_complex(std::complex<double> z) { return {z.real(), z.imag()}; }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_zero() const {
    return !infinite_ && resistance_ == 0.0 && reactance_ == 0.0;
  }

  // Accessors below require a finite impedance.
  double resistance() const;
  double reactance() const;
  double magnitude() const;
  std::complex<double> complex() const;

  friend bool operator==(const Impedance&, const Impedance&) = default;

 private:
  double resistance_ = 0.0;
  double reactance_ = 0.0;
  bool infinite_ = false;
};

Impedance operator+(const Impedance& a, const Impedance& b);

// Two impedances in parallel. Zero dominates infinity (a short across an open
// branch is still a short).
Impedance parallel(const Impedance& a, const Impedance& b);

std::string to_string(const Impedance& z);

struct Resistor {
  Ohms ohms;
};
struct Capacitor {
  double farads;
};
struct Inductor {
  double henries;
};
struct Switch {
  bool closed;
};

using CircuitElement = std::variant<Resistor, Capacitor, Inductor, Switch>;

// Throws InputError when R < 0, C <= 0, L <= 0 or a value is not finite.
void validate(const CircuitElement& element);

Impedance element_impedance(const CircuitElement& element, Hertz f);

// Series/parallel composition tree. Nodes are validated on construction, so a
// CircuitNetwork that exists is always well-formed.
class CircuitNetwork {
 public:
  enum class Kind { element, series, parallel };

  explicit CircuitNetwork(CircuitElement element);

  static CircuitNetwork series(std::vector<CircuitNetwork> children);
  static CircuitNetwork parallel(std::vector<CircuitNetwork> children);

  Kind kind() const { return kind_; }
  const CircuitElement& element() const;
  std::span<const CircuitNetwork> children() const { return children_; }

  // True when every leaf is a resistor or a switch.
  bool is_resistive() const;

  // Compact textual form, e.g. "(R480 + (R330 || S1))".
  std::string describe() const;

  friend bool operator==(const CircuitNetwork&, const CircuitNetwork&);

 private:
  CircuitNetwork(Kind kind, std::vector<CircuitNetwork> children);

  Kind kind_;
  CircuitElement element_{Resistor{0.0}};
  std::vector<CircuitNetwork> children_;
};

CircuitNetwork resistor(Ohms r);
CircuitNetwork capacitor(double farads);
CircuitNetwork inductor(double henries);
CircuitNetwork open_switch();
CircuitNetwork closed_switch();
CircuitNetwork series(std::vector<CircuitNetwork> children);
CircuitNetwork parallel(std::vector<CircuitNetwork> children);

// Throws InputError for f < 0 or a non-finite f.
Impedance impedance_at(const CircuitNetwork& net, Hertz f);

// Ideal resistive divider measured across `lower`, using impedance magnitudes.
Volts divider_voltage(Volts source, Ohms upper, const CircuitNetwork& lower, Hertz f);
Volts divider_voltage(Volts source, Ohms upper, const Impedance& lower);

// Inverse of divider_voltage for a purely resistive lower leg. A reading at or
// above the source voltage is an open line.
Impedance infer_lower_resistance(Volts source, Ohms upper, Volts measured);

struct PilotSignal {
  Hertz frequency = kNominalPilotFrequency;
  Percent duty_percent = 0.0;
  Volts high_level = 12.0;
  Volts low_level = -12.0;

  static PilotSignal from_timing(double time_on_s, double period_s);
  double period_s() const { return 1.0 / frequency; }
  double time_on_s() const { return period_s() * duty_percent / 100.0; }
};

// Pilot duty cycle to available current. Duty in [10, 85] maps linearly
// through 50 % -> 32 A and 85 % -> 51 A; anything else in [0, 100] is the
// no-power/fault condition (nullopt). Outside [0, 100] throws InputError.
std::optional<Amperes> duty_to_current(Percent duty);

// Inverse of the linear segment. Throws RangeError outside
// [duty_to_current(10), 51].
Percent current_to_duty(Amperes current);

inline constexpr Percent kMinChargingDuty = 10.0;
inline constexpr Percent kMaxChargingDuty = 85.0;

}  // namespace evsim
