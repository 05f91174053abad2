#include "evsim/circuit.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "evsim/error.hpp"

namespace evsim {

namespace {

void require_finite(const Impedance& z, const char* what) {
  if (z.is_infinite()) {
    throw InputError(std::string(what) + " of an infinite impedance");
  }
}

}  // namespace

double Impedance::resistance() const {
  require_finite(*this, "resistance");
  return resistance_;
}

double Impedance::reactance() const {
  require_finite(*this, "reactance");
  return reactance_;
}

double Impedance::magnitude() const {
  require_finite(*this, "magnitude");
  return std::hypot(resistance_, reactance_);
}

std::complex<double> Impedance::complex() const {
  require_finite(*this, "complex value");
  return {resistance_, reactance_};
}

Impedance operator+(const Impedance& a, const Impedance& b) {
  if (a.is_infinite() || b.is_infinite()) return Impedance::infinite();
  return Impedance::from_complex(a.complex() + b.complex());
}

Impedance parallel(const Impedance& a, const Impedance& b) {
  if (a.is_zero() || b.is_zero()) return Impedance::zero();
  if (a.is_infinite()) return b;
  if (b.is_infinite()) return a;
  const auto admittance = 1.0 / a.complex() + 1.0 / b.complex();
  if (admittance == std::complex<double>{}) return Impedance::infinite();
  return Impedance::from_complex(1.0 / admittance);
}

std::string to_string(const Impedance& z) {
  if (z.is_infinite()) return "inf";
  std::ostringstream out;
  out << z.resistance();
  if (z.reactance() != 0.0) {
    out << (z.reactance() < 0 ? " - j" : " + j") << std::abs(z.reactance());
  }
  out << " ohm";
  return out.str();
}

void validate(const CircuitElement& element) {
  std::visit(
      [](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Resistor>) {
          if (!std::isfinite(e.ohms) || e.ohms < 0.0) {
            throw InputError("resistance must be finite and >= 0");
          }
        } else if constexpr (std::is_same_v<T, Capacitor>) {
          if (!std::isfinite(e.farads) || e.farads <= 0.0) {
            throw InputError("capacitance must be finite and > 0");
          }
        } else if constexpr (std::is_same_v<T, Inductor>) {
          if (!std::isfinite(e.henries) || e.henries <= 0.0) {
            throw InputError("inductance must be finite and > 0");
          }
        }
      },
      element);
}

Impedance element_impedance(const CircuitElement& element, Hertz f) {
  const double omega = 2.0 * std::numbers::pi * f;
  return std::visit(
      [omega](const auto& e) -> Impedance {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Resistor>) {
          return Impedance::ohms(e.ohms);
        } else if constexpr (std::is_same_v<T, Capacitor>) {
          if (omega == 0.0) return Impedance::infinite();
          return {0.0, -1.0 / (omega * e.farads)};
        } else if constexpr (std::is_same_v<T, Inductor>) {
          return {0.0, omega * e.henries};
        } else {
          return e.closed ? Impedance::zero() : Impedance::infinite();
        }
      },
      element);
}

CircuitNetwork::CircuitNetwork(CircuitElement element)
    : kind_(Kind::element), element_(element) {
  validate(element_);
}

CircuitNetwork::CircuitNetwork(Kind kind, std::vector<CircuitNetwork> children)
    : kind_(kind), children_(std::move(children)) {
  if (children_.empty()) {
    throw InputError("series/parallel node needs at least one child");
  }
}

CircuitNetwork CircuitNetwork::series(std::vector<CircuitNetwork> children) {
  return CircuitNetwork(Kind::series, std::move(children));
}

CircuitNetwork CircuitNetwork::parallel(std::vector<CircuitNetwork> children) {
  return CircuitNetwork(Kind::parallel, std::move(children));
}

const CircuitElement& CircuitNetwork::element() const {
  if (kind_ != Kind::element) throw InputError("network node is not an element");
  return element_;
}

bool CircuitNetwork::is_resistive() const {
  if (kind_ == Kind::element) {
    return std::holds_alternative<Resistor>(element_) ||
           std::holds_alternative<Switch>(element_);
  }
  for (const auto& child : children_) {
    if (!child.is_resistive()) return false;
  }
  return true;
}

std::string CircuitNetwork::describe() const {
  std::ostringstream out;
  if (kind_ == Kind::element) {
    std::visit(
        [&out](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, Resistor>) out << 'R' << e.ohms;
          else if constexpr (std::is_same_v<T, Capacitor>) out << 'C' << e.farads;
          else if constexpr (std::is_same_v<T, Inductor>) out << 'L' << e.henries;
          else out << (e.closed ? "S1" : "S0");
        },
        element_);
    return out.str();
  }
  const char* sep = kind_ == Kind::series ? " + " : " || ";
  out << '(';
  for (std::size_t i = 0; i < children_.size(); ++i) {
    if (i) out << sep;
    out << children_[i].describe();
  }
  out << ')';
  return out.str();
}

namespace {

bool same_element(const CircuitElement& a, const CircuitElement& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&b](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, Resistor>) return x.ohms == y.ohms;
        else if constexpr (std::is_same_v<T, Capacitor>) return x.farads == y.farads;
        else if constexpr (std::is_same_v<T, Inductor>) return x.henries == y.henries;
        else return x.closed == y.closed;
      },
      a);
}

}  // namespace

bool operator==(const CircuitNetwork& a, const CircuitNetwork& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.kind_ == CircuitNetwork::Kind::element) return same_element(a.element_, b.element_);
  return a.children_ == b.children_;
}

CircuitNetwork resistor(Ohms r) { return CircuitNetwork(Resistor{r}); }
CircuitNetwork capacitor(double farads) { return CircuitNetwork(Capacitor{farads}); }
CircuitNetwork inductor(double henries) { return CircuitNetwork(Inductor{henries}); }
CircuitNetwork open_switch() { return CircuitNetwork(Switch{false}); }
CircuitNetwork closed_switch() { return CircuitNetwork(Switch{true}); }
CircuitNetwork series(std::vector<CircuitNetwork> children) {
  return CircuitNetwork::series(std::move(children));
}
CircuitNetwork parallel(std::vector<CircuitNetwork> children) {
  return CircuitNetwork::parallel(std::move(children));
}

namespace {

Impedance evaluate(const CircuitNetwork& net, Hertz f) {
  switch (net.kind()) {
    case CircuitNetwork::Kind::element:
      return element_impedance(net.element(), f);
    case CircuitNetwork::Kind::series: {
      Impedance total = Impedance::zero();
      for (const auto& child : net.children()) total = total + evaluate(child, f);
      return total;
    }
    case CircuitNetwork::Kind::parallel: {
      Impedance total = Impedance::infinite();
      for (const auto& child : net.children()) total = parallel(total, evaluate(child, f));
      return total;
    }
  }
  return Impedance::infinite();
}

}  // namespace

Impedance impedance_at(const CircuitNetwork& net, Hertz f) {
  if (!std::isfinite(f) || f < 0.0) throw InputError("probe frequency must be >= 0");
  return evaluate(net, f);
}

Volts divider_voltage(Volts source, Ohms upper, const Impedance& lower) {
  if (!(source > 0.0)) throw InputError("divider source must be > 0");
  if (!(upper > 0.0)) throw InputError("divider upper resistance must be > 0");
  if (lower.is_infinite()) return source;
  if (lower.is_zero()) return 0.0;
  const double z = lower.magnitude();
  return z / (upper + z) * source;
}

Volts divider_voltage(Volts source, Ohms upper, const CircuitNetwork& lower, Hertz f) {
  return divider_voltage(source, upper, impedance_at(lower, f));
}

Impedance infer_lower_resistance(Volts source, Ohms upper, Volts measured) {
  if (!(source > 0.0) || !(upper > 0.0)) throw InputError("invalid divider parameters");
  if (measured >= source) return Impedance::infinite();
  if (measured <= 0.0) return Impedance::zero();
  return Impedance::ohms(upper * measured / (source - measured));
}

PilotSignal PilotSignal::from_timing(double time_on_s, double period_s) {
  if (!(period_s > 0.0) || time_on_s < 0.0 || time_on_s > period_s) {
    throw InputError("pilot timing requires 0 <= time_on <= period");
  }
  PilotSignal pilot;
  pilot.frequency = 1.0 / period_s;
  pilot.duty_percent = time_on_s / period_s * 100.0;
  return pilot;
}

std::optional<Amperes> duty_to_current(Percent duty) {
  if (!std::isfinite(duty) || duty < 0.0 || duty > 100.0) {
    throw InputError("duty cycle must lie in [0, 100]");
  }
  if (duty < kMinChargingDuty || duty > kMaxChargingDuty) return std::nullopt;
  return 32.0 + (duty - 50.0) * 19.0 / 35.0;
}

Percent current_to_duty(Amperes current) {
  const double low = *duty_to_current(kMinChargingDuty);
  const double high = *duty_to_current(kMaxChargingDuty);
  if (!std::isfinite(current) || current < low || current > high) {
    throw RangeError("current outside the pilot's representable range");
  }
  return 50.0 + (current - 32.0) * 35.0 / 19.0;
}

}  // namespace evsim
