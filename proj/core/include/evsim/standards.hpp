#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "evsim/circuit.hpp"

namespace evsim {

enum class StandardId {
  sae_j1772,
  ccs_1,
  iec_61851,
  ccs_2,
  nacs,
  gbt_20234_2,
  gbt_20234_3,
};

inline constexpr std::array<StandardId, 7> kAllStandards = {
    StandardId::sae_j1772, StandardId::ccs_1,       StandardId::iec_61851,
    StandardId::ccs_2,     StandardId::nacs,        StandardId::gbt_20234_2,
    StandardId::gbt_20234_3,
};

// Kebab-case CLI names: "sae-j1772", "ccs-i", ..., "gbt-20234-3".
std::string_view to_string(StandardId id);
std::string_view display_name(StandardId id);
// Accepts either the CLI name or the display name.
std::optional<StandardId> parse_standard(std::string_view name);

struct StandardProfile {
  StandardId id;
  Ohms unpressed_ohm;
  Ohms pressed_ohm;
  Percent tolerance_percent;
  Volts cc_source_volt;
  Ohms cc_pullup_ohm;
  bool has_lock;
  bool exposes_can;
  Volts cp_source_volt;
  Ohms cp_upper_ohm;
};

const StandardProfile& profile_of(StandardId id);

// Measured CC readings recorded against each standard's expected values.
struct MeasuredCc {
  Ohms unpressed_real;
  Percent unpressed_printed_deviation;
  Ohms pressed_real;
  Percent pressed_printed_deviation;
};
const MeasuredCc& measured_cc_of(StandardId id);

enum class CcClass { open, connected_pressed, connected_unpressed, fault };
std::string_view to_string(CcClass c);
inline bool is_connected(CcClass c) {
  return c == CcClass::connected_pressed || c == CcClass::connected_unpressed;
}

// |measured - expected| / max(expected, 1 ohm) <= tolerance.
bool within_tolerance(Ohms measured, Ohms expected, Percent tolerance_percent);

CcClass classify_cc(const Impedance& measured, const StandardProfile& profile);
CcClass classify_cc(Ohms measured, const StandardProfile& profile);

// The vehicle reads a voltage on the CC divider; these convert between that
// voltage and the resistance it implies for a given profile.
Volts cc_voltage(const Impedance& cc, const StandardProfile& profile);
CcClass classify_cc_voltage(Volts measured, const StandardProfile& profile);

// (real - expected) / expected * 100 rounded to one decimal. Throws
// UndefinedDeviationError when expected is 0 and real is not.
Percent deviation_percent(Ohms expected, Ohms real);

// Charging gun CC circuit: the smaller of the two resistances in series with
// the difference, which the travel switch shorts in the lower-valued state.
CircuitNetwork legacy_gun_cc(const StandardProfile& profile, bool pressed);

enum class CpState { a_not_connected, b_connected, c_charging, ventilation, d_fault };
std::string_view to_string(CpState s);

inline constexpr Ohms kCpStateBOhm = 2740.0;
inline constexpr Ohms kCpChargeResistorOhm = 1300.0;
inline constexpr Ohms kCpVentilationResistorOhm = 270.0;
inline constexpr Ohms kCpVentilationOhm = 240.0;
inline constexpr Percent kCpTolerancePercent = 5.0;

// Nominal equivalent resistance of a state; infinite for A. D has no nominal
// value and also reports infinite.
Impedance nominal_resistance(CpState s);

CpState classify_cp(const Impedance& equivalent);
CpState classify_cp(Ohms equivalent);

// Pull-down network the vehicle switches onto the CP line to request a state.
// A is an open line, D a short.
CircuitNetwork ev_cp_network(CpState requested);

// JSON document with one object per standard.
std::string export_profiles_json();

}  // namespace evsim
