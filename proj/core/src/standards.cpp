#include "evsim/standards.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "evsim/error.hpp"

namespace evsim {

namespace {

constexpr Percent kCcTolerance = 6.0;
constexpr Volts kCcSource = 5.0;
constexpr Ohms kCcPullup = 330.0;
constexpr Volts kCpSource = 12.0;
constexpr Ohms kCpUpper = 1000.0;

constexpr StandardProfile make(StandardId id, Ohms unpressed, Ohms pressed, bool lock,
                               bool can) {
  return {id,       unpressed, pressed, kCcTolerance, kCcSource,
          kCcPullup, lock,     can,     kCpSource,    kCpUpper};
}

constexpr std::array<StandardProfile, 7> kProfiles = {
    make(StandardId::sae_j1772, 480, 150, true, false),
    make(StandardId::ccs_1, 480, 150, true, false),
    make(StandardId::iec_61851, 1030, 760, true, false),
    make(StandardId::ccs_2, 1030, 760, false, false),
    make(StandardId::nacs, 460, 400, true, true),
    make(StandardId::gbt_20234_2, 220, 3520, true, false),
    make(StandardId::gbt_20234_3, 0, 1000, true, true),
};

constexpr std::array<MeasuredCc, 7> kMeasured = {{
    {487, +1.5, 145, -3.3},
    {487, +1.5, 145, -3.3},
    {1027, -0.3, 768, +1.1},
    {1027, -0.3, 768, +1.1},
    {466, +1.3, 390, -2.5},
    {210, -4.5, 3511, -0.3},
    {0, 0.0, 1003, +0.3},
}};

struct Names {
  StandardId id;
  std::string_view cli;
  std::string_view display;
};

constexpr std::array<Names, 7> kNames = {{
    {StandardId::sae_j1772, "sae-j1772", "SAE J1772"},
    {StandardId::ccs_1, "ccs-i", "CCS I"},
    {StandardId::iec_61851, "iec-61851", "IEC 61851"},
    {StandardId::ccs_2, "ccs-ii", "CCS II"},
    {StandardId::nacs, "nacs", "NACS"},
    {StandardId::gbt_20234_2, "gbt-20234-2", "GB/T 20234.2"},
    {StandardId::gbt_20234_3, "gbt-20234-3", "GB/T 20234.3"},
}};

std::size_t index_of(StandardId id) { return static_cast<std::size_t>(id); }

}  // namespace

std::string_view to_string(StandardId id) { return kNames.at(index_of(id)).cli; }

std::string_view display_name(StandardId id) { return kNames.at(index_of(id)).display; }

std::optional<StandardId> parse_standard(std::string_view name) {
  for (const auto& n : kNames) {
    if (n.cli == name || n.display == name) return n.id;
  }
  return std::nullopt;
}

const StandardProfile& profile_of(StandardId id) { return kProfiles.at(index_of(id)); }

const MeasuredCc& measured_cc_of(StandardId id) { return kMeasured.at(index_of(id)); }

std::string_view to_string(CcClass c) {
  switch (c) {
    case CcClass::open: return "open";
    case CcClass::connected_pressed: return "connected-pressed";
    case CcClass::connected_unpressed: return "connected-unpressed";
    case CcClass::fault: return "fault";
  }
  return "?";
}

bool within_tolerance(Ohms measured, Ohms expected, Percent tolerance_percent) {
  return std::abs(measured - expected) / std::max(expected, 1.0) <= tolerance_percent / 100.0;
}

CcClass classify_cc(const Impedance& measured, const StandardProfile& profile) {
  if (measured.is_infinite()) return CcClass::open;
  return classify_cc(measured.magnitude(), profile);
}

CcClass classify_cc(Ohms measured, const StandardProfile& profile) {
  if (std::isinf(measured)) return CcClass::open;
  if (std::isnan(measured) || measured < 0.0) return CcClass::fault;
  if (within_tolerance(measured, profile.pressed_ohm, profile.tolerance_percent)) {
    return CcClass::connected_pressed;
  }
  if (within_tolerance(measured, profile.unpressed_ohm, profile.tolerance_percent)) {
    return CcClass::connected_unpressed;
  }
  return CcClass::fault;
}

Volts cc_voltage(const Impedance& cc, const StandardProfile& profile) {
  return divider_voltage(profile.cc_source_volt, profile.cc_pullup_ohm, cc);
}

CcClass classify_cc_voltage(Volts measured, const StandardProfile& profile) {
  return classify_cc(
      infer_lower_resistance(profile.cc_source_volt, profile.cc_pullup_ohm, measured), profile);
}

Percent deviation_percent(Ohms expected, Ohms real) {
  if (expected < 0.0 || real < 0.0) throw InputError("resistances must be >= 0");
  if (expected == 0.0) {
    if (real == 0.0) return 0.0;
    throw UndefinedDeviationError("deviation from a 0 ohm expectation is undefined");
  }
  return std::round((real - expected) / expected * 1000.0) / 10.0;
}

CircuitNetwork legacy_gun_cc(const StandardProfile& profile, bool pressed) {
  const Ohms low = std::min(profile.pressed_ohm, profile.unpressed_ohm);
  const Ohms high = std::max(profile.pressed_ohm, profile.unpressed_ohm);
  const bool pressed_is_low = profile.pressed_ohm <= profile.unpressed_ohm;
  const bool switch_closed = pressed == pressed_is_low;
  return series({resistor(low),
                 parallel({resistor(high - low), CircuitNetwork(Switch{switch_closed})})});
}

std::string_view to_string(CpState s) {
  switch (s) {
    case CpState::a_not_connected: return "A";
    case CpState::b_connected: return "B";
    case CpState::c_charging: return "C";
    case CpState::ventilation: return "ventilation";
    case CpState::d_fault: return "D";
  }
  return "?";
}

namespace {

Ohms charging_equivalent() {
  return impedance_at(parallel({resistor(kCpStateBOhm), resistor(kCpChargeResistorOhm)}), 0.0)
      .resistance();
}

}  // namespace

Impedance nominal_resistance(CpState s) {
  switch (s) {
    case CpState::b_connected: return Impedance::ohms(kCpStateBOhm);
    case CpState::c_charging: return Impedance::ohms(charging_equivalent());
    case CpState::ventilation: return Impedance::ohms(kCpVentilationOhm);
    case CpState::a_not_connected:
    case CpState::d_fault: break;
  }
  return Impedance::infinite();
}

CpState classify_cp(const Impedance& equivalent) {
  if (equivalent.is_infinite()) return CpState::a_not_connected;
  return classify_cp(equivalent.magnitude());
}

CpState classify_cp(Ohms equivalent) {
  if (std::isinf(equivalent)) return CpState::a_not_connected;
  const auto near = [equivalent](Ohms nominal) {
    return std::abs(equivalent - nominal) / nominal <= kCpTolerancePercent / 100.0;
  };
  if (near(kCpStateBOhm)) return CpState::b_connected;
  if (near(charging_equivalent())) return CpState::c_charging;
  if (near(kCpVentilationOhm)) return CpState::ventilation;
  return CpState::d_fault;
}

CircuitNetwork ev_cp_network(CpState requested) {
  switch (requested) {
    case CpState::a_not_connected: return open_switch();
    case CpState::b_connected: return resistor(kCpStateBOhm);
    case CpState::c_charging:
      return parallel({resistor(kCpStateBOhm), resistor(kCpChargeResistorOhm)});
    case CpState::ventilation:
      return parallel({resistor(kCpStateBOhm), resistor(kCpVentilationResistorOhm)});
    case CpState::d_fault: return closed_switch();
  }
  return open_switch();
}

std::string export_profiles_json() {
  auto doc = nlohmann::ordered_json::array();
  for (const auto id : kAllStandards) {
    const auto& p = profile_of(id);
    nlohmann::ordered_json entry;
    entry["id"] = to_string(id);
    entry["name"] = display_name(id);
    entry["unpressed_ohm"] = p.unpressed_ohm;
    entry["pressed_ohm"] = p.pressed_ohm;
    entry["tolerance_percent"] = p.tolerance_percent;
    entry["cc_source_volt"] = p.cc_source_volt;
    entry["cc_pullup_ohm"] = p.cc_pullup_ohm;
    entry["has_lock"] = p.has_lock;
    entry["exposes_can"] = p.exposes_can;
    entry["cp_source_volt"] = p.cp_source_volt;
    entry["cp_upper_ohm"] = p.cp_upper_ohm;
    doc.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

}  // namespace evsim
