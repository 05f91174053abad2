#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evsim/attacker.hpp"
#include "evsim/bms.hpp"
#include "evsim/circuit.hpp"
#include "evsim/countermeasure.hpp"
#include "evsim/standards.hpp"
#include "evsim/trace.hpp"

namespace evsim {

inline constexpr Millis kTickMs = 100;
inline constexpr Millis kUnlockWindowMs = 2000;
inline constexpr Millis kBmsStepMs = 1000;
inline constexpr Volts kMainsVolts = 220.0;
inline constexpr double kGunTempLimitC = 90.0;

// ---------------------------------------------------------------------------
// Charger side

enum class EvsePhase { idle, gun_connected, handshake, charging, halted, session_ended };
enum class HaltReason { cc_fault, cp_fault, thermal_cutoff, user_stop, attack_observed_duty };

std::string_view to_string(EvsePhase p);
// "CcFault", "CpFault", "ThermalCutoff", "UserStop", "AttackObservedDuty"
std::string_view to_string(HaltReason r);

struct EvseState {
  EvsePhase phase = EvsePhase::idle;
  Amperes current = 0.0;              // meaningful in charging only
  std::optional<HaltReason> reason;   // set in halted only

  static EvseState idle() { return {}; }
  static EvseState of(EvsePhase p) { return {p, 0.0, std::nullopt}; }
  static EvseState charging(Amperes a) { return {EvsePhase::charging, a, std::nullopt}; }
  static EvseState halted(HaltReason r) { return {EvsePhase::halted, 0.0, r}; }

  bool is_charging() const { return phase == EvsePhase::charging; }
  bool is_halted(HaltReason r) const { return phase == EvsePhase::halted && reason == r; }
  friend bool operator==(const EvseState&, const EvseState&) = default;
};

// "Idle", "Charging(32A)", "Halted(CcFault)", ...
std::string describe(const EvseState& s);

// ---------------------------------------------------------------------------
// Vehicle side

struct EvState {
  bool lock_engaged = false;
  CpState cp_state = CpState::a_not_connected;
  bool lid_open = false;
  double gun_temp_c = 25.0;

  // Controller memory.
  CcClass last_cc = CcClass::open;
  std::optional<Millis> press_seen_at;
  bool confirmed = false;        // first button cycle after plug-in seen
  bool unlock_granted = false;   // a later cycle released the lock
  bool charge_requested = false;
  bool cp_short = false;         // vehicle-side pilot fault, forces D
  bool alarm = false;            // countermeasure flagged a spoof

  friend bool operator==(const EvState&, const EvState&) = default;
};

// ---------------------------------------------------------------------------
// Events

enum class EventKind {
  plug_in,
  unplug,
  button_press,
  button_release,
  user_stop,
  attacker_cmd,
  temp_set,
  tick,
};

std::string_view to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view name);

struct SimEvent {
  Millis t = 0;
  EventKind kind = EventKind::tick;
  CommandFrame frame{};   // attacker_cmd: raw bytes as received over the air
  double celsius = 0.0;   // temp_set

  static SimEvent plug_in(Millis t) { return {t, EventKind::plug_in}; }
  static SimEvent unplug(Millis t) { return {t, EventKind::unplug}; }
  static SimEvent press(Millis t) { return {t, EventKind::button_press}; }
  static SimEvent release(Millis t) { return {t, EventKind::button_release}; }
  static SimEvent user_stop(Millis t) { return {t, EventKind::user_stop}; }
  static SimEvent tick(Millis t) { return {t, EventKind::tick}; }
  static SimEvent temp_set(Millis t, double c) { return {t, EventKind::temp_set, {}, c}; }
  static SimEvent attacker(Millis t, const AttackCommand& cmd) {
    return {t, EventKind::attacker_cmd, encode_command(cmd)};
  }
  static SimEvent attacker_raw(Millis t, CommandFrame frame) {
    return {t, EventKind::attacker_cmd, frame};
  }

  friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

// ---------------------------------------------------------------------------
// Session configuration and world state

enum class GunKind { legacy, reference };
std::string_view to_string(GunKind g);

struct SessionConfig {
  Percent advertised_duty = 50.0;
  bool countermeasure = false;   // vehicle probes CC with dual_check
  int probe_count = 4;
  std::uint64_t seed = 0;
  LidCode lid_code{0x2C5A3F1, {0xA5C3, 0x1F2E, 0x7B00}};
  bool ventilation = false;      // vehicle requests the ventilated charge state
  ThermalParams thermal = calibrated_thermal_params();
};

struct ImplantedDevice {
  ProgrammableResistor pot;
  Bitstream recorded_burst;
  std::vector<std::vector<CanFrame>> can_payloads;
};

// Wiring for a gun of the given kind on the profile's standard.
WiringHarness make_wiring(const StandardProfile& profile, GunKind gun, bool can_tap);

struct World {
  EvseState evse;
  EvState ev;
  WiringHarness wiring;
  ImplantedDevice device;
  BmsState bms;
  double delivered_wh = 0.0;
  Millis now = 0;

  // Bookkeeping for predicates and reports.
  double bms_max_temp_c = 0.0;
  std::optional<Millis> first_attack_ms;
  std::optional<Millis> halted_at_ms;

  // Countermeasure: signatures of the reference gun for unpressed, pressed.
  std::vector<ReferenceSignature> signatures;
  std::string last_verdict;
};

World initial_world(const StandardProfile& profile, const SessionConfig& config,
                    WiringHarness wiring, ImplantedDevice device);

struct StepResult {
  World world;
  std::vector<TraceRecord> records;
};

// Applies one event and re-evaluates both controllers. Throws HarnessError
// when event.t precedes world.now.
StepResult step(const StandardProfile& profile, const SessionConfig& config, World world,
                const SimEvent& event);

struct SessionSetup {
  SessionConfig config;
  WiringHarness wiring;
  ImplantedDevice device;
};

struct SessionOutcome {
  EvseState final_evse;
  EvState final_ev;
  bool gun_removable = true;
  double delivered_wh = 0.0;
  EventTrace trace;

  double bms_temp_c = 0.0;
  double bms_max_temp_c = 0.0;
  bool bms_compromised = false;
  std::optional<Millis> first_attack_ms;
  std::optional<Millis> halted_at_ms;
};

// Replays the script with a Tick every 100 ms up to the last scripted event.
// Script events at a given time run before the tick at that time. Stops early
// on SessionEnded. Throws HarnessError for an unordered script or a CAN tap on
// a profile without exposed CAN.
SessionOutcome run_session(const StandardProfile& profile, std::span<const SimEvent> script,
                           const SessionSetup& setup);

}  // namespace evsim
