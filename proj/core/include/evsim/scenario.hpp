#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evsim/session.hpp"

namespace evsim {

// Checks applied to a SessionOutcome. Unset fields are not checked.
struct Expectations {
  std::optional<std::string> final_evse;        // describe() text, e.g. "Halted(CcFault)"
  std::optional<bool> gun_removable;
  std::optional<Millis> halted_within_ms;       // halt time minus first attacker command
  std::optional<double> final_current_a;
  std::optional<double> min_final_bms_temp_c;
  std::optional<double> max_bms_temp_c;
  std::optional<bool> bms_compromised;
  std::optional<bool> alarm;
  std::optional<bool> lid_open;
  std::optional<double> min_delivered_wh;
};

struct PredicateResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<PredicateResult> check(const Expectations& expected, const SessionOutcome& outcome);

struct Scenario {
  std::string name;
  std::string description;
  StandardId standard = StandardId::sae_j1772;
  GunKind gun = GunKind::legacy;
  bool attacker_taps_can = false;
  SessionConfig config;
  std::vector<std::vector<CanFrame>> can_payloads;
  Bitstream recorded_burst;
  std::vector<SimEvent> script;
  Expectations expected;
};

// Names in the built-in library, in a stable order.
const std::vector<std::string>& scenario_names();

// Builds a library scenario for a standard. Per-standard values (the spoofed
// resistances, whether the attacker reaches CAN) come from the profile.
// Throws UnknownScenarioError for an unknown name.
Scenario library_scenario(std::string_view name, StandardId standard);

// Scenario documents. Throws MalformedInputError on parse or schema errors.
Scenario scenario_from_json(std::string_view text);
std::string scenario_to_json(const Scenario& scenario);

SessionSetup make_setup(const Scenario& scenario, std::uint64_t seed);

struct ScenarioRun {
  SessionOutcome outcome;
  std::vector<PredicateResult> predicates;
  bool passed = false;
};

ScenarioRun run_scenario(const Scenario& scenario, std::uint64_t seed);

}  // namespace evsim
