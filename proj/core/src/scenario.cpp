#include "evsim/scenario.hpp"

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "evsim/error.hpp"

namespace evsim {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt(bool v) { return v ? "true" : "false"; }

}  // namespace

std::vector<PredicateResult> check(const Expectations& e, const SessionOutcome& o) {
  std::vector<PredicateResult> out;
  auto add = [&out](std::string name, bool pass, std::string detail) {
    out.push_back({std::move(name), pass, std::move(detail)});
  };

  if (e.final_evse) {
    const auto got = describe(o.final_evse);
    add("final_evse = " + *e.final_evse, got == *e.final_evse, "got " + got);
  }
  if (e.gun_removable) {
    add("gun_removable = " + fmt(*e.gun_removable), o.gun_removable == *e.gun_removable,
        "got " + fmt(o.gun_removable));
  }
  if (e.halted_within_ms) {
    const bool ok = o.first_attack_ms && o.halted_at_ms && *o.halted_at_ms >= *o.first_attack_ms &&
                    *o.halted_at_ms - *o.first_attack_ms <= *e.halted_within_ms;
    std::string detail = "no halt after an attacker command";
    if (o.first_attack_ms && o.halted_at_ms) {
      detail = "halted " + std::to_string(*o.halted_at_ms - *o.first_attack_ms) +
               " ms after first command";
    }
    add("halted_within_ms <= " + std::to_string(*e.halted_within_ms), ok, detail);
  }
  if (e.final_current_a) {
    const double got = o.final_evse.is_charging() ? o.final_evse.current : 0.0;
    add("final_current_a = " + fmt(*e.final_current_a), std::abs(got - *e.final_current_a) < 1e-9,
        "got " + fmt(got));
  }
  if (e.min_final_bms_temp_c) {
    add("final_bms_temp_c >= " + fmt(*e.min_final_bms_temp_c), o.bms_temp_c >= *e.min_final_bms_temp_c,
        "got " + fmt(o.bms_temp_c));
  }
  if (e.max_bms_temp_c) {
    add("max_bms_temp_c <= " + fmt(*e.max_bms_temp_c), o.bms_max_temp_c <= *e.max_bms_temp_c,
        "got " + fmt(o.bms_max_temp_c));
  }
  if (e.bms_compromised) {
    add("bms_compromised = " + fmt(*e.bms_compromised), o.bms_compromised == *e.bms_compromised,
        "got " + fmt(o.bms_compromised));
  }
  if (e.alarm) {
    add("alarm = " + fmt(*e.alarm), o.final_ev.alarm == *e.alarm, "got " + fmt(o.final_ev.alarm));
  }
  if (e.lid_open) {
    add("lid_open = " + fmt(*e.lid_open), o.final_ev.lid_open == *e.lid_open,
        "got " + fmt(o.final_ev.lid_open));
  }
  if (e.min_delivered_wh) {
    add("delivered_wh >= " + fmt(*e.min_delivered_wh), o.delivered_wh >= *e.min_delivered_wh,
        "got " + fmt(o.delivered_wh));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Built-in library

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "nominal",       "dos-cc",       "dos-cp",         "pwm-injection",
      "deadlock",      "can-overheat", "bms-baseline",   "thermal-cutoff",
      "countermeasure-spoof", "lid-replay",
  };
  return names;
}

namespace {

constexpr Millis kAttackAt = 10'000;
constexpr Millis kOneHour = 3'600'000;

// Plug in at 1 s and confirm with a button cycle; charging starts at 2.5 s.
void start_charging(std::vector<SimEvent>& s) {
  s.push_back(SimEvent::plug_in(1000));
  s.push_back(SimEvent::press(2000));
  s.push_back(SimEvent::release(2500));
}

std::uint16_t wire_ohm(Ohms r) { return static_cast<std::uint16_t>(std::lround(r)); }

void can_chain(Scenario& sc, bool inject) {
  sc.attacker_taps_can = profile_of(sc.standard).exposes_can;
  sc.can_payloads = {overflow_exploit(0x5A)};
  sc.recorded_burst = encode_lid_burst(sc.config.lid_code);
  sc.script.push_back(SimEvent::attacker(500, AttackCommand::replay_lid()));
  start_charging(sc.script);
  sc.script.push_back(SimEvent::attacker(5000, AttackCommand::set_cp_duty(85.0)));
  if (inject) sc.script.push_back(SimEvent::attacker(kAttackAt, AttackCommand::trigger_can(0)));
  sc.script.push_back(SimEvent::tick(2 * kOneHour));
}

}  // namespace

Scenario library_scenario(std::string_view name, StandardId standard) {
  const auto& p = profile_of(standard);
  Scenario sc;
  sc.name = std::string(name);
  sc.standard = standard;
  auto& s = sc.script;
  auto& e = sc.expected;

  if (name == "nominal") {
    sc.description = "plug, confirm, charge one hour, stop, unlock, unplug";
    start_charging(s);
    s.push_back(SimEvent::user_stop(2500 + kOneHour));
    s.push_back(SimEvent::press(3500 + kOneHour));
    s.push_back(SimEvent::release(4000 + kOneHour));
    s.push_back(SimEvent::unplug(5000 + kOneHour));
    e.final_evse = "SessionEnded";
    e.gun_removable = true;
    e.min_delivered_wh = 100.0;
  } else if (name == "dos-cc") {
    sc.description = "implant shorts CC during charging (cuts it where 0 ohm is legitimate)";
    start_charging(s);
    const auto cmd = p.unpressed_ohm == 0.0 || p.pressed_ohm == 0.0 ? AttackCommand::set_cc_open()
                                                                     : AttackCommand::set_cc(0);
    s.push_back(SimEvent::attacker(kAttackAt, cmd));
    s.push_back(SimEvent::tick(kAttackAt + 2000));
    e.final_evse = "Halted(CcFault)";
    e.halted_within_ms = kTickMs;
  } else if (name == "dos-cp") {
    sc.description = "implant drives CP duty to 5 % during charging";
    start_charging(s);
    s.push_back(SimEvent::attacker(kAttackAt, AttackCommand::set_cp_duty(5.0)));
    s.push_back(SimEvent::tick(kAttackAt + 2000));
    e.final_evse = "Halted(AttackObservedDuty)";
    e.halted_within_ms = kTickMs;
  } else if (name == "pwm-injection") {
    sc.description = "implant raises CP duty from 50 % to 85 %, current follows to 51 A";
    start_charging(s);
    s.push_back(SimEvent::attacker(kAttackAt, AttackCommand::set_cp_duty(85.0)));
    s.push_back(SimEvent::tick(kAttackAt + 30'000));
    e.final_evse = "Charging(51A)";
    e.final_current_a = 51.0;
  } else if (name == "deadlock") {
    sc.description = "after a user stop the implant pins CC at the unpressed value; unlock fails";
    start_charging(s);
    s.push_back(SimEvent::user_stop(60'000));
    s.push_back(SimEvent::attacker(61'000, AttackCommand::set_cc(wire_ohm(p.unpressed_ohm))));
    s.push_back(SimEvent::press(62'000));
    s.push_back(SimEvent::release(62'500));
    s.push_back(SimEvent::unplug(63'500));
    s.push_back(SimEvent::tick(65'000));
    e.gun_removable = false;
  } else if (name == "can-overheat") {
    sc.description = "lid replay, 85 % duty, BMS override over CAN, two hours at 51 A";
    can_chain(sc, true);
    e.bms_compromised = true;
    e.min_final_bms_temp_c = 56.0;
  } else if (name == "bms-baseline") {
    sc.description = "the can-overheat chain without the CAN payload; BMS cutoff holds";
    can_chain(sc, false);
    const auto t = sc.config.thermal;
    e.bms_compromised = false;
    e.max_bms_temp_c = kBmsCutoffC + t.alpha * 51.0 * (kBmsStepMs / 1000.0);
  } else if (name == "thermal-cutoff") {
    sc.description = "gun temperature reaches 92 C during charging";
    start_charging(s);
    s.push_back(SimEvent::temp_set(kAttackAt, 92.0));
    s.push_back(SimEvent::tick(kAttackAt + 1000));
    e.final_evse = "Halted(ThermalCutoff)";
  } else if (name == "countermeasure-spoof") {
    sc.description = "upgraded gun and vehicle; implant spoofs the DC value of the unpressed state";
    sc.gun = GunKind::reference;
    sc.config.countermeasure = true;
    start_charging(s);
    s.push_back(SimEvent::attacker(
        kAttackAt, AttackCommand::set_cc(wire_ohm(p.unpressed_ohm + kMemoryResistorOhm))));
    s.push_back(SimEvent::tick(kAttackAt + 1000));
    e.alarm = true;
    e.final_evse = "Halted(CcFault)";
  } else if (name == "lid-replay") {
    sc.description = "replay of a recorded charge-port lid burst opens the lid";
    sc.recorded_burst = encode_lid_burst(sc.config.lid_code);
    s.push_back(SimEvent::attacker(500, AttackCommand::replay_lid()));
    s.push_back(SimEvent::tick(1000));
    e.lid_open = true;
  } else {
    throw UnknownScenarioError("unknown scenario '" + std::string(name) + "'");
  }
  return sc;
}

// ---------------------------------------------------------------------------
// JSON documents

namespace {

using ojson = nlohmann::ordered_json;

template <class T>
void put(ojson& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
void get(const nlohmann::json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key)) v = j.at(key).get<T>();
}

}  // namespace

std::string scenario_to_json(const Scenario& sc) {
  ojson doc;
  doc["name"] = sc.name;
  doc["description"] = sc.description;
  doc["standard"] = to_string(sc.standard);
  doc["gun"] = to_string(sc.gun);
  doc["attacker_taps_can"] = sc.attacker_taps_can;
  doc["advertised_duty"] = sc.config.advertised_duty;
  doc["countermeasure"] = sc.config.countermeasure;
  doc["probe_count"] = sc.config.probe_count;
  doc["ventilation"] = sc.config.ventilation;
  doc["lid_code"] = {{"sync", sc.config.lid_code.sync}, {"payloads", sc.config.lid_code.payloads}};
  if (!sc.recorded_burst.empty()) doc["recorded_burst"] = lid_burst_to_hex(sc.recorded_burst);
  auto payloads = ojson::array();
  for (const auto& frames : sc.can_payloads) {
    auto list = ojson::array();
    for (const auto& f : frames) list.push_back(to_string(f));
    payloads.push_back(std::move(list));
  }
  doc["can_payloads"] = std::move(payloads);

  auto script = ojson::array();
  for (const auto& ev : sc.script) {
    ojson item;
    item["t"] = ev.t;
    item["kind"] = to_string(ev.kind);
    if (ev.kind == EventKind::attacker_cmd) item["frame"] = to_hex(ev.frame);
    if (ev.kind == EventKind::temp_set) item["celsius"] = ev.celsius;
    script.push_back(std::move(item));
  }
  doc["script"] = std::move(script);

  ojson expect = ojson::object();
  const auto& e = sc.expected;
  put(expect, "final_evse", e.final_evse);
  put(expect, "gun_removable", e.gun_removable);
  put(expect, "halted_within_ms", e.halted_within_ms);
  put(expect, "final_current_a", e.final_current_a);
  put(expect, "min_final_bms_temp_c", e.min_final_bms_temp_c);
  put(expect, "max_bms_temp_c", e.max_bms_temp_c);
  put(expect, "bms_compromised", e.bms_compromised);
  put(expect, "alarm", e.alarm);
  put(expect, "lid_open", e.lid_open);
  put(expect, "min_delivered_wh", e.min_delivered_wh);
  doc["expect"] = std::move(expect);
  return doc.dump(2) + "\n";
}

Scenario scenario_from_json(std::string_view text) {
  Scenario sc;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (!doc.is_object()) throw MalformedInputError("scenario must be a JSON object");
    sc.name = doc.at("name").get<std::string>();
    sc.description = doc.value("description", "");

    const auto std_name = doc.at("standard").get<std::string>();
    const auto id = parse_standard(std_name);
    if (!id) throw MalformedInputError("unknown standard '" + std_name + "'");
    sc.standard = *id;

    const auto gun = doc.value("gun", std::string("legacy"));
    if (gun == "legacy") {
      sc.gun = GunKind::legacy;
    } else if (gun == "reference") {
      sc.gun = GunKind::reference;
    } else {
      throw MalformedInputError("gun must be 'legacy' or 'reference'");
    }
    sc.attacker_taps_can = doc.value("attacker_taps_can", false);
    sc.config.advertised_duty = doc.value("advertised_duty", sc.config.advertised_duty);
    if (!(sc.config.advertised_duty >= 0.0 && sc.config.advertised_duty <= 100.0)) {
      throw MalformedInputError("advertised_duty must be within [0, 100]");
    }
    sc.config.countermeasure = doc.value("countermeasure", false);
    sc.config.probe_count = doc.value("probe_count", sc.config.probe_count);
    if (sc.config.probe_count < 3 || sc.config.probe_count > kMaxProbeCount) {
      throw MalformedInputError("probe_count out of range");
    }
    sc.config.ventilation = doc.value("ventilation", false);
    if (doc.contains("lid_code")) {
      const auto& lc = doc.at("lid_code");
      sc.config.lid_code.sync = lc.at("sync").get<std::uint32_t>();
      sc.config.lid_code.payloads = lc.at("payloads").get<std::array<std::uint16_t, 3>>();
    }
    if (doc.contains("recorded_burst")) {
      sc.recorded_burst = lid_burst_from_hex(doc.at("recorded_burst").get<std::string>());
    }
    if (doc.contains("can_payloads")) {
      for (const auto& list : doc.at("can_payloads")) {
        std::vector<CanFrame> frames;
        for (const auto& f : list) frames.push_back(parse_can_frame(f.get<std::string>()));
        sc.can_payloads.push_back(std::move(frames));
      }
    }

    for (const auto& item : doc.at("script")) {
      SimEvent ev;
      ev.t = item.at("t").get<Millis>();
      if (ev.t < 0) throw MalformedInputError("event time must be >= 0");
      const auto kind_name = item.at("kind").get<std::string>();
      const auto kind = parse_event_kind(kind_name);
      if (!kind) throw MalformedInputError("unknown event kind '" + kind_name + "'");
      ev.kind = *kind;
      if (ev.kind == EventKind::attacker_cmd) {
        const auto bytes = from_hex(item.at("frame").get<std::string>());
        if (bytes.size() != ev.frame.size()) throw MalformedInputError("frame must be 4 bytes");
        std::copy(bytes.begin(), bytes.end(), ev.frame.begin());
      }
      if (ev.kind == EventKind::temp_set) ev.celsius = item.at("celsius").get<double>();
      sc.script.push_back(ev);
    }

    if (doc.contains("expect")) {
      const auto& j = doc.at("expect");
      auto& e = sc.expected;
      get(j, "final_evse", e.final_evse);
      get(j, "gun_removable", e.gun_removable);
      get(j, "halted_within_ms", e.halted_within_ms);
      get(j, "final_current_a", e.final_current_a);
      get(j, "min_final_bms_temp_c", e.min_final_bms_temp_c);
      get(j, "max_bms_temp_c", e.max_bms_temp_c);
      get(j, "bms_compromised", e.bms_compromised);
      get(j, "alarm", e.alarm);
      get(j, "lid_open", e.lid_open);
      get(j, "min_delivered_wh", e.min_delivered_wh);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw MalformedInputError(std::string("scenario JSON: ") + ex.what());
  } catch (const MalformedInputError&) {
    throw;
  } catch (const Error& ex) {
    throw MalformedInputError(std::string("scenario JSON: ") + ex.what());
  }
  return sc;
}

SessionSetup make_setup(const Scenario& sc, std::uint64_t seed) {
  SessionSetup setup;
  setup.config = sc.config;
  setup.config.seed = seed;
  setup.wiring = make_wiring(profile_of(sc.standard), sc.gun, sc.attacker_taps_can);
  setup.device.recorded_burst = sc.recorded_burst;
  setup.device.can_payloads = sc.can_payloads;
  return setup;
}

ScenarioRun run_scenario(const Scenario& sc, std::uint64_t seed) {
  ScenarioRun run;
  run.outcome = run_session(profile_of(sc.standard), sc.script, make_setup(sc, seed));
  run.predicates = check(sc.expected, run.outcome);
  run.passed = true;
  for (const auto& p : run.predicates) run.passed = run.passed && p.pass;
  return run;
}

}  // namespace evsim
