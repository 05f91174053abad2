#include "evsim/session.hpp"

#include <array>
#include <cmath>
#include <cstdio>

#include "evsim/error.hpp"
#include "evsim/event_queue.hpp"

namespace evsim {

std::string_view to_string(EvsePhase p) {
  switch (p) {
    case EvsePhase::idle: return "Idle";
    case EvsePhase::gun_connected: return "GunConnected";
    case EvsePhase::handshake: return "Handshake";
    case EvsePhase::charging: return "Charging";
    case EvsePhase::halted: return "Halted";
    case EvsePhase::session_ended: return "SessionEnded";
  }
  return "?";
}

std::string_view to_string(HaltReason r) {
  switch (r) {
    case HaltReason::cc_fault: return "CcFault";
    case HaltReason::cp_fault: return "CpFault";
    case HaltReason::thermal_cutoff: return "ThermalCutoff";
    case HaltReason::user_stop: return "UserStop";
    case HaltReason::attack_observed_duty: return "AttackObservedDuty";
  }
  return "?";
}

std::string describe(const EvseState& s) {
  std::string out(to_string(s.phase));
  if (s.phase == EvsePhase::charging) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "(%gA)", s.current);
    out += buf;
  } else if (s.phase == EvsePhase::halted && s.reason) {
    out += "(" + std::string(to_string(*s.reason)) + ")";
  }
  return out;
}

namespace {

constexpr std::array<std::string_view, 8> kEventNames = {
    "plug_in", "unplug", "button_press", "button_release",
    "user_stop", "attacker_cmd", "temp_set", "tick",
};

}  // namespace

std::string_view to_string(EventKind k) { return kEventNames.at(static_cast<std::size_t>(k)); }

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (std::size_t i = 0; i < kEventNames.size(); ++i) {
    if (kEventNames[i] == name) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

std::string_view to_string(GunKind g) { return g == GunKind::legacy ? "legacy" : "reference"; }

WiringHarness make_wiring(const StandardProfile& profile, GunKind gun, bool can_tap) {
  auto build = [&](bool pressed) {
    return gun == GunKind::legacy ? legacy_gun(profile.id, pressed) : reference_gun(profile.id, pressed);
  };
  WiringHarness w;
  w.genuine_unpressed = build(false);
  w.genuine_pressed = build(true);
  w.can_tap = can_tap;
  return w;
}

World initial_world(const StandardProfile& profile, const SessionConfig& config,
                    WiringHarness wiring, ImplantedDevice device) {
  World w{};
  w.wiring = std::move(wiring);
  w.device = std::move(device);
  w.bms = make_bms(config.thermal.ambient_c);
  w.bms_max_temp_c = w.bms.temp_c;
  if (config.countermeasure) {
    const auto probes = choose_probe_freqs(config.seed, config.probe_count);
    w.signatures.push_back(make_signature(profile.id, false, probes));
    w.signatures.push_back(make_signature(profile.id, true, probes));
  }
  return w;
}

namespace {

using Src = TraceSource;

// What the vehicle concludes about its CC input.
CcClass observe_cc(const StandardProfile& profile, const SessionConfig& config, World& w,
                   TraceRecorder& rec) {
  const auto net = effective_cc_network(w.wiring);
  const auto dc = impedance_at(net, 0.0);
  if (!config.countermeasure) return classify_cc_voltage(cc_voltage(dc, profile), profile);

  if (dc.is_infinite()) {
    w.last_verdict.clear();
    return CcClass::open;
  }
  const Verdict unpressed = dual_check(net, w.signatures[0]);
  const Verdict pressed = dual_check(net, w.signatures[1]);
  CcClass cls = CcClass::fault;
  std::string verdict;
  if (pressed.is_legit()) {
    cls = CcClass::connected_pressed;
    verdict = "legit-pressed";
  } else if (unpressed.is_legit()) {
    cls = CcClass::connected_unpressed;
    verdict = "legit-unpressed";
  } else {
    // Report against whichever state the DC reading is nearer to.
    const double d0 = std::abs(dc.magnitude() - w.signatures[0].expected_magnitude.front());
    const double d1 = std::abs(dc.magnitude() - w.signatures[1].expected_magnitude.front());
    verdict = to_string(d1 < d0 ? pressed : unpressed);
  }
  if (verdict != w.last_verdict) {
    const bool spoofed = cls == CcClass::fault;
    auto& r = rec.add(Src::countermeasure, "verdict");
    with(r, "verdict", verdict);
    with(r, "dc_ohm", dc.magnitude());
    if (spoofed && !w.ev.alarm) {
      w.ev.alarm = true;
      with(r, "alarm", true);
    }
    w.last_verdict = verdict;
  }
  return cls;
}

void set_evse(World& w, EvseState next, TraceRecorder& rec) {
  if (next == w.evse) return;
  w.evse = next;
  auto& r = rec.add(Src::evse, "state");
  with(r, "state", describe(next));
  if (next.phase == EvsePhase::halted) {
    if (!w.halted_at_ms) w.halted_at_ms = w.now;
    w.ev.charge_requested = false;
  }
}

void set_lock(World& w, bool engaged, std::string_view why, TraceRecorder& rec) {
  if (w.ev.lock_engaged == engaged) return;
  w.ev.lock_engaged = engaged;
  auto& r = rec.add(Src::ev, engaged ? "lock_engaged" : "lock_released");
  with(r, "reason", why);
}

void apply_attacker(const SessionConfig& config, World& w, const CommandFrame& frame,
                    TraceRecorder& rec) {
  AttackCommand cmd;
  try {
    cmd = decode_command(frame);
  } catch (const Error& e) {
    auto& r = rec.add(Src::attacker, "frame_rejected");
    with(r, "frame", to_hex(frame));
    with(r, "error", e.what());
    return;
  }
  if (!w.first_attack_ms) w.first_attack_ms = w.now;

  auto reject = [&](std::string_view why) {
    auto& r = rec.add(Src::attacker, "command_failed");
    with(r, "opcode", to_string(cmd.opcode));
    with(r, "reason", why);
  };

  switch (cmd.opcode) {
    case Opcode::disarm: {
      w.wiring.attacker_cc_override.reset();
      w.wiring.cp_duty_override.reset();
      w.device.pot.disarm();
      rec.add(Src::attacker, "disarmed");
      return;
    }
    case Opcode::set_cc_resistance: {
      auto& r = rec.add(Src::attacker, "cc_override");
      if (cmd.arg == kCcOpenArg) {
        w.wiring.attacker_cc_override = Impedance::infinite();
        with(r, "ohm", "open");
      } else if (cmd.arg == 0) {
        w.wiring.attacker_cc_override = Impedance::zero();
        with(r, "ohm", 0.0);
      } else {
        try {
          const Ohms achieved = w.device.pot.set_cc(cmd.arg);
          w.wiring.attacker_cc_override = Impedance::ohms(achieved);
          with(r, "requested", static_cast<std::int64_t>(cmd.arg));
          with(r, "ohm", achieved);
          with(r, "tap", w.device.pot.tap());
        } catch (const UnreachableError&) {
          r.kind = "command_failed";
          with(r, "opcode", to_string(cmd.opcode));
          with(r, "reason", "unreachable");
        }
      }
      return;
    }
    case Opcode::set_cp_duty: {
      if (cmd.arg > 10000) return reject("duty above 100%");
      const Percent duty = cmd.arg / 100.0;
      w.wiring.cp_duty_override = duty;
      with(rec.add(Src::attacker, "cp_override"), "duty", duty);
      return;
    }
    case Opcode::trigger_can_payload: {
      if (!w.wiring.can_tap) return reject("no-can-lines");
      if (!w.ev.lid_open) return reject("lid-closed");
      if (cmd.arg >= w.device.can_payloads.size()) return reject("no-such-payload");
      const auto& frames = w.device.can_payloads[cmd.arg];
      const std::uint8_t before = w.bms.mosfet_override();
      w.bms = bms_feed(std::move(w.bms), frames);
      auto& r = rec.add(Src::attacker, "can_injected");
      with(r, "payload", static_cast<std::int64_t>(cmd.arg));
      with(r, "frames", static_cast<std::int64_t>(frames.size()));
      if (w.bms.mosfet_override() != before) {
        with(rec.add(Src::bms, "override_written"), "value",
             static_cast<std::int64_t>(w.bms.mosfet_override()));
      }
      return;
    }
    case Opcode::replay_lid_signal: {
      if (w.device.recorded_burst.empty()) return reject("nothing-recorded");
      with(rec.add(Src::attacker, "lid_replayed"), "bits",
           static_cast<std::int64_t>(w.device.recorded_burst.size()));
      try {
        const auto burst = decode_lid_burst(w.device.recorded_burst);
        if (burst.code() != config.lid_code) {
          rec.add(Src::ev, "lid_code_mismatch");
        } else if (!w.ev.lid_open) {
          w.ev.lid_open = true;
          rec.add(Src::ev, "lid_opened");
        }
      } catch (const MalformedBurstError& e) {
        with(rec.add(Src::ev, "lid_burst_rejected"), "error", e.what());
      }
      return;
    }
  }
}

void apply_event(const SessionConfig& config, World& w, const SimEvent& e, TraceRecorder& rec) {
  switch (e.kind) {
    case EventKind::plug_in:
      if (w.wiring.plugged) return;
      w.wiring.plugged = true;
      w.wiring.button_pressed = false;
      if (w.evse.phase == EvsePhase::session_ended) w.evse = EvseState::idle();
      rec.add(Src::evse, "plug_in");
      return;
    case EventKind::unplug:
      if (!w.wiring.plugged) return;
      if (w.ev.lock_engaged) {
        rec.add(Src::ev, "unplug_blocked");
        return;
      }
      w.wiring.plugged = false;
      w.wiring.button_pressed = false;
      rec.add(Src::evse, "unplug");
      return;
    case EventKind::button_press:
    case EventKind::button_release: {
      const bool pressed = e.kind == EventKind::button_press;
      if (w.wiring.button_pressed == pressed) return;
      w.wiring.button_pressed = pressed;
      rec.add(Src::evse, pressed ? "button_press" : "button_release");
      return;
    }
    case EventKind::user_stop:
      rec.add(Src::ev, "user_stop");
      return;
    case EventKind::attacker_cmd:
      apply_attacker(config, w, e.frame, rec);
      return;
    case EventKind::temp_set:
      w.ev.gun_temp_c = e.celsius;
      with(rec.add(Src::ev, "gun_temp"), "celsius", e.celsius);
      return;
    case EventKind::tick:
      return;
  }
}

void run_bms(const SessionConfig& config, World& w, TraceRecorder& rec) {
  const bool was_on = w.bms.mosfet_on;
  const Amperes current = w.evse.is_charging() ? w.evse.current : 0.0;
  w.bms = bms_tick(std::move(w.bms), current, kBmsStepMs / 1000.0, config.thermal);
  w.bms_max_temp_c = std::max(w.bms_max_temp_c, w.bms.temp_c);
  if (w.bms.mosfet_on != was_on) {
    auto& r = rec.add(Src::bms, w.bms.mosfet_on ? "mosfet_closed" : "mosfet_opened");
    with(r, "temp_c", w.bms.temp_c);
  }
  if (w.now % 60000 == 0) {
    auto& r = rec.add(Src::bms, "temperature");
    with(r, "temp_c", w.bms.temp_c);
    with(r, "mosfet_on", w.bms.mosfet_on);
  }
}

void evaluate(const StandardProfile& profile, const SessionConfig& config, World& w,
              bool user_stop, TraceRecorder& rec) {
  auto& ev = w.ev;

  // Vehicle: CC observation and button-cycle detection.
  const CcClass cls = observe_cc(profile, config, w, rec);
  bool cycle = false;
  if (cls != ev.last_cc) {
    auto& r = rec.add(Src::ev, "cc_class");
    with(r, "from", to_string(ev.last_cc));
    with(r, "to", to_string(cls));
    if (ev.last_cc == CcClass::connected_unpressed && cls == CcClass::connected_pressed) {
      ev.press_seen_at = w.now;
    } else if (ev.last_cc == CcClass::connected_pressed && cls == CcClass::connected_unpressed &&
               ev.press_seen_at && w.now - *ev.press_seen_at <= kUnlockWindowMs) {
      cycle = true;
    }
    if (cls != CcClass::connected_pressed) ev.press_seen_at.reset();
    ev.last_cc = cls;
  }

  // Vehicle: lock and charge intent.
  if (!is_connected(cls)) {
    set_lock(w, false, cls == CcClass::open ? "gun-absent" : "cc-fault", rec);
    if (cls == CcClass::open) {
      ev.confirmed = false;
      ev.unlock_granted = false;
      ev.charge_requested = false;
    }
  } else {
    if (cycle) {
      if (!ev.confirmed && w.evse.phase == EvsePhase::gun_connected) {
        ev.confirmed = true;
        ev.charge_requested = true;
        rec.add(Src::ev, "charge_confirmed");
      } else if (ev.confirmed && !w.evse.is_charging()) {
        ev.unlock_granted = true;
        ev.charge_requested = false;
        if (ev.lock_engaged) {
          set_lock(w, false, "button", rec);
        } else {
          rec.add(Src::ev, "unlock_requested");
        }
      }
    }
    if (profile.has_lock && !ev.unlock_granted) set_lock(w, true, "gun-connected", rec);
  }
  if (user_stop) ev.charge_requested = false;

  CpState want = CpState::b_connected;
  if (ev.cp_short) {
    want = CpState::d_fault;
  } else if (cls == CcClass::open) {
    want = CpState::a_not_connected;
  } else if (is_connected(cls) && ev.charge_requested && w.bms.mosfet_on &&
             (ev.lock_engaged || !profile.has_lock)) {
    want = config.ventilation ? CpState::ventilation : CpState::c_charging;
  }
  if (want != ev.cp_state) {
    auto& r = rec.add(Src::ev, "cp_state");
    with(r, "from", to_string(ev.cp_state));
    with(r, "to", to_string(want));
    ev.cp_state = want;
  }

  // Charger: reads CP through its divider, advertises duty.
  const CpState cp_seen = classify_cp(impedance_at(ev_cp_network(ev.cp_state), kNominalPilotFrequency));
  const Percent duty = w.wiring.cp_duty_override.value_or(config.advertised_duty);
  const auto offered = duty_to_current(duty);
  const bool cp_requests = cp_seen == CpState::c_charging || cp_seen == CpState::ventilation;

  if (!w.wiring.plugged) {
    if (w.evse.phase != EvsePhase::idle && w.evse.phase != EvsePhase::session_ended) {
      set_evse(w, EvseState::of(EvsePhase::session_ended), rec);
    }
    return;
  }

  switch (w.evse.phase) {
    case EvsePhase::idle:
    case EvsePhase::session_ended:
      if (is_connected(cls)) set_evse(w, EvseState::of(EvsePhase::gun_connected), rec);
      return;
    case EvsePhase::handshake:  // transient, resolved within one evaluation
    case EvsePhase::gun_connected:
      if (!is_connected(cls)) return set_evse(w, EvseState::halted(HaltReason::cc_fault), rec);
      if (ev.gun_temp_c >= kGunTempLimitC) {
        return set_evse(w, EvseState::halted(HaltReason::thermal_cutoff), rec);
      }
      if (cp_seen == CpState::d_fault) return set_evse(w, EvseState::halted(HaltReason::cp_fault), rec);
      if (!cp_requests) return;
      set_evse(w, EvseState::of(EvsePhase::handshake), rec);
      if (!offered) return set_evse(w, EvseState::halted(HaltReason::attack_observed_duty), rec);
      return set_evse(w, EvseState::charging(*offered), rec);
    case EvsePhase::charging:
      if (user_stop) return set_evse(w, EvseState::halted(HaltReason::user_stop), rec);
      if (!is_connected(cls)) return set_evse(w, EvseState::halted(HaltReason::cc_fault), rec);
      if (cp_seen == CpState::d_fault) return set_evse(w, EvseState::halted(HaltReason::cp_fault), rec);
      if (ev.gun_temp_c >= kGunTempLimitC) {
        return set_evse(w, EvseState::halted(HaltReason::thermal_cutoff), rec);
      }
      if (!offered) return set_evse(w, EvseState::halted(HaltReason::attack_observed_duty), rec);
      if (!cp_requests) return set_evse(w, EvseState::of(EvsePhase::gun_connected), rec);
      return set_evse(w, EvseState::charging(*offered), rec);
    case EvsePhase::halted:
      return;
  }
}

}  // namespace

StepResult step(const StandardProfile& profile, const SessionConfig& config, World world,
                const SimEvent& event) {
  if (event.t < world.now) throw HarnessError("event time decreases");
  TraceRecorder rec(event.t);

  if (world.evse.is_charging()) {
    world.delivered_wh += world.evse.current * kMainsVolts * static_cast<double>(event.t - world.now) /
                          3.6e6;
  }
  world.now = event.t;

  apply_event(config, world, event, rec);
  if (event.kind == EventKind::tick && event.t > 0 && event.t % kBmsStepMs == 0) {
    run_bms(config, world, rec);
  }
  evaluate(profile, config, world, event.kind == EventKind::user_stop, rec);
  return {std::move(world), rec.take()};
}

SessionOutcome run_session(const StandardProfile& profile, std::span<const SimEvent> script,
                           const SessionSetup& setup) {
  for (std::size_t i = 1; i < script.size(); ++i) {
    if (script[i].t < script[i - 1].t) throw HarnessError("script is not time-ordered");
  }
  if (!script.empty() && script.front().t < 0) throw HarnessError("negative event time");
  if (setup.wiring.can_tap && !profile.exposes_can) {
    throw HarnessError("CAN tap requested on a standard without exposed CAN lines");
  }

  World world = initial_world(profile, setup.config, setup.wiring, setup.device);
  SessionOutcome out;
  {
    TraceRecord start{0, TraceSource::evse, "session_start", {}};
    with(start, "standard", to_string(profile.id));
    with(start, "seed", static_cast<std::int64_t>(setup.config.seed));
    with(start, "advertised_duty", setup.config.advertised_duty);
    with(start, "countermeasure", setup.config.countermeasure);
    if (!world.signatures.empty()) {
      std::string probes;
      for (const Hertz f : world.signatures.front().probe_freqs) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%s%.1f", probes.empty() ? "" : ",", f);
        probes += buf;
      }
      with(start, "probe_hz", probes);
    }
    out.trace.push_back(std::move(start));
  }

  struct Queued {
    SimEvent event;
    bool generated;  // part of the 100 ms tick chain
  };
  EventQueue<Queued> queue;
  for (const auto& e : script) queue.schedule(e.t, {e, false});
  const Millis end = script.empty() ? 0 : script.back().t;
  if (!script.empty()) queue.schedule(0, {SimEvent::tick(0), true});

  while (auto entry = queue.pop()) {
    const auto& [event, generated] = entry->payload;
    auto result = step(profile, setup.config, std::move(world), event);
    world = std::move(result.world);
    for (auto& r : result.records) out.trace.push_back(std::move(r));
    if (world.evse.phase == EvsePhase::session_ended) break;
    if (generated && event.t + kTickMs <= end) {
      queue.schedule(event.t + kTickMs, {SimEvent::tick(event.t + kTickMs), true});
    }
  }

  out.final_evse = world.evse;
  out.final_ev = world.ev;
  out.gun_removable = !world.ev.lock_engaged;
  out.delivered_wh = world.delivered_wh;
  out.bms_temp_c = world.bms.temp_c;
  out.bms_max_temp_c = world.bms_max_temp_c;
  out.bms_compromised = world.bms.compromised();
  out.first_attack_ms = world.first_attack_ms;
  out.halted_at_ms = world.halted_at_ms;
  return out;
}

}  // namespace evsim
