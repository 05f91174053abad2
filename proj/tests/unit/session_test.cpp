#include <random>

#include <gtest/gtest.h>

#include "evsim/error.hpp"
#include "evsim/session.hpp"

using namespace evsim;

namespace {

struct Rig {
  const StandardProfile& profile;
  SessionConfig config;
  World world;

  explicit Rig(StandardId id, GunKind gun = GunKind::legacy, bool countermeasure = false)
      : profile(profile_of(id)), config(make_config(countermeasure)),
        world(initial_world(profile, config, make_wiring(profile, gun, false), {})) {}

  static SessionConfig make_config(bool countermeasure) {
    SessionConfig c;
    c.countermeasure = countermeasure;
    return c;
  }

  std::vector<TraceRecord> apply(const SimEvent& e) {
    auto r = step(profile, config, std::move(world), e);
    world = std::move(r.world);
    return r.records;
  }

  void charge() {
    apply(SimEvent::plug_in(1000));
    apply(SimEvent::press(2000));
    apply(SimEvent::release(2500));
  }
};

bool has_record(const std::vector<TraceRecord>& rs, std::string_view kind, std::string_view state = {}) {
  for (const auto& r : rs) {
    if (r.kind != kind) continue;
    if (state.empty()) return true;
    const auto* v = r.find("state");
    if (v && std::get<std::string>(*v) == state) return true;
  }
  return false;
}

}  // namespace

TEST(Step, PlugInEngagesLock) {
  Rig rig(StandardId::sae_j1772);
  rig.apply(SimEvent::plug_in(0));
  EXPECT_EQ(rig.world.evse.phase, EvsePhase::gun_connected);
  EXPECT_TRUE(rig.world.ev.lock_engaged);
  EXPECT_EQ(rig.world.ev.cp_state, CpState::b_connected);
}

TEST(Step, NoLockOnCcsTwo) {
  Rig rig(StandardId::ccs_2);
  rig.apply(SimEvent::plug_in(0));
  EXPECT_EQ(rig.world.evse.phase, EvsePhase::gun_connected);
  EXPECT_FALSE(rig.world.ev.lock_engaged);
}

TEST(Step, ConfirmationGoesThroughHandshake) {
  Rig rig(StandardId::nacs);
  rig.apply(SimEvent::plug_in(1000));
  rig.apply(SimEvent::press(2000));
  const auto records = rig.apply(SimEvent::release(2500));
  EXPECT_TRUE(has_record(records, "state", "Handshake"));
  EXPECT_TRUE(has_record(records, "state", "Charging(32A)"));
  EXPECT_EQ(rig.world.evse, EvseState::charging(32.0));
}

TEST(Step, SlowButtonCycleDoesNotCount) {
  Rig rig(StandardId::nacs);
  rig.apply(SimEvent::plug_in(1000));
  rig.apply(SimEvent::press(2000));
  rig.apply(SimEvent::release(2000 + kUnlockWindowMs + 1));
  EXPECT_EQ(rig.world.evse.phase, EvsePhase::gun_connected);
}

TEST(Step, ShortedCcHaltsCharging) {
  Rig rig(StandardId::sae_j1772);
  rig.charge();
  rig.apply(SimEvent::attacker(5000, AttackCommand::set_cc(0)));
  EXPECT_TRUE(rig.world.evse.is_halted(HaltReason::cc_fault));
  EXPECT_EQ(rig.world.halted_at_ms, 5000);
}

TEST(Step, OverheatedGunHalts) {
  Rig rig(StandardId::iec_61851);
  rig.charge();
  rig.apply(SimEvent::temp_set(5000, 92.0));
  EXPECT_TRUE(rig.world.evse.is_halted(HaltReason::thermal_cutoff));
}

TEST(Step, GunTemperatureBelowLimitKeepsCharging) {
  Rig rig(StandardId::iec_61851);
  rig.charge();
  rig.apply(SimEvent::temp_set(5000, 89.9));
  EXPECT_TRUE(rig.world.evse.is_charging());
}

TEST(Step, PilotShortIsCpFault) {
  Rig rig(StandardId::gbt_20234_2);
  rig.charge();
  rig.world.ev.cp_short = true;
  rig.apply(SimEvent::tick(5000));
  EXPECT_TRUE(rig.world.evse.is_halted(HaltReason::cp_fault));
}

TEST(Step, DutyInjection) {
  Rig rig(StandardId::sae_j1772);
  rig.charge();
  rig.apply(SimEvent::attacker(5000, AttackCommand::set_cp_duty(85)));
  EXPECT_EQ(rig.world.evse, EvseState::charging(51.0));
  rig.apply(SimEvent::attacker(6000, AttackCommand::set_cp_duty(5)));
  EXPECT_TRUE(rig.world.evse.is_halted(HaltReason::attack_observed_duty));
}

TEST(Step, CorruptedFrameIsIgnored) {
  Rig rig(StandardId::sae_j1772);
  rig.charge();
  auto frame = encode_command(AttackCommand::set_cc(0));
  frame[3] ^= 0xFF;
  const auto records = rig.apply(SimEvent::attacker_raw(5000, frame));
  EXPECT_TRUE(has_record(records, "frame_rejected"));
  EXPECT_TRUE(rig.world.evse.is_charging());
}

TEST(Step, UserStopThenUnlockThenUnplug) {
  Rig rig(StandardId::sae_j1772);
  rig.charge();
  rig.apply(SimEvent::user_stop(10000));
  EXPECT_TRUE(rig.world.evse.is_halted(HaltReason::user_stop));
  EXPECT_TRUE(rig.world.ev.lock_engaged);
  rig.apply(SimEvent::press(11000));
  rig.apply(SimEvent::release(11500));
  EXPECT_FALSE(rig.world.ev.lock_engaged);
  rig.apply(SimEvent::unplug(12000));
  EXPECT_EQ(rig.world.evse.phase, EvsePhase::session_ended);
}

TEST(Step, PinnedUnpressedKeepsLock) {
  for (const auto id : kAllStandards) {
    Rig rig(id);
    rig.charge();
    rig.apply(SimEvent::user_stop(10000));
    rig.apply(SimEvent::attacker(
        10500, AttackCommand::set_cc(static_cast<std::uint16_t>(rig.profile.unpressed_ohm))));
    rig.apply(SimEvent::press(11000));
    rig.apply(SimEvent::release(11500));
    const auto records = rig.apply(SimEvent::unplug(12000));
    EXPECT_EQ(rig.world.ev.lock_engaged, rig.profile.has_lock) << to_string(id);
    EXPECT_EQ(has_record(records, "unplug_blocked"), rig.profile.has_lock) << to_string(id);
  }
}

TEST(Step, RejectsTimeTravel) {
  Rig rig(StandardId::sae_j1772);
  rig.apply(SimEvent::tick(1000));
  EXPECT_THROW(rig.apply(SimEvent::tick(999)), HarnessError);
}

TEST(Step, CanNeedsTapAndOpenLid) {
  const auto& p = profile_of(StandardId::nacs);
  SessionConfig cfg;
  ImplantedDevice dev;
  dev.can_payloads = {overflow_exploit(1)};
  dev.recorded_burst = encode_lid_burst(cfg.lid_code);
  World w = initial_world(p, cfg, make_wiring(p, GunKind::legacy, true), dev);
  w = step(p, cfg, std::move(w), SimEvent::attacker(100, AttackCommand::trigger_can(0))).world;
  EXPECT_FALSE(w.bms.compromised());  // lid closed
  w = step(p, cfg, std::move(w), SimEvent::attacker(200, AttackCommand::replay_lid())).world;
  EXPECT_TRUE(w.ev.lid_open);
  w = step(p, cfg, std::move(w), SimEvent::attacker(300, AttackCommand::trigger_can(0))).world;
  EXPECT_TRUE(w.bms.compromised());
}

TEST(Step, WrongLidCodeKeepsLidShut) {
  const auto& p = profile_of(StandardId::nacs);
  SessionConfig cfg;
  ImplantedDevice dev;
  dev.recorded_burst = encode_lid_burst(LidCode{1, {2, 3, 4}});
  World w = initial_world(p, cfg, make_wiring(p, GunKind::legacy, true), dev);
  w = step(p, cfg, std::move(w), SimEvent::attacker(100, AttackCommand::replay_lid())).world;
  EXPECT_FALSE(w.ev.lid_open);
}

TEST(Countermeasure, ReferenceGunChargesAndSpoofAlarms) {
  for (const auto id : kAllStandards) {
    Rig rig(id, GunKind::reference, true);
    rig.charge();
    EXPECT_TRUE(rig.world.evse.is_charging()) << to_string(id);
    const auto dc = rig.profile.unpressed_ohm + kMemoryResistorOhm;
    rig.apply(SimEvent::attacker(5000, AttackCommand::set_cc(static_cast<std::uint16_t>(dc))));
    EXPECT_TRUE(rig.world.ev.alarm) << to_string(id);
    EXPECT_TRUE(rig.world.evse.is_halted(HaltReason::cc_fault)) << to_string(id);
  }
}

TEST(Countermeasure, LegacyGunNeverCharges) {
  Rig rig(StandardId::nacs, GunKind::legacy, true);
  rig.charge();
  EXPECT_FALSE(rig.world.evse.is_charging());
  EXPECT_TRUE(rig.world.ev.alarm);
}

// ---------------------------------------------------------------------------
// run_session

namespace {

std::vector<SimEvent> charge_script() {
  return {SimEvent::plug_in(1000), SimEvent::press(2000), SimEvent::release(2500)};
}

SessionSetup setup_for(const StandardProfile& p) {
  SessionSetup s;
  s.wiring = make_wiring(p, GunKind::legacy, false);
  return s;
}

}  // namespace

TEST(RunSession, NominalEndsRemovable) {
  const auto& p = profile_of(StandardId::sae_j1772);
  auto script = charge_script();
  for (auto e : {SimEvent::user_stop(3'602'500), SimEvent::press(3'603'500), SimEvent::release(3'604'000),
                 SimEvent::unplug(3'605'000)}) {
    script.push_back(e);
  }
  const auto out = run_session(p, script, setup_for(p));
  EXPECT_EQ(out.final_evse.phase, EvsePhase::session_ended);
  EXPECT_TRUE(out.gun_removable);
  EXPECT_GT(out.delivered_wh, 0.0);
}

TEST(RunSession, DosWithinOneTickOnEveryStandard) {
  for (const auto id : kAllStandards) {
    const auto& p = profile_of(id);
    auto script = charge_script();
    const bool zero_is_legit = p.unpressed_ohm == 0.0 || p.pressed_ohm == 0.0;
    script.push_back(SimEvent::attacker(
        10'050, zero_is_legit ? AttackCommand::set_cc_open() : AttackCommand::set_cc(0)));
    script.push_back(SimEvent::tick(11'000));
    const auto out = run_session(p, script, setup_for(p));
    ASSERT_TRUE(out.halted_at_ms.has_value()) << to_string(id);
    EXPECT_TRUE(out.final_evse.is_halted(HaltReason::cc_fault));
    EXPECT_LE(*out.halted_at_ms - 10'050, kTickMs);
  }
}

TEST(RunSession, TicksFillTheTimeline) {
  const auto& p = profile_of(StandardId::nacs);
  const std::vector<SimEvent> script{SimEvent::tick(1000)};
  const auto out = run_session(p, script, setup_for(p));
  EXPECT_EQ(out.final_evse.phase, EvsePhase::idle);
  EXPECT_EQ(out.trace.front().kind, "session_start");
}

TEST(RunSession, RejectsUnorderedScriptAndBadTap) {
  const auto& p = profile_of(StandardId::sae_j1772);
  const std::vector<SimEvent> bad{SimEvent::plug_in(2000), SimEvent::press(1000)};
  EXPECT_THROW(run_session(p, bad, setup_for(p)), HarnessError);
  auto setup = setup_for(p);
  setup.wiring.can_tap = true;
  EXPECT_THROW(run_session(p, charge_script(), setup), HarnessError);
}

TEST(RunSession, DeterministicTrace) {
  const auto& p = profile_of(StandardId::gbt_20234_3);
  auto script = charge_script();
  script.push_back(SimEvent::attacker(5000, AttackCommand::set_cp_duty(85)));
  script.push_back(SimEvent::tick(300'000));
  auto setup = setup_for(p);
  setup.config.seed = 77;
  const auto a = run_session(p, script, setup);
  const auto b = run_session(p, script, setup);
  EXPECT_EQ(to_jsonl(a.trace), to_jsonl(b.trace));
}

// ---------------------------------------------------------------------------
// Invariants under random event sequences.

TEST(SessionProperty, RandomScriptsKeepInvariants) {
  std::mt19937_64 rng(2718);
  for (int run = 0; run < 300; ++run) {
    const auto id = kAllStandards[rng() % kAllStandards.size()];
    const auto& p = profile_of(id);
    SessionConfig cfg;
    cfg.countermeasure = rng() % 4 == 0;
    cfg.seed = rng();
    const auto gun = cfg.countermeasure && rng() % 2 ? GunKind::reference : GunKind::legacy;
    World w = initial_world(p, cfg, make_wiring(p, gun, false), {});

    Millis t = 0;
    std::string prev_state = "Idle";
    for (int i = 0; i < 120; ++i) {
      t += static_cast<Millis>(rng() % 1500);
      SimEvent e;
      switch (rng() % 10) {
        case 0: e = SimEvent::plug_in(t); break;
        case 1: e = SimEvent::unplug(t); break;
        case 2: case 3: e = SimEvent::press(t); break;
        case 4: case 5: e = SimEvent::release(t); break;
        case 6: e = SimEvent::user_stop(t); break;
        case 7: e = SimEvent::temp_set(t, 20.0 + static_cast<double>(rng() % 80)); break;
        case 8: {
          const std::uint16_t args[] = {0, kCcOpenArg, static_cast<std::uint16_t>(p.unpressed_ohm),
                                        static_cast<std::uint16_t>(p.pressed_ohm),
                                        static_cast<std::uint16_t>(rng() % 5000)};
          const auto cmd = rng() % 3 == 0 ? AttackCommand::set_cp_duty(static_cast<double>(rng() % 101))
                           : rng() % 2    ? AttackCommand::set_cc(args[rng() % 5])
                                          : AttackCommand::disarm();
          e = SimEvent::attacker(t, cmd);
          break;
        }
        default: e = SimEvent::tick(t); break;
      }
      const bool was_charging = w.evse.is_charging();
      const double wh_before = w.delivered_wh;
      auto r = step(p, cfg, std::move(w), e);
      w = std::move(r.world);

      // Safety: energy only accrues across an interval that was spent charging.
      if (!was_charging) {
        EXPECT_EQ(w.delivered_wh, wh_before);
      }
      // Lock soundness.
      if (w.ev.lock_engaged) {
        EXPECT_TRUE(p.has_lock);
        EXPECT_TRUE(is_connected(w.ev.last_cc));
      }
      // Charging only via Handshake.
      for (const auto& rec : r.records) {
        if (rec.kind != "state") continue;
        const auto& s = std::get<std::string>(*rec.find("state"));
        if (s.starts_with("Charging")) {
          EXPECT_TRUE(prev_state == "Handshake" || prev_state.starts_with("Charging")) << prev_state;
        }
        prev_state = s;
      }
      if (w.evse.phase == EvsePhase::halted) EXPECT_TRUE(w.evse.reason.has_value());
      for (const auto& rec : r.records) EXPECT_EQ(rec.t_ms, t);
    }
  }
}
