#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "evsim/error.hpp"
#include "evsim/reports.hpp"
#include "evsim/scenario.hpp"

using namespace evsim;

TEST(Library, NamesUniqueAndResolvable) {
  const auto& names = scenario_names();
  EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), names.size());
  for (const auto& n : names) {
    for (const auto id : kAllStandards) EXPECT_NO_THROW(library_scenario(n, id)) << n;
  }
  EXPECT_THROW(library_scenario("no-such", StandardId::nacs), UnknownScenarioError);
}

TEST(Library, DosCcSucceedsEverywhere) {
  for (const auto id : kAllStandards) {
    EXPECT_TRUE(run_scenario(library_scenario("dos-cc", id), 0).passed) << to_string(id);
  }
}

TEST(Library, DeadlockFailsOnlyWithoutLock) {
  for (const auto id : kAllStandards) {
    const auto run = run_scenario(library_scenario("deadlock", id), 0);
    EXPECT_EQ(run.passed, profile_of(id).has_lock) << to_string(id);
    EXPECT_EQ(run.outcome.gun_removable, !profile_of(id).has_lock);
  }
}

TEST(Library, CanOverheatOnNacs) {
  const auto run = run_scenario(library_scenario("can-overheat", StandardId::nacs), 0);
  EXPECT_TRUE(run.passed);
  EXPECT_GE(run.outcome.bms_temp_c, 56.0);
}

TEST(Library, CanOverheatBlockedWithoutCanLines) {
  const auto run = run_scenario(library_scenario("can-overheat", StandardId::sae_j1772), 0);
  EXPECT_FALSE(run.passed);
  EXPECT_FALSE(run.outcome.bms_compromised);
}

TEST(Library, RemainingScenariosPassEverywhere) {
  for (const auto* name : {"nominal", "dos-cp", "pwm-injection", "bms-baseline", "thermal-cutoff",
                           "countermeasure-spoof", "lid-replay"}) {
    for (const auto id : kAllStandards) {
      const auto run = run_scenario(library_scenario(name, id), 0);
      EXPECT_TRUE(run.passed) << name << " on " << to_string(id);
    }
  }
}

TEST(Predicates, ReportFailures) {
  SessionOutcome o;
  o.final_evse = EvseState::halted(HaltReason::cc_fault);
  o.first_attack_ms = 1000;
  o.halted_at_ms = 1200;
  Expectations e;
  e.final_evse = "Halted(CcFault)";
  e.halted_within_ms = 100;
  e.gun_removable = false;
  const auto results = check(e, o);
  ASSERT_EQ(results.size(), 3u);
  EXPECT_TRUE(results[0].pass);
  EXPECT_FALSE(results[1].pass);  // gun_removable defaults to true
  EXPECT_FALSE(results[2].pass);  // 200 ms
}

TEST(ScenarioJson, RoundTripPreservesBehaviour) {
  for (const auto& name : scenario_names()) {
    const auto sc = library_scenario(name, StandardId::nacs);
    const auto back = scenario_from_json(scenario_to_json(sc));
    EXPECT_EQ(back.script, sc.script) << name;
    EXPECT_EQ(back.can_payloads, sc.can_payloads) << name;
    EXPECT_EQ(back.recorded_burst, sc.recorded_burst) << name;
    EXPECT_EQ(scenario_to_json(back), scenario_to_json(sc)) << name;
  }
}

TEST(ScenarioJson, Malformed) {
  EXPECT_THROW(scenario_from_json("not json"), MalformedInputError);
  EXPECT_THROW(scenario_from_json("[]"), MalformedInputError);
  EXPECT_THROW(scenario_from_json(R"({"name":"x","standard":"mars","script":[]})"), MalformedInputError);
  EXPECT_THROW(scenario_from_json(R"({"name":"x","standard":"nacs","script":[{"t":0,"kind":"fly"}]})"),
               MalformedInputError);
  EXPECT_THROW(
      scenario_from_json(R"({"name":"x","standard":"nacs","script":[{"t":0,"kind":"attacker_cmd","frame":"01"}]})"),
      MalformedInputError);
  EXPECT_THROW(scenario_from_json(R"({"name":"x","standard":"nacs","script":[],"recorded_burst":"00"})"),
               MalformedInputError);
  EXPECT_THROW(scenario_from_json(R"({"name":"x","standard":"nacs","script":[],"can_payloads":[["zz"]]})"),
               MalformedInputError);
}

TEST(ScenarioFiles, ShippedScenariosParseAndPass) {
  const std::filesystem::path dir = std::filesystem::path(EVSIM_TEST_DATA_DIR) / ".." / ".." / "scenarios";
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    std::stringstream ss;
    ss << in.rdbuf();
    const auto sc = scenario_from_json(ss.str());
    EXPECT_TRUE(run_scenario(sc, 0).passed) << entry.path();
    ++seen;
  }
  EXPECT_GT(seen, 0);
}

// ---------------------------------------------------------------------------
// Reports

TEST(Table1, AllCellsPass) {
  const auto report = verify_table1();
  ASSERT_EQ(report.cells.size(), 14u);
  EXPECT_TRUE(report.all_passed()) << render(report);
  for (const auto& c : report.cells) {
    // Oracle: plain relative deviation, unrounded.
    if (c.expected > 0) {
      EXPECT_NEAR((c.real - c.expected) / c.expected * 100.0, c.printed_deviation, 0.1);
    }
  }
}

TEST(Table1, GbtDcUnpressedUsesSwitchPath) {
  const auto report = verify_table1();
  const auto& cell = report.cells[12];
  EXPECT_EQ(cell.standard, StandardId::gbt_20234_3);
  EXPECT_FALSE(cell.pressed);
  EXPECT_EQ(cell.achieved, 0.0);
  EXPECT_EQ(cell.computed_deviation, 0.0);
}

TEST(Matrix, MatchesReferenceGrid) {
  const auto serial = matrix(false);
  EXPECT_TRUE(serial.matches_expected) << render(serial);
  const auto par = matrix(true);
  EXPECT_EQ(par.grid, serial.grid);
  // Column totals.
  int dos = 0, deadlock = 0, pwm = 0, can = 0;
  for (const auto& row : serial.grid) {
    dos += row[0];
    deadlock += row[1];
    pwm += row[2];
    can += row[3];
  }
  EXPECT_EQ(dos, 7);
  EXPECT_EQ(deadlock, 6);
  EXPECT_EQ(pwm, 7);
  EXPECT_EQ(can, 2);
  EXPECT_FALSE(serial.grid[3][1]);  // CCS II deadlock
  EXPECT_FALSE(serial.grid[0][3]);  // SAE J1772 CAN
}

TEST(Countermeasure, EvaluationRates) {
  const auto r = eval_countermeasure(100, 1);
  EXPECT_EQ(r.spoof_cases, 100 * 7 * 2 * 2);
  EXPECT_EQ(r.spoof_detected, r.spoof_cases);
  EXPECT_EQ(r.false_positives, 0);
  EXPECT_EQ(r.legacy_rejected, r.legacy_cases);
  EXPECT_THROW(eval_countermeasure(0, 1), InputError);
}
