#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "evsim/scenario.hpp"

namespace evsim {

// ---------------------------------------------------------------------------
// Spoofed CC values against the measured reference readings.

struct Table1Cell {
  StandardId standard;
  bool pressed;
  Ohms expected;
  Ohms real;                 // measured reading the deviation is computed from
  Percent printed_deviation;
  Percent computed_deviation;
  Ohms achieved;             // what the implant produces for set_cc(real)
  CcClass achieved_class;
  bool pass;                 // deviation within 0.1 pp and achieved value classified as intended
};

struct Table1Report {
  std::vector<Table1Cell> cells;
  int passed = 0;
  bool all_passed() const { return passed == static_cast<int>(cells.size()); }
};

Table1Report verify_table1();
std::string render(const Table1Report& report);

// ---------------------------------------------------------------------------
// Attack families across standards.

enum class AttackFamily { dos, deadlock, pwm_injection, can_injection };
inline constexpr std::array<AttackFamily, 4> kAllFamilies = {
    AttackFamily::dos, AttackFamily::deadlock, AttackFamily::pwm_injection,
    AttackFamily::can_injection};
std::string_view to_string(AttackFamily f);
// Library scenario that decides a family's cell.
std::string_view scenario_for(AttackFamily f);

using AttackGrid = std::array<std::array<bool, 4>, 7>;  // [standard][family]

// Reference grid of attack outcomes per standard.
const AttackGrid& expected_attack_grid();

struct MatrixReport {
  AttackGrid grid{};
  bool matches_expected = false;
};

// Runs every (family, standard) scenario, in parallel when asked.
MatrixReport matrix(bool parallel = true);
std::string render(const MatrixReport& report);

// ---------------------------------------------------------------------------
// Countermeasure evaluation.

struct CountermeasureReport {
  int trials = 0;
  std::uint64_t seed = 0;
  long spoof_cases = 0;
  long spoof_detected = 0;
  long reference_cases = 0;
  long false_positives = 0;
  long legacy_cases = 0;
  long legacy_rejected = 0;

  double detection_rate() const { return spoof_cases ? double(spoof_detected) / spoof_cases : 0.0; }
  double false_positive_rate() const {
    return reference_cases ? double(false_positives) / reference_cases : 0.0;
  }
};

// Per trial, standard and button state: fresh probes from the trial seed, one
// random log-uniform resistor and one resistor matching the DC expectation
// (both must be Spoofed), the reference gun (must be Legit), and the legacy
// gun (tallied separately). Throws InputError for trials < 1.
CountermeasureReport eval_countermeasure(int trials, std::uint64_t seed);
std::string render(const CountermeasureReport& report);

}  // namespace evsim
