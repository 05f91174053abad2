#include "evsim/reports.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <random>
#include <sstream>

#include "evsim/error.hpp"

namespace evsim {

namespace {

std::string printf_str(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

Table1Cell make_cell(StandardId id, bool pressed) {
  const auto& p = profile_of(id);
  const auto& m = measured_cc_of(id);
  Table1Cell c{};
  c.standard = id;
  c.pressed = pressed;
  c.expected = pressed ? p.pressed_ohm : p.unpressed_ohm;
  c.real = pressed ? m.pressed_real : m.unpressed_real;
  c.printed_deviation = pressed ? m.pressed_printed_deviation : m.unpressed_printed_deviation;
  c.computed_deviation = deviation_percent(c.expected, c.real);

  ProgrammableResistor pot;
  c.achieved = c.real == 0.0 ? 0.0 : pot.set_cc(c.real);
  c.achieved_class = classify_cc(c.achieved, p);
  const CcClass intended = pressed ? CcClass::connected_pressed : CcClass::connected_unpressed;
  c.pass = std::abs(c.computed_deviation - c.printed_deviation) <= 0.1 + 1e-9 &&
           c.achieved_class == intended;
  return c;
}

}  // namespace

Table1Report verify_table1() {
  Table1Report r;
  for (const auto id : kAllStandards) {
    for (const bool pressed : {false, true}) {
      r.cells.push_back(make_cell(id, pressed));
      if (r.cells.back().pass) ++r.passed;
    }
  }
  return r;
}

std::string render(const Table1Report& r) {
  std::ostringstream out;
  out << printf_str("%-14s %-9s %9s %9s %8s %8s %9s  %-20s %s\n", "standard", "button", "expected",
                    "real", "printed", "computed", "achieved", "achieved class", "result");
  for (const auto& c : r.cells) {
    out << printf_str("%-14s %-9s %9.1f %9.1f %+8.1f %+8.1f %9.2f  %-20s %s\n",
                      std::string(to_string(c.standard)).c_str(), c.pressed ? "pressed" : "unpressed",
                      c.expected, c.real, c.printed_deviation, c.computed_deviation, c.achieved,
                      std::string(to_string(c.achieved_class)).c_str(), c.pass ? "PASS" : "FAIL");
  }
  out << r.passed << "/" << r.cells.size() << " cells pass\n";
  return out.str();
}

// ---------------------------------------------------------------------------

std::string_view to_string(AttackFamily f) {
  switch (f) {
    case AttackFamily::dos: return "DoS";
    case AttackFamily::deadlock: return "Deadlock";
    case AttackFamily::pwm_injection: return "PWM injection";
    case AttackFamily::can_injection: return "CAN injection";
  }
  return "?";
}

std::string_view scenario_for(AttackFamily f) {
  switch (f) {
    case AttackFamily::dos: return "dos-cc";
    case AttackFamily::deadlock: return "deadlock";
    case AttackFamily::pwm_injection: return "pwm-injection";
    case AttackFamily::can_injection: return "can-overheat";
  }
  return "?";
}

const AttackGrid& expected_attack_grid() {
  //                         DoS   Deadlock PWM   CAN
  static const AttackGrid grid = {{
      {true, true, true, false},    // SAE J1772
      {true, true, true, false},    // CCS I
      {true, true, true, false},    // IEC 61851
      {true, false, true, false},   // CCS II
      {true, true, true, true},     // NACS
      {true, true, true, false},    // GB/T 20234.2
      {true, true, true, true},     // GB/T 20234.3
  }};
  return grid;
}

MatrixReport matrix(bool parallel) {
  MatrixReport r;
  auto cell = [](StandardId id, AttackFamily f) {
    return run_scenario(library_scenario(scenario_for(f), id), 0).passed;
  };
  if (parallel) {
    std::vector<std::future<bool>> jobs;
    for (const auto id : kAllStandards) {
      for (const auto f : kAllFamilies) jobs.push_back(std::async(std::launch::async, cell, id, f));
    }
    std::size_t k = 0;
    for (std::size_t s = 0; s < kAllStandards.size(); ++s) {
      for (std::size_t f = 0; f < kAllFamilies.size(); ++f) r.grid[s][f] = jobs[k++].get();
    }
  } else {
    for (std::size_t s = 0; s < kAllStandards.size(); ++s) {
      for (std::size_t f = 0; f < kAllFamilies.size(); ++f) {
        r.grid[s][f] = cell(kAllStandards[s], kAllFamilies[f]);
      }
    }
  }
  r.matches_expected = r.grid == expected_attack_grid();
  return r;
}

std::string render(const MatrixReport& r) {
  std::ostringstream out;
  out << printf_str("%-14s", "standard");
  for (const auto f : kAllFamilies) out << printf_str(" %-14s", std::string(to_string(f)).c_str());
  out << "\n";
  const auto& want = expected_attack_grid();
  for (std::size_t s = 0; s < kAllStandards.size(); ++s) {
    out << printf_str("%-14s", std::string(to_string(kAllStandards[s])).c_str());
    for (std::size_t f = 0; f < kAllFamilies.size(); ++f) {
      std::string mark = r.grid[s][f] ? "✓" : "✗";
      if (r.grid[s][f] != want[s][f]) mark += " (mismatch)";
      out << " " << mark << std::string(mark.size() > 3 ? 1 : 13, ' ');
    }
    out << "\n";
  }
  out << (r.matches_expected ? "grid matches reference\n" : "grid differs from reference\n");
  return out.str();
}

// ---------------------------------------------------------------------------

CountermeasureReport eval_countermeasure(int trials, std::uint64_t seed) {
  if (trials < 1) throw InputError("trials must be >= 1");
  CountermeasureReport r;
  r.trials = trials;
  r.seed = seed;
  std::mt19937_64 rng(seed);
  const double log_lo = std::log(10.0);
  const double log_hi = std::log(10000.0);

  for (int t = 0; t < trials; ++t) {
    const std::uint64_t probe_seed = rng();
    const auto probes = choose_probe_freqs(probe_seed, 4);
    for (const auto id : kAllStandards) {
      for (const bool pressed : {false, true}) {
        const auto sig = make_signature(id, pressed, probes);

        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const Ohms random_r = std::exp(log_lo + (log_hi - log_lo) * u);
        for (const auto& spoof : {resistor(random_r), resistor(sig.expected_magnitude.front())}) {
          ++r.spoof_cases;
          if (dual_check(spoof, sig).is_spoofed()) ++r.spoof_detected;
        }

        ++r.reference_cases;
        if (!dual_check(reference_gun(id, pressed), sig).is_legit()) ++r.false_positives;

        ++r.legacy_cases;
        if (!dual_check(legacy_gun(id, pressed), sig).is_legit()) ++r.legacy_rejected;
      }
    }
  }
  return r;
}

std::string render(const CountermeasureReport& r) {
  std::ostringstream out;
  out << printf_str("trials: %d  seed: %llu\n", r.trials, static_cast<unsigned long long>(r.seed));
  out << printf_str("resistive spoofers detected: %ld/%ld (%.2f%%)\n", r.spoof_detected, r.spoof_cases,
                    100.0 * r.detection_rate());
  out << printf_str("reference guns flagged:      %ld/%ld (%.2f%%)\n", r.false_positives,
                    r.reference_cases, 100.0 * r.false_positive_rate());
  out << printf_str("legacy guns rejected:        %ld/%ld\n", r.legacy_rejected, r.legacy_cases);
  return out.str();
}

}  // namespace evsim
