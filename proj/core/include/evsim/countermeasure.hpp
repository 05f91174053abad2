#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evsim/circuit.hpp"
#include "evsim/standards.hpp"

namespace evsim {

// Memory elements added to an upgraded gun: a series resistor that shifts the
// DC reading, and a shunt capacitor that makes |Z| fall off with frequency.
inline constexpr Ohms kMemoryResistorOhm = 470.0;
inline constexpr double kMemoryCapacitorFarad = 10e-6;
inline constexpr Percent kMatchTolerancePercent = 6.0;
// Nonzero readings closer than this are considered frequency-flat.
inline constexpr Percent kFlatResponsePercent = 1.0;

// Upgraded CC circuit: (legacy CC resistor + 470 ohm) shunted by 10 uF.
CircuitNetwork reference_gun(StandardId standard, bool pressed);
CircuitNetwork legacy_gun(StandardId standard, bool pressed);

struct ReferenceSignature {
  StandardId standard = StandardId::sae_j1772;
  bool pressed = false;
  std::vector<Hertz> probe_freqs;
  std::vector<Ohms> expected_magnitude;
  Percent match_tolerance_percent = kMatchTolerancePercent;

  // Probe set contains 0 Hz, at least two nonzero frequencies, matching
  // expectation sizes, and two nonzero probes whose expectations differ by
  // more than twice the tolerance.
  bool valid() const;
  bool frequency_sensitive() const;
};

// Signature of reference_gun(standard, pressed) over the given probes.
ReferenceSignature make_signature(StandardId standard, bool pressed, std::vector<Hertz> probes);

enum class SpoofReason { flat_response, static_mismatch, dynamic_mismatch };
std::string_view to_string(SpoofReason r);

struct Verdict {
  enum class Kind { legit, spoofed, inconclusive };
  Kind kind = Kind::inconclusive;
  std::optional<SpoofReason> reason;

  static Verdict legit() { return {Kind::legit, std::nullopt}; }
  static Verdict spoofed(SpoofReason r) { return {Kind::spoofed, r}; }
  static Verdict inconclusive() { return {Kind::inconclusive, std::nullopt}; }

  bool is_legit() const { return kind == Kind::legit; }
  bool is_spoofed() const { return kind == Kind::spoofed; }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

std::string to_string(const Verdict& v);

// Static check at 0 Hz, then the flat-response test, then every nonzero probe
// against its expectation. A signature that fails valid() yields Inconclusive.
Verdict dual_check(const CircuitNetwork& observed, const ReferenceSignature& sig);

inline constexpr Hertz kMinProbeHz = 500.0;
inline constexpr Hertz kMaxProbeHz = 50000.0;
inline constexpr double kMinProbeRatio = 1.2;
inline constexpr int kMaxProbeCount = 8;

// 0 Hz followed by count-1 log-uniform draws from [500 Hz, 50 kHz], sorted and
// pairwise at least a factor 1.2 apart. Same seed, same list. Throws
// InputError for count < 3 or count > kMaxProbeCount.
std::vector<Hertz> choose_probe_freqs(std::uint64_t seed, int count);

std::string signature_to_json(const ReferenceSignature& sig);
// Throws MalformedInputError on parse or schema errors.
ReferenceSignature signature_from_json(std::string_view text);

}  // namespace evsim
