#include "evsim/countermeasure.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "evsim/error.hpp"

namespace evsim {

CircuitNetwork legacy_gun(StandardId standard, bool pressed) {
  return legacy_gun_cc(profile_of(standard), pressed);
}

CircuitNetwork reference_gun(StandardId standard, bool pressed) {
  return parallel({series({legacy_gun(standard, pressed), resistor(kMemoryResistorOhm)}),
                   capacitor(kMemoryCapacitorFarad)});
}

namespace {

bool deviates(Ohms observed, Ohms expected, Percent tolerance) {
  return std::abs(observed - expected) / std::max(expected, 1.0) > tolerance / 100.0;
}

}  // namespace

bool ReferenceSignature::frequency_sensitive() const {
  const double spread = 2.0 * match_tolerance_percent / 100.0;
  for (std::size_t i = 0; i < probe_freqs.size(); ++i) {
    for (std::size_t j = i + 1; j < probe_freqs.size(); ++j) {
      if (probe_freqs[i] == 0.0 || probe_freqs[j] == 0.0) continue;
      const double a = expected_magnitude[i];
      const double b = expected_magnitude[j];
      if (std::abs(a - b) / std::max(a, b) > spread) return true;
    }
  }
  return false;
}

bool ReferenceSignature::valid() const {
  if (probe_freqs.size() != expected_magnitude.size()) return false;
  if (!(match_tolerance_percent > 0.0)) return false;
  if (std::count(probe_freqs.begin(), probe_freqs.end(), 0.0) != 1) return false;
  for (std::size_t i = 0; i < probe_freqs.size(); ++i) {
    if (!std::isfinite(probe_freqs[i]) || probe_freqs[i] < 0.0) return false;
    if (!std::isfinite(expected_magnitude[i]) || expected_magnitude[i] < 0.0) return false;
  }
  if (probe_freqs.size() < 3) return false;
  return frequency_sensitive();
}

ReferenceSignature make_signature(StandardId standard, bool pressed, std::vector<Hertz> probes) {
  ReferenceSignature sig;
  sig.standard = standard;
  sig.pressed = pressed;
  const auto gun = reference_gun(standard, pressed);
  for (const Hertz f : probes) sig.expected_magnitude.push_back(impedance_at(gun, f).magnitude());
  sig.probe_freqs = std::move(probes);
  return sig;
}

std::string_view to_string(SpoofReason r) {
  switch (r) {
    case SpoofReason::flat_response: return "flat-response";
    case SpoofReason::static_mismatch: return "static-mismatch";
    case SpoofReason::dynamic_mismatch: return "dynamic-mismatch";
  }
  return "?";
}

std::string to_string(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::legit: return "legit";
    case Verdict::Kind::inconclusive: return "inconclusive";
    case Verdict::Kind::spoofed: return "spoofed(" + std::string(to_string(*v.reason)) + ")";
  }
  return "?";
}

Verdict dual_check(const CircuitNetwork& observed, const ReferenceSignature& sig) {
  if (!sig.valid()) return Verdict::inconclusive();
  const Percent tol = sig.match_tolerance_percent;

  std::vector<Impedance> readings;
  readings.reserve(sig.probe_freqs.size());
  for (const Hertz f : sig.probe_freqs) readings.push_back(impedance_at(observed, f));

  for (std::size_t i = 0; i < readings.size(); ++i) {
    if (sig.probe_freqs[i] != 0.0) continue;
    if (readings[i].is_infinite() || deviates(readings[i].magnitude(), sig.expected_magnitude[i], tol)) {
      return Verdict::spoofed(SpoofReason::static_mismatch);
    }
  }

  double lo = INFINITY;
  double hi = 0.0;
  bool dynamic_open = false;
  for (std::size_t i = 0; i < readings.size(); ++i) {
    if (sig.probe_freqs[i] == 0.0) continue;
    if (readings[i].is_infinite()) {
      dynamic_open = true;
      continue;
    }
    lo = std::min(lo, readings[i].magnitude());
    hi = std::max(hi, readings[i].magnitude());
  }
  const bool flat = !dynamic_open && hi - lo <= kFlatResponsePercent / 100.0 * hi;
  if (flat && sig.frequency_sensitive()) return Verdict::spoofed(SpoofReason::flat_response);

  for (std::size_t i = 0; i < readings.size(); ++i) {
    if (sig.probe_freqs[i] == 0.0) continue;
    if (readings[i].is_infinite() || deviates(readings[i].magnitude(), sig.expected_magnitude[i], tol)) {
      return Verdict::spoofed(SpoofReason::dynamic_mismatch);
    }
  }
  return Verdict::legit();
}

namespace {

// mt19937_64 output is fixed by the standard; the mapping to [0, 1) is done
// here because std::uniform_real_distribution is implementation-defined.
double unit_interval(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<Hertz> choose_probe_freqs(std::uint64_t seed, int count) {
  if (count < 3) throw InputError("need at least three probe frequencies");
  if (count > kMaxProbeCount) throw InputError("too many probe frequencies requested");

  std::mt19937_64 rng(seed);
  const double log_lo = std::log(kMinProbeHz);
  const double log_hi = std::log(kMaxProbeHz);
  std::vector<Hertz> picked;
  while (static_cast<int>(picked.size()) < count - 1) {
    const Hertz f = std::exp(log_lo + (log_hi - log_lo) * unit_interval(rng));
    const bool separated = std::all_of(picked.begin(), picked.end(), [f](Hertz g) {
      return std::max(f, g) / std::min(f, g) >= kMinProbeRatio;
    });
    if (separated) picked.push_back(f);
  }
  std::sort(picked.begin(), picked.end());
  picked.insert(picked.begin(), 0.0);
  return picked;
}

std::string signature_to_json(const ReferenceSignature& sig) {
  nlohmann::ordered_json doc;
  doc["standard"] = to_string(sig.standard);
  doc["pressed"] = sig.pressed;
  doc["probe_freqs"] = sig.probe_freqs;
  doc["expected_magnitude"] = sig.expected_magnitude;
  doc["match_tolerance_percent"] = sig.match_tolerance_percent;
  return doc.dump(2) + "\n";
}

ReferenceSignature signature_from_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    ReferenceSignature sig;
    const auto name = doc.at("standard").get<std::string>();
    const auto id = parse_standard(name);
    if (!id) throw MalformedInputError("unknown standard '" + name + "'");
    sig.standard = *id;
    sig.pressed = doc.value("pressed", false);
    sig.probe_freqs = doc.at("probe_freqs").get<std::vector<double>>();
    sig.expected_magnitude = doc.at("expected_magnitude").get<std::vector<double>>();
    sig.match_tolerance_percent = doc.value("match_tolerance_percent", kMatchTolerancePercent);
    if (!sig.valid()) throw MalformedInputError("signature fails validation");
    return sig;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInputError(std::string("signature JSON: ") + e.what());
  }
}

}  // namespace evsim
