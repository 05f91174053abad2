#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evsim/circuit.hpp"

namespace evsim {

// ---------------------------------------------------------------------------
// 433 MHz command frames: [opcode][arg hi][arg lo][opcode ^ arg hi ^ arg lo]

enum class Opcode : std::uint8_t {
  disarm = 0x00,
  set_cc_resistance = 0x01,
  set_cp_duty = 0x02,
  trigger_can_payload = 0x03,
  replay_lid_signal = 0x04,
};

std::string_view to_string(Opcode op);

inline constexpr std::uint16_t kCcOpenArg = 0xFFFF;

struct AttackCommand {
  Opcode opcode = Opcode::disarm;
  std::uint16_t arg = 0;

  std::uint8_t checksum() const;

  static AttackCommand disarm() { return {Opcode::disarm, 0}; }
  static AttackCommand set_cc(std::uint16_t ohms) { return {Opcode::set_cc_resistance, ohms}; }
  static AttackCommand set_cc_open() { return {Opcode::set_cc_resistance, kCcOpenArg}; }
  // duty in percent, carried on the wire as hundredths
  static AttackCommand set_cp_duty(Percent duty);
  static AttackCommand trigger_can(std::uint16_t payload_index) {
    return {Opcode::trigger_can_payload, payload_index};
  }
  static AttackCommand replay_lid() { return {Opcode::replay_lid_signal, 0}; }

  friend bool operator==(const AttackCommand&, const AttackCommand&) = default;
};

using CommandFrame = std::array<std::uint8_t, 4>;

CommandFrame encode_command(const AttackCommand& command);

// Throws InputError for a frame that is not exactly 4 bytes or carries an
// unknown opcode, ChecksumError when the checksum byte does not match.
AttackCommand decode_command(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);
// Accepts upper or lower case, optional whitespace between byte pairs.
std::vector<std::uint8_t> from_hex(std::string_view hex);

// ---------------------------------------------------------------------------
// Digital potentiometer emulating CC resistances.

struct PotentiometerSpec {
  Ohms full_scale = 5000.0;
  int taps = 256;
  Ohms wiper_ohm = 75.0;
};

class ProgrammableResistor {
 public:
  ProgrammableResistor() = default;
  explicit ProgrammableResistor(PotentiometerSpec spec);

  const PotentiometerSpec& spec() const { return spec_; }
  int tap() const { return tap_; }
  bool armed() const { return armed_; }

  Ohms resistance_at(int tap) const;
  Ohms resistance() const { return resistance_at(tap_); }
  Ohms ceiling() const { return spec_.wiper_ohm + spec_.full_scale; }

  // Moves the wiper to the tap closest to target and arms the device. Targets
  // below the wiper resistance saturate at tap 0. Throws UnreachableError above
  // ceiling() and InputError for negative targets.
  Ohms set_cc(Ohms target);
  void disarm() { armed_ = false; }

 private:
  PotentiometerSpec spec_{};
  int tap_ = 0;
  bool armed_ = false;
};

// ---------------------------------------------------------------------------
// Physical wiring between gun, vehicle and the implant.

struct WiringHarness {
  CircuitNetwork genuine_unpressed = open_switch();
  CircuitNetwork genuine_pressed = open_switch();
  bool plugged = false;
  bool button_pressed = false;
  // Set while the implant drives CC; nullopt when disarmed.
  std::optional<Impedance> attacker_cc_override;
  std::optional<Percent> cp_duty_override;
  bool can_tap = false;

  const CircuitNetwork& genuine_cc() const {
    return button_pressed ? genuine_pressed : genuine_unpressed;
  }
};

// What the vehicle's CC input is connected to.
CircuitNetwork effective_cc_network(const WiringHarness& w);
// DC resistance of effective_cc_network; the value classify_cc observes.
Impedance effective_cc(const WiringHarness& w);

// ---------------------------------------------------------------------------
// Charge-port lid remote: ten packets per trigger, each a 26-bit sync word and
// three 16-bit payloads separated by 3-bit guards, closed by a terminal bit
// that is 1 except in the final packet.

inline constexpr int kLidSyncBits = 26;
inline constexpr int kLidPayloadBits = 16;
inline constexpr int kLidGuardBits = 3;
inline constexpr std::uint8_t kLidGuardPattern = 0b101;
inline constexpr int kLidPacketsPerBurst = 10;
inline constexpr int kLidPacketBits =
    kLidSyncBits + 3 * kLidPayloadBits + 2 * kLidGuardBits + 1;
inline constexpr int kLidBurstBits = kLidPacketBits * kLidPacketsPerBurst;

struct LidCode {
  std::uint32_t sync = 0;  // low 26 bits
  std::array<std::uint16_t, 3> payloads{};
  friend bool operator==(const LidCode&, const LidCode&) = default;
};

struct LidPacket {
  LidCode code;
  bool terminal_bit = true;
  friend bool operator==(const LidPacket&, const LidPacket&) = default;
};

struct LidPacketBurst {
  std::array<LidPacket, kLidPacketsPerBurst> packets;
  const LidCode& code() const { return packets.front().code; }
  friend bool operator==(const LidPacketBurst&, const LidPacketBurst&) = default;
};

// One element per bit, each 0 or 1, transmission order.
using Bitstream = std::vector<std::uint8_t>;

// Throws InputError if sync does not fit in 26 bits.
Bitstream encode_lid_burst(const LidCode& code);
// Throws MalformedBurstError on wrong length/packet count, guard mismatch,
// packets that differ, or a final terminal bit of 1.
LidPacketBurst decode_lid_burst(std::span<const std::uint8_t> bits);
Bitstream encode_lid_burst(const LidPacketBurst& burst);

// Hex transport for traces and scenario files: MSB-first, zero padded to a
// whole byte.
std::string lid_burst_to_hex(std::span<const std::uint8_t> bits);
// Recovers the bitstream; a byte count that does not match a ten-packet
// burst is rejected as malformed.
Bitstream lid_burst_from_hex(std::string_view hex);

}  // namespace evsim
