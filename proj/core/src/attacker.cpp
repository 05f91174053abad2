#include "evsim/attacker.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "evsim/error.hpp"

namespace evsim {

std::string_view to_string(Opcode op) {
  switch (op) {
    case Opcode::disarm: return "disarm";
    case Opcode::set_cc_resistance: return "set-cc-resistance";
    case Opcode::set_cp_duty: return "set-cp-duty";
    case Opcode::trigger_can_payload: return "trigger-can-payload";
    case Opcode::replay_lid_signal: return "replay-lid-signal";
  }
  return "?";
}

std::uint8_t AttackCommand::checksum() const {
  return static_cast<std::uint8_t>(static_cast<std::uint8_t>(opcode) ^ (arg >> 8) ^ (arg & 0xFF));
}

AttackCommand AttackCommand::set_cp_duty(Percent duty) {
  if (!std::isfinite(duty) || duty < 0.0 || duty > 100.0) {
    throw InputError("duty must lie in [0, 100]");
  }
  return {Opcode::set_cp_duty, static_cast<std::uint16_t>(std::lround(duty * 100.0))};
}

CommandFrame encode_command(const AttackCommand& command) {
  return {static_cast<std::uint8_t>(command.opcode), static_cast<std::uint8_t>(command.arg >> 8),
          static_cast<std::uint8_t>(command.arg & 0xFF), command.checksum()};
}

AttackCommand decode_command(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != 4) throw InputError("command frame must be exactly 4 bytes");
  if (bytes[0] > static_cast<std::uint8_t>(Opcode::replay_lid_signal)) {
    throw InputError("unknown opcode " + to_hex(bytes.first(1)));
  }
  AttackCommand command{static_cast<Opcode>(bytes[0]),
                        static_cast<std::uint16_t>((bytes[1] << 8) | bytes[2])};
  if (command.checksum() != bytes[3]) {
    throw ChecksumError("command checksum mismatch in frame " + to_hex(bytes));
  }
  return command;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (const auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  std::vector<std::uint8_t> out;
  int pending = -1;
  for (const char ch : hex) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (pending >= 0) throw InputError("odd hex digit before whitespace");
      continue;
    }
    int v;
    if (ch >= '0' && ch <= '9') v = ch - '0';
    else if (ch >= 'a' && ch <= 'f') v = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F') v = ch - 'A' + 10;
    else throw InputError(std::string("invalid hex digit '") + ch + "'");
    if (pending < 0) {
      pending = v;
    } else {
      out.push_back(static_cast<std::uint8_t>(pending << 4 | v));
      pending = -1;
    }
  }
  if (pending >= 0) throw InputError("hex string has an odd number of digits");
  return out;
}

ProgrammableResistor::ProgrammableResistor(PotentiometerSpec spec) : spec_(spec) {
  if (!(spec_.full_scale > 0.0) || spec_.taps < 2 || spec_.wiper_ohm < 0.0) {
    throw InputError("invalid potentiometer spec");
  }
}

Ohms ProgrammableResistor::resistance_at(int tap) const {
  return spec_.wiper_ohm + tap * spec_.full_scale / spec_.taps;
}

Ohms ProgrammableResistor::set_cc(Ohms target) {
  if (!std::isfinite(target) || target < 0.0) throw InputError("target must be >= 0");
  if (target > ceiling()) {
    throw UnreachableError("target above potentiometer ceiling");
  }
  const double step = spec_.full_scale / spec_.taps;
  const long nearest = std::lround((target - spec_.wiper_ohm) / step);
  tap_ = static_cast<int>(std::clamp<long>(nearest, 0, spec_.taps - 1));
  armed_ = true;
  return resistance();
}

CircuitNetwork effective_cc_network(const WiringHarness& w) {
  if (!w.plugged) return open_switch();
  if (w.attacker_cc_override) {
    const auto& z = *w.attacker_cc_override;
    if (z.is_infinite()) return open_switch();
    if (z.is_zero()) return closed_switch();
    return resistor(z.magnitude());
  }
  return w.genuine_cc();
}

Impedance effective_cc(const WiringHarness& w) {
  return impedance_at(effective_cc_network(w), 0.0);
}

namespace {

void push_bits(Bitstream& out, std::uint32_t value, int width) {
  for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((value >> i) & 1U));
}

std::uint32_t read_bits(std::span<const std::uint8_t> bits, std::size_t& pos, int width) {
  std::uint32_t v = 0;
  for (int i = 0; i < width; ++i) v = v << 1 | bits[pos++];
  return v;
}

void append_packet(Bitstream& out, const LidPacket& packet) {
  push_bits(out, packet.code.sync, kLidSyncBits);
  for (int i = 0; i < 3; ++i) {
    if (i) push_bits(out, kLidGuardPattern, kLidGuardBits);
    push_bits(out, packet.code.payloads[i], kLidPayloadBits);
  }
  out.push_back(packet.terminal_bit ? 1 : 0);
}

}  // namespace

Bitstream encode_lid_burst(const LidCode& code) {
  if (code.sync >= (1U << kLidSyncBits)) throw InputError("sync word wider than 26 bits");
  LidPacketBurst burst;
  for (auto& p : burst.packets) p = LidPacket{code, true};
  burst.packets.back().terminal_bit = false;
  return encode_lid_burst(burst);
}

Bitstream encode_lid_burst(const LidPacketBurst& burst) {
  Bitstream out;
  out.reserve(kLidBurstBits);
  for (const auto& p : burst.packets) append_packet(out, p);
  return out;
}

LidPacketBurst decode_lid_burst(std::span<const std::uint8_t> bits) {
  if (bits.size() % kLidPacketBits != 0) {
    throw MalformedBurstError("burst length is not a whole number of packets");
  }
  if (bits.size() != static_cast<std::size_t>(kLidBurstBits)) {
    throw MalformedBurstError("burst carries " + std::to_string(bits.size() / kLidPacketBits) +
                              " packets, expected 10");
  }
  for (const auto b : bits) {
    if (b > 1) throw MalformedBurstError("bitstream element is not 0 or 1");
  }
  LidPacketBurst burst;
  std::size_t pos = 0;
  for (auto& packet : burst.packets) {
    packet.code.sync = read_bits(bits, pos, kLidSyncBits);
    for (int i = 0; i < 3; ++i) {
      if (i && read_bits(bits, pos, kLidGuardBits) != kLidGuardPattern) {
        throw MalformedBurstError("guard mismatch");
      }
      packet.code.payloads[i] = static_cast<std::uint16_t>(read_bits(bits, pos, kLidPayloadBits));
    }
    packet.terminal_bit = bits[pos++] != 0;
  }
  for (std::size_t i = 0; i + 1 < burst.packets.size(); ++i) {
    if (!burst.packets[i].terminal_bit) {
      throw MalformedBurstError("terminal bit 0 before the final packet");
    }
    if (burst.packets[i].code != burst.packets.back().code) {
      throw MalformedBurstError("packets in the burst are not identical");
    }
  }
  if (burst.packets.back().terminal_bit) {
    throw MalformedBurstError("final packet terminal bit is 1");
  }
  return burst;
}

std::string lid_burst_to_hex(std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
  }
  return to_hex(bytes);
}

Bitstream lid_burst_from_hex(std::string_view hex) {
  const auto bytes = from_hex(hex);
  const std::size_t packets = bytes.size() * 8 / kLidPacketBits;
  const std::size_t expected_bytes = (packets * kLidPacketBits + 7) / 8;
  if (bytes.size() != expected_bytes) {
    throw MalformedBurstError("hex length does not encode a whole number of packets");
  }
  Bitstream bits;
  bits.reserve(bytes.size() * 8);
  for (const auto b : bytes) push_bits(bits, b, 8);
  const std::size_t used = packets * kLidPacketBits;
  for (std::size_t i = used; i < bits.size(); ++i) {
    if (bits[i]) throw MalformedBurstError("nonzero padding after the last packet");
  }
  bits.resize(used);
  return bits;
}

}  // namespace evsim
