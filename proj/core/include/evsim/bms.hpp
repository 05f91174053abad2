#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evsim {

struct CanFrame {
  std::uint16_t id = 0;  // 11-bit
  std::uint8_t dlc = 0;
  std::array<std::uint8_t, 8> data{};

  // Throws InputError for id > 0x7FF or more than 8 bytes.
  static CanFrame make(std::uint16_t id, std::span<const std::uint8_t> payload);
  std::span<const std::uint8_t> payload() const { return {data.data(), dlc}; }

  friend bool operator==(const CanFrame&, const CanFrame&) = default;
};

// candump-style "7E0#10105A..."; throws InputError on malformed text.
CanFrame parse_can_frame(std::string_view text);
std::string to_string(const CanFrame& frame);

inline constexpr std::uint16_t kBmsDiagnosticId = 0x7E0;
inline constexpr std::uint8_t kFirstFrame = 0x10;
inline constexpr std::uint8_t kFirstConsecutive = 0x21;
inline constexpr std::uint8_t kLastConsecutive = 0x2F;
inline constexpr double kBmsCutoffC = 40.0;

// The parser's stack frame: an 8-byte staging buffer directly followed by the
// MOSFET override byte and the rest of the frame. Offsets past the modelled
// region are lost.
inline constexpr std::size_t kStagingSize = 8;
inline constexpr std::size_t kOverrideOffset = 8;
inline constexpr std::size_t kStackFrameSize = 16;

struct BmsState {
  double temp_c = 25.0;
  double ambient_c = 25.0;
  bool mosfet_on = true;
  std::array<std::uint8_t, kStackFrameSize> stack{};
  std::uint8_t declared_len = 0;
  std::uint8_t received_len = 0;
  bool transfer_open = false;
  std::uint8_t next_sequence = kFirstConsecutive;

  std::span<const std::uint8_t, kStagingSize> staging() const {
    return std::span<const std::uint8_t, kStagingSize>(stack.data(), kStagingSize);
  }
  std::uint8_t mosfet_override() const { return stack[kOverrideOffset]; }
  bool compromised() const { return mosfet_override() != 0; }
};

BmsState make_bms(double ambient_c);

struct ThermalParams {
  double alpha;      // degC per ampere-second
  double beta;       // 1/s
  double ambient_c;

  double equilibrium_c(double current) const { return ambient_c + alpha * current / beta; }
};

// Ambient 25 degC, beta 0.01/s, alpha chosen so 51 A settles at 56.47 degC.
ThermalParams calibrated_thermal_params();

// Multi-frame receive on id 0x7E0. A first frame [0x10, len, data...] opens a
// transfer, consecutive frames [0x21.., data...] append in sequence. Appends
// stop at the declared length but are never checked against the staging size.
BmsState bms_feed(BmsState state, const CanFrame& frame);
BmsState bms_feed(BmsState state, std::span<const CanFrame> frames);

// One explicit-Euler step of the thermal model followed by the cutoff rule.
// Throws InputError for dt <= 0.
BmsState bms_tick(BmsState state, double charging_current, double dt, const ThermalParams& p);

// Frames that write `override_value` into the override byte: a data-less first
// frame declaring 16 bytes and three consecutive frames. The override byte
// travels in the second consecutive frame.
std::vector<CanFrame> overflow_exploit(std::uint8_t override_value);

}  // namespace evsim
