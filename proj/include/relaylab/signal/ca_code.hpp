#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "relaylab/constants.hpp"

namespace relaylab::signal {

/// 1023-chip C/A Gold code, chips mapped binary 0 -> +1, binary 1 -> -1.
struct PrnCode {
  int prn_id = 0;
  std::array<std::int8_t, kCodeLength> chips{};
};

inline constexpr int kMaxPrn = 32;

/// Generates the code from the G1/G2 shift registers with the per-PRN G2
/// phase-selector taps. Throws DomainError for prn_id outside 1..32.
PrnCode generate_ca_code(int prn_id);

/// Process-wide immutable table of all 32 codes (built once, thread-safe).
const PrnCode& ca_code(int prn_id);

/// sum_i a[i] * b[(i + lag) mod 1023]
int circular_correlation(std::span<const std::int8_t, kCodeLength> a,
                         std::span<const std::int8_t, kCodeLength> b, int lag);

}  // namespace relaylab::signal
