#include "relaylab/signal/ca_code.hpp"

#include <string>

#include "relaylab/errors.hpp"

namespace relaylab::signal {
namespace {

// G2 phase-selector tap pairs (1-based register stages) for PRN 1..32.
constexpr std::array<std::array<int, 2>, kMaxPrn> kG2Taps = {{
    {2, 6}, {3, 7}, {4, 8}, {5, 9}, {1, 9}, {2, 10}, {1, 8}, {2, 9},
    {3, 10}, {2, 3}, {3, 4}, {5, 6}, {6, 7}, {7, 8}, {8, 9}, {9, 10},
    {1, 4}, {2, 5}, {3, 6}, {4, 7}, {5, 8}, {6, 9}, {1, 3}, {4, 6},
    {5, 7}, {6, 8}, {7, 9}, {8, 10}, {1, 6}, {2, 7}, {3, 8}, {4, 9},
}};

}  // namespace

PrnCode generate_ca_code(int prn_id) {
  if (prn_id < 1 || prn_id > kMaxPrn) {
    throw DomainError("C/A code: prn_id " + std::to_string(prn_id) + " outside 1..32");
  }
  // Bit k of the register word holds stage k+1.
  std::uint16_t g1 = 0x3FF;
  std::uint16_t g2 = 0x3FF;
  const auto [ta, tb] = kG2Taps[static_cast<std::size_t>(prn_id - 1)];

  PrnCode code;
  code.prn_id = prn_id;
  for (int i = 0; i < kCodeLength; ++i) {
    const int g1_out = (g1 >> 9) & 1;
    const int g2_out = ((g2 >> (ta - 1)) ^ (g2 >> (tb - 1))) & 1;
    code.chips[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(1 - 2 * (g1_out ^ g2_out));

    // G1 = 1 + x^3 + x^10, G2 = 1 + x^2 + x^3 + x^6 + x^8 + x^9 + x^10
    const int f1 = ((g1 >> 2) ^ (g1 >> 9)) & 1;
    const int f2 = ((g2 >> 1) ^ (g2 >> 2) ^ (g2 >> 5) ^ (g2 >> 7) ^ (g2 >> 8) ^ (g2 >> 9)) & 1;
    g1 = static_cast<std::uint16_t>(((g1 << 1) | f1) & 0x3FF);
    g2 = static_cast<std::uint16_t>(((g2 << 1) | f2) & 0x3FF);
  }
  return code;
}

const PrnCode& ca_code(int prn_id) {
  static const std::array<PrnCode, kMaxPrn> table = [] {
    std::array<PrnCode, kMaxPrn> t;
    for (int p = 1; p <= kMaxPrn; ++p) t[static_cast<std::size_t>(p - 1)] = generate_ca_code(p);
    return t;
  }();
  if (prn_id < 1 || prn_id > kMaxPrn) {
    throw DomainError("C/A code: prn_id " + std::to_string(prn_id) + " outside 1..32");
  }
  return table[static_cast<std::size_t>(prn_id - 1)];
}

int circular_correlation(std::span<const std::int8_t, kCodeLength> a,
                         std::span<const std::int8_t, kCodeLength> b, int lag) {
  lag %= kCodeLength;
  if (lag < 0) lag += kCodeLength;
  int sum = 0;
  const auto l = static_cast<std::size_t>(lag);
  const std::size_t n = kCodeLength;
  for (std::size_t i = 0; i + l < n; ++i) sum += a[i] * b[i + l];
  for (std::size_t i = n - l; i < n; ++i) sum += a[i] * b[i + l - n];
  return sum;
}

}  // namespace relaylab::signal
