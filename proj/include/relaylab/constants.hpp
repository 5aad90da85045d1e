#pragma once

#include <cstdint>
#include <string_view>

namespace relaylab {

inline constexpr double kSpeedOfLight = 299792458.0;     // m/s
inline constexpr double kChipRate = 1.023e6;             // chips/s
inline constexpr int kCodeLength = 1023;                 // chips per code period
inline constexpr double kCodePeriod = 1e-3;              // s
inline constexpr int kCodePeriodsPerBit = 20;            // 50 b/s navigation data
inline constexpr double kNavBitPeriod = kCodePeriod * kCodePeriodsPerBit;
inline constexpr double kL1CarrierHz = 1575.42e6;
inline constexpr double kL2CarrierHz = 1227.60e6;

// One code period at the default stream rate is exactly 1024 samples, so the
// sample grid drifts through the chip grid and sub-chip code phase stays
// observable.
inline constexpr double kDefaultSampleRate = 1.024e6;

enum class Band : std::uint8_t { L1, L2 };

inline constexpr double carrier_hz(Band b) { return b == Band::L1 ? kL1CarrierHz : kL2CarrierHz; }

inline constexpr std::string_view to_string(Band b) { return b == Band::L1 ? "L1" : "L2"; }

}  // namespace relaylab
