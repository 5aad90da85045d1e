#include "relaylab/signal/synthesis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "relaylab/errors.hpp"
#include "relaylab/signal/ca_code.hpp"
#include "relaylab/signal/random.hpp"

namespace relaylab::signal {
namespace {

constexpr std::int64_t kChipsPerBit = static_cast<std::int64_t>(kCodeLength) * kCodePeriodsPerBit;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

constexpr std::size_t kPhasorAnchor = 1024;

}  // namespace

NavBitSource NavBitSource::seeded(std::uint64_t seed) {
  NavBitSource s;
  s.kind_ = Kind::Seeded;
  s.seed_ = seed;
  return s;
}

NavBitSource NavBitSource::explicit_bits(std::vector<std::int8_t> bits, std::int64_t first_index) {
  for (const auto b : bits) {
    if (b != 1 && b != -1) throw DomainError("NavBitSource: bits must be +1 or -1");
  }
  NavBitSource s;
  s.kind_ = Kind::Explicit;
  s.bits_ = std::make_shared<const std::vector<std::int8_t>>(std::move(bits));
  s.first_index_ = first_index;
  return s;
}

int NavBitSource::bit(int prn, std::int64_t index) const {
  switch (kind_) {
    case Kind::Constant:
      return 1;
    case Kind::Seeded: {
      const std::uint64_t h = mix64(mix64(seed_ ^ (static_cast<std::uint64_t>(prn) << 56)) +
                                    static_cast<std::uint64_t>(index));
      return (h >> 63) ? -1 : 1;
    }
    case Kind::Explicit: {
      const std::int64_t i = index - first_index_;
      if (i < 0 || i >= static_cast<std::int64_t>(bits_->size())) return 1;
      return (*bits_)[static_cast<std::size_t>(i)];
    }
  }
  return 1;
}

void SatelliteSignalSpec::validate() const {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw DomainError("SatelliteSignalSpec: amplitude must be >= 0");
  }
  if (!(code_phase_offset >= 0.0 && code_phase_offset < kCodeLength)) {
    throw DomainError("SatelliteSignalSpec: code_phase_offset must lie in [0, 1023)");
  }
  if (!std::isfinite(doppler_hz) || !std::isfinite(carrier_phase) || !(carrier_hz > 0.0)) {
    throw DomainError("SatelliteSignalSpec: non-finite Doppler/phase/carrier");
  }
  if (prn_id < 1 || prn_id > kMaxPrn) {
    throw DomainError("SatelliteSignalSpec: prn_id " + std::to_string(prn_id) + " outside 1..32");
  }
}

void set_delay(SatelliteSignalSpec& spec, double delay_s) {
  const double chips = delay_s * kChipRate;
  const double whole = std::floor(chips / kCodeLength);
  spec.whole_periods = static_cast<std::int64_t>(whole);
  spec.code_phase_offset = chips - whole * kCodeLength;
  if (spec.code_phase_offset >= kCodeLength) {  // rounding at the boundary
    spec.code_phase_offset -= kCodeLength;
    ++spec.whole_periods;
  }
  if (spec.code_phase_offset < 0.0) spec.code_phase_offset = 0.0;
}

void synthesize_into(IqBuffer& out, std::span<const SatelliteSignalSpec> specs) {
  const double fs = out.sample_rate;
  const std::size_t n_total = out.size();
  for (const auto& spec : specs) {
    spec.validate();
    if (spec.amplitude == 0.0) continue;
    const auto& chips = ca_code(spec.prn_id).chips;

    const double du = kChipRate * (1.0 + spec.doppler_hz / spec.carrier_hz) / fs;
    const double u0 = out.start_time * kChipRate - spec.total_delay_chips();
    const double k0 = std::floor(u0);
    double frac = u0 - k0;
    const auto k = static_cast<std::int64_t>(k0);
    auto chip = static_cast<int>(floor_mod(k, kCodeLength));
    auto period = static_cast<int>(floor_mod(floor_div(k, kCodeLength), kCodePeriodsPerBit));
    std::int64_t bit_index = floor_div(k, kChipsPerBit);
    double nav = spec.nav.bit(spec.prn_id, bit_index);

    const double w = 2.0 * std::numbers::pi * spec.doppler_hz;
    const bool rotating = spec.doppler_hz != 0.0;
    const Sample step = std::polar(1.0, w / fs);
    Sample phasor = std::polar(1.0, w * out.start_time + spec.carrier_phase);

    for (std::size_t n = 0; n < n_total; ++n) {
      if (rotating && n % kPhasorAnchor == 0) {
        phasor = std::polar(1.0, w * out.time_of(n) + spec.carrier_phase);
      }
      out.samples[n] += (spec.amplitude * chips[static_cast<std::size_t>(chip)] * nav) * phasor;
      if (rotating) phasor *= step;

      frac += du;
      while (frac >= 1.0) {
        frac -= 1.0;
        if (++chip == kCodeLength) {
          chip = 0;
          if (++period == kCodePeriodsPerBit) {
            period = 0;
            ++bit_index;
            nav = spec.nav.bit(spec.prn_id, bit_index);
          }
        }
      }
    }
  }
}

IqBuffer synthesize_baseband(std::span<const SatelliteSignalSpec> specs, double sample_rate,
                             double duration, double start_time) {
  if (!(sample_rate >= kChipRate)) {
    throw DomainError("synthesize_baseband: sample_rate below one sample per chip");
  }
  if (!(duration > 0.0)) throw DomainError("synthesize_baseband: duration must be positive");
  IqBuffer out(sample_count(duration, sample_rate), sample_rate, start_time);
  synthesize_into(out, specs);
  return out;
}

void add_awgn_inplace(IqBuffer& buffer, double noise_variance, std::uint64_t seed) {
  if (!(noise_variance >= 0.0)) throw DomainError("add_awgn: negative noise variance");
  if (noise_variance == 0.0) return;
  Rng rng(seed);
  for (auto& s : buffer.samples) s += rng.complex_gaussian(noise_variance);
}

IqBuffer add_awgn(IqBuffer buffer, double noise_variance, std::uint64_t seed) {
  add_awgn_inplace(buffer, noise_variance, seed);
  return buffer;
}

}  // namespace relaylab::signal
