#include "relaylab/receiver/pseudorange.hpp"

#include <bit>
#include <cmath>

namespace relaylab::receiver {
namespace {

int differential(const std::complex<double>& cur, const std::complex<double>& prev) {
  return (cur * std::conj(prev)).real() < 0.0 ? -1 : 1;
}

}  // namespace

bool resolve_transmit_time(TrackingChannel& ch, const signal::NavBitSource& nav, double local_time,
                           double search_window, int window_bits) {
  if (ch.time_resolved) return true;
  if (window_bits < 2 || static_cast<int>(ch.bits.size()) < window_bits) return false;
  const std::size_t first = ch.bits.size() - static_cast<std::size_t>(window_bits);
  std::vector<int> diffs;
  diffs.reserve(static_cast<std::size_t>(window_bits - 1));
  for (std::size_t i = first + 1; i < ch.bits.size(); ++i) {
    if (ch.bits[i].start_epoch - ch.bits[i - 1].start_epoch != kCodePeriodsPerBit) return false;
    diffs.push_back(differential(ch.bits[i].value, ch.bits[i - 1].value));
  }

  const auto lo = static_cast<std::int64_t>(std::floor((local_time - search_window) / kNavBitPeriod)) - window_bits;
  const auto hi = static_cast<std::int64_t>(std::ceil((local_time + 1.0) / kNavBitPeriod));
  int matches = 0;
  std::int64_t found = 0;
  for (std::int64_t m = lo; m <= hi && matches < 2; ++m) {
    bool ok = true;
    int prev = nav.bit(ch.prn_id, m);
    for (std::size_t i = 0; i < diffs.size(); ++i) {
      const int cur = nav.bit(ch.prn_id, m + 1 + static_cast<std::int64_t>(i));
      if (cur * prev != diffs[i]) {
        ok = false;
        break;
      }
      prev = cur;
    }
    if (ok) {
      ++matches;
      found = m;
    }
  }
  if (matches != 1) return false;
  ch.time_resolved = true;
  ch.ref_epoch = ch.bits[first].start_epoch;
  ch.ref_bit_index = found;
  ch.bits_checked = ch.bits_total;
  ch.mismatch_history = 0;
  return true;
}

bool check_transmit_time(TrackingChannel& ch, const signal::NavBitSource& nav) {
  if (!ch.time_resolved) return false;
  const std::int64_t fresh = ch.bits_total - ch.bits_checked;
  ch.bits_checked = ch.bits_total;
  const auto n = static_cast<std::int64_t>(ch.bits.size());
  for (std::int64_t k = std::max<std::int64_t>(1, n - fresh); k < n; ++k) {
    const auto& cur = ch.bits[static_cast<std::size_t>(k)];
    const auto& prev = ch.bits[static_cast<std::size_t>(k - 1)];
    if (cur.start_epoch - prev.start_epoch != kCodePeriodsPerBit) continue;
    const std::int64_t index = ch.ref_bit_index + (cur.start_epoch - ch.ref_epoch) / kCodePeriodsPerBit;
    const int expected = nav.bit(ch.prn_id, index) * nav.bit(ch.prn_id, index - 1);
    const bool bad = differential(cur.value, prev.value) != expected;
    ch.mismatch_history = ((ch.mismatch_history << 1) | (bad ? 1u : 0u)) & 0xFFFFu;
  }
  if (std::popcount(ch.mismatch_history) >= 4) {
    ch.reset_time();
    return false;
  }
  return true;
}

std::vector<PseudorangeMeasurement> extract_pseudoranges(std::span<const TrackingChannel> channels,
                                                         double epoch_index, double sample_rate,
                                                         double local_clock_offset) {
  std::vector<PseudorangeMeasurement> out;
  const double local_time = epoch_index / sample_rate + local_clock_offset;
  for (const auto& ch : channels) {
    if (ch.state != ChannelState::Tracking || !ch.time_resolved || ch.epoch_count == 0) continue;
    const double tx = ch.transmit_time_at(epoch_index);
    out.push_back({ch.prn_id, ch.band, kSpeedOfLight * (local_time - tx), tx});
  }
  return out;
}

}  // namespace relaylab::receiver
