#include "relaylab/receiver/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relaylab/errors.hpp"
#include "relaylab/signal/ca_code.hpp"

namespace relaylab::receiver {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxBits = 64;
constexpr int kMinFlipsForSync = 10;

double wrap_phase(double p) { return p - kTwoPi * std::floor(p / kTwoPi); }

struct Correlators {
  std::complex<double> early, prompt, late;
};

Correlators integrate(const TrackingChannel& ch, const FeedView& feed, std::int64_t s0, std::int64_t s1, double delta) {
  const auto& code = signal::ca_code(ch.prn_id).chips;
  const double fs = feed.sample_rate;
  const double w = kTwoPi * ch.doppler / fs;
  const double offset = static_cast<double>(s0) - ch.epoch_start;

  double c = offset * delta;
  if (c < 0.0) c = 0.0;
  auto idx = static_cast<int>(c);
  double frac = c - idx;
  auto phasor = std::polar(1.0, -(ch.carrier_phase + w * offset));
  const auto step = std::polar(1.0, -w);

  double er = 0, ei = 0, pr = 0, pi = 0, lr = 0, li = 0;
  const signal::Sample* x = feed.samples.data() + (s0 - feed.first_index);
  for (std::int64_t n = s0; n < s1; ++n, ++x) {
    const auto y = *x * phasor;
    phasor *= step;
    const int i = idx >= kCodeLength ? kCodeLength - 1 : idx;
    const double p = code[static_cast<std::size_t>(i)];
    const double e = frac >= 0.5 ? code[static_cast<std::size_t>(i + 1 == kCodeLength ? 0 : i + 1)] : p;
    const double l = frac < 0.5 ? code[static_cast<std::size_t>(i == 0 ? kCodeLength - 1 : i - 1)] : p;
    pr += p * y.real();
    pi += p * y.imag();
    er += e * y.real();
    ei += e * y.imag();
    lr += l * y.real();
    li += l * y.imag();
    frac += delta;
    while (frac >= 1.0) {
      frac -= 1.0;
      ++idx;
    }
  }
  return {{er, ei}, {pr, pi}, {lr, li}};
}

void update_cn0(TrackingChannel& ch, std::complex<double> prompt, double epoch_s) {
  if (ch.bit_phase >= 0 && ch.block_len > 0 &&
      ((ch.epoch_count - ch.bit_phase) % TrackingChannel::kNwprBlock) == 0) {
    ch.block_sum = {};  // realign blocks with bit edges
    ch.block_wide = 0.0;
    ch.block_len = 0;
  }
  ch.block_sum += prompt;
  ch.block_wide += std::norm(prompt);
  if (++ch.block_len < TrackingChannel::kNwprBlock) return;

  const double ratio = ch.block_wide > 0.0 ? std::norm(ch.block_sum) / ch.block_wide : 0.0;
  ch.block_sum = {};
  ch.block_wide = 0.0;
  ch.block_len = 0;
  ch.nwpr_ratios[static_cast<std::size_t>(ch.nwpr_pos)] = ratio;
  ch.nwpr_pos = (ch.nwpr_pos + 1) % TrackingChannel::kNwprBlocks;
  ch.nwpr_count = std::min(ch.nwpr_count + 1, TrackingChannel::kNwprBlocks);
  if (ch.nwpr_count < 4) return;

  double mu = 0.0;
  for (int i = 0; i < ch.nwpr_count; ++i) mu += ch.nwpr_ratios[static_cast<std::size_t>(i)];
  mu /= ch.nwpr_count;
  const double k = TrackingChannel::kNwprBlock;
  if (mu <= 1.0) {
    ch.cn0_est = 0.0;
  } else if (mu >= k) {
    ch.cn0_est = 99.0;
  } else {
    ch.cn0_est = std::clamp(10.0 * std::log10((mu - 1.0) / (k - mu) / epoch_s), 0.0, 99.0);
  }
}

void update_bits(TrackingChannel& ch, std::complex<double> prompt, bool reliable) {
  const std::int64_t e = ch.epoch_count;
  if (!reliable) {
    ch.bits.clear();
    ch.bit_len = 0;
    ch.bit_acc = {};
    return;
  }
  if (ch.has_prompt && (prompt * std::conj(ch.last_prompt)).real() < 0.0) {
    ++ch.flip_histogram[static_cast<std::size_t>(e % kCodePeriodsPerBit)];
    ++ch.flip_total;
  }
  if (ch.bit_phase < 0) {
    if (ch.flip_total >= kMinFlipsForSync) {
      const auto it = std::max_element(ch.flip_histogram.begin(), ch.flip_histogram.end());
      if (*it >= 0.7 * ch.flip_total) {
        ch.bit_phase = static_cast<int>(it - ch.flip_histogram.begin());
        ch.flip_histogram.fill(0);
        ch.flip_total = 0;
      } else if (ch.flip_total >= 4 * kMinFlipsForSync) {
        ch.flip_histogram.fill(0);  // no consistent edge; start over
        ch.flip_total = 0;
      }
    }
    return;
  }
  // Edges keep being watched: a replay that skips samples moves them while
  // the code loop stays locked, and the decoded time would go stale.
  if (ch.flip_total >= 2 * kMinFlipsForSync) {
    const auto it = std::max_element(ch.flip_histogram.begin(), ch.flip_histogram.end());
    if (static_cast<int>(it - ch.flip_histogram.begin()) != ch.bit_phase && *it >= 0.7 * ch.flip_total) {
      ch.reset_time();
      return;
    }
    ch.flip_histogram.fill(0);
    ch.flip_total = 0;
  }
  if ((e - ch.bit_phase) % kCodePeriodsPerBit == 0) {
    if (ch.bit_len == kCodePeriodsPerBit) {
      ch.bits.push_back({e - kCodePeriodsPerBit, ch.bit_acc});
      ++ch.bits_total;
      if (ch.bits.size() > kMaxBits) ch.bits.pop_front();
    }
    ch.bit_acc = {};
    ch.bit_len = 0;
  }
  ch.bit_acc += prompt;
  ++ch.bit_len;
}

}  // namespace

std::string_view to_string(ChannelState s) {
  switch (s) {
    case ChannelState::Idle:
      return "Idle";
    case ChannelState::Acquiring:
      return "Acquiring";
    case ChannelState::Tracking:
      return "Tracking";
    case ChannelState::Lost:
      return "Lost";
  }
  return "Idle";
}

FeedView view_of(const signal::IqBuffer& buf) {
  return {buf.samples, static_cast<std::int64_t>(std::llround(buf.start_time * buf.sample_rate)), buf.sample_rate};
}

double TrackingChannel::chips_per_sample(double sample_rate) const {
  return kChipRate * (1.0 + doppler / carrier_hz(band)) / sample_rate;
}

double TrackingChannel::transmit_time_at(double sample_index) const {
  const double epoch_tx = static_cast<double>(ref_bit_index) * kNavBitPeriod +
                          static_cast<double>(epoch_count - 1 - ref_epoch) * kCodePeriod;
  return epoch_tx + (sample_index - last_epoch_start) * last_chips_per_sample / kChipRate;
}

void TrackingChannel::reset_time() {
  flip_histogram.fill(0);
  flip_total = 0;
  bit_phase = -1;
  bit_acc = {};
  bit_len = 0;
  bits.clear();
  time_resolved = false;
  bits_checked = 0;
  mismatch_history = 0;
}

void TrackingChannel::start(double epoch_start_index, double doppler_hz, double rate) {
  sample_rate = rate;
  epoch_start = epoch_start_index;
  doppler = doppler_hz;
  carrier_phase = 0.0;
  verifying = true;
  tracked_time = 0.0;
  epoch_count = 0;
  has_prompt = false;
  cn0_est = 0.0;
  lock_timer = 0.0;
  nwpr_ratios.fill(0.0);
  nwpr_count = 0;
  nwpr_pos = 0;
  block_sum = {};
  block_wide = 0.0;
  block_len = 0;
  bits_total = 0;
  reset_time();
}

void track_in_place(TrackingChannel& ch, const FeedView& feed, const ReceiverConfig& cfg) {
  if (!(feed.sample_rate > 0.0) || (ch.sample_rate > 0.0 && feed.sample_rate != ch.sample_rate)) {
    throw DomainError("track_update: segment sample rate does not match the channel");
  }
  if (ch.state != ChannelState::Tracking && !(ch.state == ChannelState::Acquiring && ch.verifying)) return;
  const double fs = feed.sample_rate;
  const double samples_per_ms = fs * kCodePeriod;

  while (true) {
    const double delta = ch.chips_per_sample(fs);
    const double len = kCodeLength / delta;
    auto s0 = static_cast<std::int64_t>(std::ceil(ch.epoch_start - 1e-9));
    if (s0 < feed.first_index) {
      // Data before the view is gone; skip whole epochs.
      const auto skip = static_cast<std::int64_t>(std::ceil((static_cast<double>(feed.first_index) - ch.epoch_start) / len));
      ch.epoch_start += static_cast<double>(skip) * len;
      ch.carrier_phase = wrap_phase(ch.carrier_phase + kTwoPi * ch.doppler * static_cast<double>(skip) * len / fs);
      ch.epoch_count += skip;
      ch.has_prompt = false;
      ch.bits.clear();
      ch.bit_acc = {};
      ch.bit_len = 0;
      continue;
    }
    const auto s1 = static_cast<std::int64_t>(std::ceil(ch.epoch_start + len - 1e-9));
    if (s1 > feed.end_index()) break;

    const auto corr = integrate(ch, feed, s0, s1, delta);
    const double epoch_s = len / fs;
    ch.last_epoch_start = ch.epoch_start;
    ch.last_chips_per_sample = delta;

    // Discriminators.
    double freq_err = 0.0;
    if (ch.has_prompt) {
      const auto d = corr.prompt * std::conj(ch.last_prompt);
      if (d.real() != 0.0) freq_err = std::atan(d.imag() / d.real()) / (kTwoPi * epoch_s);
    }
    const double ea = std::abs(corr.early);
    const double la = std::abs(corr.late);
    const double code_err = (ea + la) > 0.0 ? 0.5 * (ea - la) / (ea + la) : 0.0;  // chips

    update_cn0(ch, corr.prompt, epoch_s);
    const bool locked = ch.cn0_est >= cfg.cn0_floor_dbhz;
    const bool pull_in = ch.tracked_time < cfg.pull_in_s;
    const bool steer = pull_in || ch.verifying || locked;

    const double old_doppler = ch.doppler;
    double code_step = 0.0;
    if (steer) {
      ch.doppler += (pull_in ? cfg.fll_pull_in_gain : cfg.fll_gain) * freq_err;
      code_step = (pull_in ? cfg.pull_in_dll_gain : cfg.dll_gain) * code_err;
    }
    ch.carrier_phase = wrap_phase(ch.carrier_phase + kTwoPi * old_doppler * len / fs);
    ch.epoch_start += len - code_step / delta;

    update_bits(ch, corr.prompt, ch.state == ChannelState::Tracking && locked);
    ch.last_prompt = corr.prompt;
    ch.has_prompt = true;
    ++ch.epoch_count;
    ch.tracked_time += epoch_s;
    ch.code_phase = std::fmod(std::fmod(ch.epoch_start, samples_per_ms) / samples_per_ms * kCodeLength, kCodeLength);

    if (ch.state == ChannelState::Tracking) {
      ch.lock_timer = locked ? 0.0 : ch.lock_timer + epoch_s;
      if (ch.lock_timer > cfg.loss_timeout_s) {
        ch.state = ChannelState::Lost;
        ch.time_resolved = false;
        break;
      }
    } else if (ch.verifying && ch.tracked_time >= cfg.verify_time_s) {
      ch.verifying = false;
      if (locked) {
        ch.state = ChannelState::Tracking;
        ch.lock_timer = 0.0;
      } else {
        break;  // rejected detection; wait for the next search
      }
    }
  }
}

TrackingChannel track_update(TrackingChannel ch, const FeedView& feed, const ReceiverConfig& cfg) {
  track_in_place(ch, feed, cfg);
  return ch;
}

TrackingChannel track_update(TrackingChannel ch, const signal::IqBuffer& segment, const ReceiverConfig& cfg) {
  track_in_place(ch, view_of(segment), cfg);
  return ch;
}

}  // namespace relaylab::receiver
