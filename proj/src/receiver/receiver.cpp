#include "relaylab/receiver/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "relaylab/errors.hpp"
#include "relaylab/scene/render.hpp"

namespace relaylab::receiver {

struct Receiver::BandState {
  Band band;
  std::vector<TrackingChannel> channels;
  std::vector<signal::Sample> history;
  std::int64_t history_first = 0;
  Acquirer acquirer;
  signal::NavBitSource nav;

  BandState(Band b, const ReceiverConfig& cfg, double fs, signal::NavBitSource nav_bits)
      : band(b), acquirer(cfg, fs), nav(std::move(nav_bits)) {}

  FeedView view(std::int64_t cut, double fs) const {
    const auto n = static_cast<std::size_t>(std::max<std::int64_t>(0, cut - history_first));
    return {std::span(history).first(std::min(n, history.size())), history_first, fs};
  }
};

namespace {

std::vector<int> search_list(const ReceiverConfig& cfg, const scene::Scene& scene, const ReceiverAssist& assist,
                             Band band) {
  if (!cfg.search_prns.empty()) return cfg.search_prns;
  std::vector<int> prns;
  if (assist.position) {
    for (const auto* sat : scene::visible_satellites(scene, *assist.position, band)) prns.push_back(sat->prn_id);
    std::sort(prns.begin(), prns.end());
    return prns;
  }
  for (int p = 1; p <= 32; ++p) prns.push_back(p);
  return prns;
}

}  // namespace

Receiver::Receiver(ReceiverConfig cfg, const scene::Scene& scene, double sample_rate, ReceiverAssist assist)
    : cfg_(std::move(cfg)), scene_(&scene), fs_(sample_rate), assist_(std::move(assist)) {
  cfg_.validate();
  for (const Band band : cfg_.bands) {
    auto b = std::make_unique<BandState>(band, cfg_, fs_, scene::nav_source(scene, band));
    for (const int prn : search_list(cfg_, scene, assist_, band)) {
      TrackingChannel ch;
      ch.prn_id = prn;
      ch.band = band;
      b->channels.push_back(ch);
    }
    bands_.push_back(std::move(b));
  }
}

Receiver::~Receiver() = default;
Receiver::Receiver(Receiver&&) noexcept = default;
Receiver& Receiver::operator=(Receiver&&) noexcept = default;

std::vector<TrackingChannel> Receiver::channels(Band band) const {
  for (const auto& b : bands_) {
    if (b->band == band) return b->channels;
  }
  return {};
}

void Receiver::record_transition(const TrackingChannel& ch, ChannelState from, std::int64_t index) {
  transitions_.push_back({time_of(index), ch.prn_id, ch.band, from, ch.state, ch.lock_timer});
  channel_log_.push_back({time_of(index), ch.prn_id, ch.band, ch.state, ch.cn0_est, ch.code_phase, ch.doppler});
}

void Receiver::log_channels(std::int64_t index) {
  for (const auto& b : bands_) {
    for (const auto& ch : b->channels) {
      if (ch.state == ChannelState::Idle) continue;
      channel_log_.push_back({time_of(index), ch.prn_id, ch.band, ch.state, ch.cn0_est, ch.code_phase, ch.doppler});
    }
  }
}

void Receiver::run_segment(std::int64_t cut) {
  const double local_time = time_of(cut) + cfg_.clock_offset_s;
  for (auto& b : bands_) {
    const auto view = b->view(cut, fs_);
    for (auto& ch : b->channels) {
      const auto before = ch.state;
      track_in_place(ch, view, cfg_);
      if (ch.state != before) {
        record_transition(ch, before, static_cast<std::int64_t>(std::llround(ch.last_epoch_start)));
      }
      if (ch.state != ChannelState::Tracking) continue;
      if (ch.time_resolved) {
        check_transmit_time(ch, b->nav);
      } else {
        resolve_transmit_time(ch, b->nav, local_time, cfg_.time_search_window_s);
      }
    }
  }
}

void Receiver::run_acquisition(BandState& b, std::int64_t tick) {
  std::vector<TrackingChannel*> eligible;
  for (auto& ch : b.channels) {
    const auto before = ch.state;
    if (ch.state == ChannelState::Idle || ch.state == ChannelState::Lost) {
      ch.state = ChannelState::Acquiring;
      ch.verifying = false;
      record_transition(ch, before, tick);
    }
    if (ch.state == ChannelState::Acquiring && !ch.verifying) eligible.push_back(&ch);
  }
  if (eligible.empty()) return;

  const auto w = static_cast<std::int64_t>(b.acquirer.window_samples());
  const auto offset = static_cast<std::size_t>(tick - b.history_first);
  b.acquirer.load(std::span(b.history).subspan(offset, static_cast<std::size_t>(w)), time_of(tick));
  for (auto* ch : eligible) {
    const auto res = b.acquirer.search(ch->prn_id);
    if (!res.detected) continue;
    acquisitions_.push_back({time_of(tick), b.band, res});
    TrackingChannel probe = *ch;
    probe.doppler = res.doppler;
    const double len = kCodeLength / probe.chips_per_sample(fs_);
    double epoch = static_cast<double>(tick) + res.code_lag;
    const double ready = static_cast<double>(tick + w);
    if (epoch < ready) epoch += std::ceil((ready - epoch) / len) * len;
    ch->start(epoch, res.doppler, fs_);
  }
}

void Receiver::solve_at(std::int64_t index) {
  std::vector<PvtMeasurement> meas;
  for (const auto& b : bands_) {
    std::vector<TrackingChannel> usable;
    for (const auto& ch : b->channels) {
      if (ch.cn0_est >= cfg_.cn0_floor_dbhz) usable.push_back(ch);
    }
    for (const auto& pr : extract_pseudoranges(usable, static_cast<double>(index), fs_, cfg_.clock_offset_s)) {
      const auto* sat = scene_->find(pr.prn_id);
      if (!sat || (pr.band == Band::L2 && !sat->on_l2)) continue;
      meas.push_back({pr.prn_id, pr.band, sat->position_at(pr.transmit_time), pr.pseudorange});
    }
  }
  PvtGuess guess;
  if (last_fix_) {
    guess = *last_fix_;
  } else if (assist_.position) {
    guess.position = *assist_.position;
  }
  auto sol = solve_pvt(meas, guess);
  if (sol.fix) last_fix_ = PvtGuess{sol.position, sol.clock_bias};
  pvt_.push_back({time_of(index), std::move(sol)});
  log_channels(index);
}

void Receiver::process(std::span<const signal::IqBuffer> band_blocks) {
  if (band_blocks.size() != bands_.size()) throw DomainError("Receiver::process: one block per band required");
  const auto& first = band_blocks.front();
  for (const auto& blk : band_blocks) {
    if (blk.sample_rate != fs_) throw DomainError("Receiver::process: sample rate mismatch");
    if (blk.size() != first.size() || blk.start_time != first.start_time) {
      throw DomainError("Receiver::process: band blocks must share one window");
    }
  }
  const auto b0 = static_cast<std::int64_t>(std::llround(first.start_time * fs_));
  const std::int64_t end = b0 + static_cast<std::int64_t>(first.size());

  const auto acq_period = static_cast<std::int64_t>(std::llround(cfg_.reacquisition_period_s * fs_));
  const auto pvt_period = static_cast<std::int64_t>(std::llround(cfg_.pvt_interval_s * fs_));
  if (!started_) {
    started_ = true;
    processed_ = b0;
    for (auto& b : bands_) b->history_first = b0;
    next_acq_tick_ = static_cast<std::int64_t>(std::llround(cfg_.power_on_time * fs_));
    while (next_acq_tick_ < b0) next_acq_tick_ += acq_period;
    const auto clock = static_cast<std::int64_t>(std::llround(cfg_.clock_offset_s * fs_));
    const std::int64_t first_local = std::max(b0, next_acq_tick_) + clock;
    next_pvt_tick_ = ((first_local + pvt_period - 1) / pvt_period) * pvt_period - clock;
  } else if (b0 != processed_) {
    throw DomainError("Receiver::process: blocks must be contiguous");
  }
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    auto& h = bands_[i]->history;
    h.insert(h.end(), band_blocks[i].samples.begin(), band_blocks[i].samples.end());
  }

  const auto window = static_cast<std::int64_t>(bands_.front()->acquirer.window_samples());
  while (true) {
    const std::int64_t acq_ready = next_acq_tick_ + window;
    const std::int64_t cut = std::min({end, acq_ready, next_pvt_tick_});
    if (cut > processed_) {
      run_segment(cut);
      processed_ = cut;
    }
    if (acq_ready == cut) {
      for (auto& b : bands_) run_acquisition(*b, next_acq_tick_);
      next_acq_tick_ += acq_period;
    }
    if (next_pvt_tick_ == cut) {
      solve_at(cut);
      next_pvt_tick_ += pvt_period;
    }
    if (cut == end && std::min(next_acq_tick_ + window, next_pvt_tick_) > end) break;
  }

  // Drop history no consumer can still need.
  std::int64_t keep = std::min(end, next_acq_tick_);
  for (const auto& b : bands_) {
    for (const auto& ch : b->channels) {
      const bool active = ch.state == ChannelState::Tracking || (ch.state == ChannelState::Acquiring && ch.verifying);
      if (active) keep = std::min(keep, static_cast<std::int64_t>(std::floor(ch.epoch_start)) - 2);
    }
  }
  for (auto& b : bands_) {
    const std::int64_t drop = keep - b->history_first;
    if (drop > 65536 && drop <= static_cast<std::int64_t>(b->history.size())) {
      b->history.erase(b->history.begin(), b->history.begin() + drop);
      b->history_first = keep;
    }
  }
}

ReceiverRun receiver_run(const signal::IqBuffer& feed, const ReceiverConfig& cfg, const scene::Scene& scene,
                         const ReceiverAssist& assist, std::size_t block_samples) {
  ReceiverConfig single = cfg;
  single.bands = {cfg.bands.front()};
  Receiver rx(single, scene, feed.sample_rate, assist);
  for (std::size_t off = 0; off < feed.size(); off += block_samples) {
    const std::size_t n = std::min(block_samples, feed.size() - off);
    signal::IqBuffer blk;
    blk.sample_rate = feed.sample_rate;
    blk.start_time = feed.time_of(off);
    blk.samples.assign(feed.samples.begin() + static_cast<std::ptrdiff_t>(off),
                       feed.samples.begin() + static_cast<std::ptrdiff_t>(off + n));
    rx.process(std::span(&blk, 1));
  }
  return {rx.pvt_log(), rx.channel_log(), rx.transitions()};
}

void write_pvt_csv(std::ostream& os, const std::vector<PvtRecord>& log) {
  os << "t,fix,x,y,z,clock_bias,n_sats,residual_rms\n";
  for (const auto& r : log) {
    const auto& s = r.solution;
    if (s.fix) {
      os << fmt::format("{:.3f},1,{:.3f},{:.3f},{:.3f},{:.12f},{},{:.3f}\n", r.t, s.position.x, s.position.y,
                        s.position.z, s.clock_bias, s.used_satellites.size(), s.residual_rms);
    } else {
      os << fmt::format("{:.3f},0,,,,,{},\n", r.t, s.used_satellites.size());
    }
  }
}

void write_channel_csv(std::ostream& os, const std::vector<ChannelLogRow>& log, Band band) {
  os << "t,prn,state,cn0,code_phase,doppler\n";
  for (const auto& r : log) {
    if (r.band != band) continue;
    os << fmt::format("{:.3f},{},{},{:.2f},{:.4f},{:.2f}\n", r.t, r.prn_id, to_string(r.state), r.cn0, r.code_phase,
                      r.doppler);
  }
}

}  // namespace relaylab::receiver
