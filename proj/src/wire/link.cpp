#include "relaylab/wire/link.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "relaylab/errors.hpp"

namespace relaylab::wire {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void LinkModel::validate() const {
  if (!(bandwidth > 0.0)) throw DomainError("LinkModel: bandwidth must be positive");
  if (!(base_latency >= 0.0) || !std::isfinite(base_latency)) throw DomainError("LinkModel: bad base_latency");
  if (!(jitter_stddev >= 0.0) || !std::isfinite(jitter_stddev)) throw DomainError("LinkModel: bad jitter");
  if (!(loss_prob >= 0.0 && loss_prob <= 1.0)) throw DomainError("LinkModel: loss_prob outside [0, 1]");
  double prev_end = -kInf;
  for (const auto& e : congestion_episodes) {
    if (!(e.duration > 0.0)) throw DomainError("LinkModel: episode duration must be positive");
    if (!(e.bandwidth_factor >= 0.0 && e.bandwidth_factor <= 1.0)) {
      throw DomainError("LinkModel: episode factor outside [0, 1]");
    }
    if (e.start < prev_end) throw DomainError("LinkModel: congestion episodes overlap or are unsorted");
    prev_end = e.start + e.duration;
  }
}

double LinkModel::rate_at(double t) const {
  for (const auto& e : congestion_episodes) {
    if (t >= e.start && t < e.start + e.duration) return bandwidth * e.bandwidth_factor;
  }
  return bandwidth;
}

double LinkModel::served_bits(double t0, double t1) const {
  if (t1 <= t0) return 0.0;
  if (std::isinf(bandwidth)) return kInf;
  double total = bandwidth * (t1 - t0);
  for (const auto& e : congestion_episodes) {
    const double a = std::max(t0, e.start);
    const double b = std::min(t1, e.start + e.duration);
    if (b > a) total -= bandwidth * (1.0 - e.bandwidth_factor) * (b - a);
  }
  return total;
}

double LinkModel::time_to_serve(double t0, double bits) const {
  if (bits <= 0.0) return t0;
  if (std::isinf(bandwidth)) return t0;
  double t = t0;
  double remaining = bits;
  for (const auto& e : congestion_episodes) {
    const double e_end = e.start + e.duration;
    if (e_end <= t) continue;
    if (e.start > t) {  // full-rate stretch before the episode
      const double cap = bandwidth * (e.start - t);
      if (cap >= remaining) return t + remaining / bandwidth;
      remaining -= cap;
      t = e.start;
    }
    const double rate = bandwidth * e.bandwidth_factor;
    const double cap = rate * (e_end - t);
    if (rate > 0.0 && cap >= remaining) return t + remaining / rate;
    remaining -= cap;
    t = e_end;
  }
  return t + remaining / bandwidth;
}

LinkModel apply_congestion_episode(LinkModel link, double start, double duration, double factor) {
  if (!(duration > 0.0)) throw DomainError("apply_congestion_episode: duration must be positive");
  if (!(factor >= 0.0 && factor <= 1.0)) throw DomainError("apply_congestion_episode: factor outside [0, 1]");
  for (const auto& e : link.congestion_episodes) {
    if (start < e.start + e.duration && e.start < start + duration) {
      throw DomainError("apply_congestion_episode: overlaps an existing episode");
    }
  }
  link.congestion_episodes.push_back({start, duration, factor});
  std::sort(link.congestion_episodes.begin(), link.congestion_episodes.end(),
            [](const auto& a, const auto& b) { return a.start < b.start; });
  return link;
}

double DeliverySchedule::stall_seconds(double horizon) const {
  double total = 0.0;
  for (const auto& s : stalls) {
    const double end = std::min(s.end, horizon);
    if (end > s.start) total += end - s.start;
  }
  return total;
}

std::uint64_t DeliverySchedule::delivered_bytes() const {
  std::uint64_t n = 0;
  for (const auto& f : frames) {
    if (f.fate == FrameFate::Delivered) n += f.bytes;
  }
  return n;
}

std::uint64_t DeliverySchedule::dropped_bytes() const {
  std::uint64_t n = 0;
  for (const auto& f : frames) {
    if (f.fate != FrameFate::Delivered) n += f.bytes;
  }
  return n;
}

LinkEmulator::LinkEmulator(LinkModel link, std::uint64_t seed) : link_(std::move(link)), rng_(seed) {
  link_.validate();
}

void LinkEmulator::retire(double t) {
  while (!pending_.empty() && pending_.front().finish <= t) pending_.pop_front();
}

double LinkEmulator::backlog_bytes(double t) {
  retire(t);
  double total = 0.0;
  for (const auto& p : pending_) total += static_cast<double>(p.bytes);
  if (!pending_.empty() && t > pending_.front().start) {
    total -= std::min(static_cast<double>(pending_.front().bytes),
                      link_.served_bits(pending_.front().start, t) / 8.0);
  }
  return std::max(0.0, total);
}

void LinkEmulator::add_stall(double start, double end) {
  if (!stalls_.empty() && start <= stalls_.back().end) {
    stalls_.back().end = std::max(stalls_.back().end, end);
  } else {
    stalls_.push_back({start, end});
  }
}

FrameDelivery LinkEmulator::offer(double send_time, std::size_t bytes) {
  if (send_time < last_send_) throw DomainError("LinkEmulator: send times must be nondecreasing");
  last_send_ = send_time;

  // Draw both variates for every frame so the random stream does not depend
  // on queue state.
  const double loss_draw = rng_.uniform();
  const double jitter = std::abs(rng_.gaussian()) * link_.jitter_stddev;

  FrameDelivery d;
  d.send_time = send_time;
  d.bytes = bytes;

  const double backlog = backlog_bytes(send_time);
  const bool over_limit = backlog > 0.0 && backlog + static_cast<double>(bytes) > static_cast<double>(link_.send_buffer_limit);

  if (link_.mode == LinkMode::LossyDatagram && (loss_draw < link_.loss_prob || over_limit)) {
    d.fate = FrameFate::DroppedByLink;
    d.queue_depth = static_cast<std::uint64_t>(backlog);
    return d;
  }
  if (link_.mode == LinkMode::ReliableStream && over_limit) {
    d.fate = FrameFate::LostToStall;
    d.queue_depth = static_cast<std::uint64_t>(backlog);
    // Blocked until the backlog has drained to limit - bytes.
    const double excess = backlog + static_cast<double>(bytes) - static_cast<double>(link_.send_buffer_limit);
    const double head_start = std::max(send_time, pending_.front().start);
    add_stall(send_time, link_.time_to_serve(head_start, excess * 8.0));
    return d;
  }

  const double start = std::max(send_time, busy_until_);
  const double finish = link_.time_to_serve(start, static_cast<double>(bytes) * 8.0);
  busy_until_ = finish;
  pending_.push_back({start, finish, bytes});

  d.fate = FrameFate::Delivered;
  d.arrival_time = finish + link_.base_latency + jitter;
  if (link_.mode == LinkMode::ReliableStream) {
    d.arrival_time = std::max(d.arrival_time, last_arrival_);
    last_arrival_ = d.arrival_time;
  }
  d.queue_depth = static_cast<std::uint64_t>(std::llround(backlog)) + bytes;
  peak_queue_ = std::max(peak_queue_, d.queue_depth);
  return d;
}

DeliverySchedule link_transmit(const LinkModel& link, std::span<const OfferedFrame> offered, std::uint64_t seed) {
  for (std::size_t i = 1; i < offered.size(); ++i) {
    if (offered[i].send_time < offered[i - 1].send_time) {
      throw DomainError("link_transmit: send times must be nondecreasing");
    }
  }
  LinkEmulator emu(link, seed);
  DeliverySchedule s;
  s.frames.reserve(offered.size());
  for (const auto& f : offered) s.frames.push_back(emu.offer(f.send_time, f.bytes));
  s.stalls = emu.stalls();
  s.peak_queue_bytes = emu.peak_queue_bytes();
  return s;
}

void write_link_trace_csv(std::ostream& os, const DeliverySchedule& schedule) {
  os << "send_time,arrival_time,stalled,queue_depth\n";
  for (const auto& f : schedule.frames) {
    const bool delivered = f.fate == FrameFate::Delivered && std::isfinite(f.arrival_time);
    os << fmt::format("{:.9f},{},{},{}\n", f.send_time,
                      delivered ? fmt::format("{:.9f}", f.arrival_time) : std::string("dropped"),
                      f.fate == FrameFate::LostToStall ? 1 : 0, f.queue_depth);
  }
}

}  // namespace relaylab::wire
