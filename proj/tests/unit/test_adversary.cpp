#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "relaylab/adversary/forwarder.hpp"
#include "relaylab/adversary/jammer.hpp"
#include "relaylab/adversary/sampler.hpp"
#include "relaylab/adversary/sequencer.hpp"
#include "relaylab/errors.hpp"
#include "relaylab/scene/render.hpp"
#include "relaylab/signal/quantize.hpp"
#include "relaylab/signal/random.hpp"
#include "relaylab/spectral/psd.hpp"
#include "relaylab/wire/rates.hpp"

namespace relaylab::adversary {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

scene::Scene noise_only_scene() {
  scene::Scene sc;
  sc.sampler_location = scene::geodetic_to_ecef({59.4 * kDeg, 17.9 * kDeg, 30.0});
  sc.victim_location = scene::geodetic_to_ecef({50.6 * kDeg, 9.7 * kDeg, 260.0});
  return sc;
}

scene::Scene sky_scene() {
  auto sc = noise_only_scene();
  const double r = 26'560'000.0;
  for (const auto& [prn, lat, lon] : {std::tuple{5, 60.0, 20.0}, std::tuple{12, 40.0, 0.0}, std::tuple{30, 70.0, 60.0}}) {
    scene::SatelliteOrbitSpec s;
    s.prn_id = prn;
    s.motion = scene::EcefPosition{r * std::cos(lat * kDeg) * std::cos(lon * kDeg),
                                   r * std::cos(lat * kDeg) * std::sin(lon * kDeg), r * std::sin(lat * kDeg)};
    sc.satellites.push_back(s);
  }
  return sc;
}

SamplerNode sampler_for(const scene::Scene& sc) {
  SamplerNode n;
  n.location = sc.sampler_location;
  return n;
}

wire::LinkModel link_of(double bandwidth, double latency = 0.0) {
  wire::LinkModel l;
  l.bandwidth = bandwidth;
  l.base_latency = latency;
  return l;
}

struct Relay {
  SamplerRun sampled;
  ReplayOutput replay;
};

Relay relay(const scene::Scene& sc, const wire::LinkModel& link, const ForwarderNode& fwd, double horizon,
            std::uint64_t seed = 17) {
  Relay r;
  r.sampled = sampler_run(sampler_for(sc), sc, 0.0, horizon, link, seed);
  std::vector<ArrivedFrame> arrived;
  for (std::size_t i = 0; i < r.sampled.frames.size(); ++i) {
    if (r.sampled.schedule.frames[i].fate == wire::FrameFate::Delivered) {
      arrived.push_back({r.sampled.schedule.frames[i].arrival_time, r.sampled.frames[i].bytes});
    }
  }
  r.replay = forwarder_replay(fwd, arrived, kDefaultSampleRate, 0.0, horizon);
  return r;
}

std::vector<signal::Sample> dequantized_stream(const SamplerRun& run, double full_scale) {
  std::vector<signal::Sample> out;
  for (const auto& f : run.frames) {
    const auto frame = std::get<wire::SampleFrame>(wire::decode_frame(f.bytes));
    const auto iq = signal::dequantize_iq(wire::frame_words(frame), full_scale);
    out.insert(out.end(), iq.samples.begin(), iq.samples.end());
  }
  return out;
}

TEST(Sampler, EmptySkyFrameCount) {
  const auto sc = noise_only_scene();
  const auto run = sampler_run(sampler_for(sc), sc, 0.0, 0.1, link_of(kInf), 1);
  // ceil(0.1 * 1024000 / 4096) = 25
  EXPECT_EQ(run.frames.size(), 25u);
  const auto run2 = sampler_run(sampler_for(sc), sc, 0.0, 0.1001, link_of(kInf), 1);
  EXPECT_EQ(run2.frames.size(), 26u);
  for (std::size_t k = 0; k < run.frames.size(); ++k) {
    EXPECT_EQ(run.frames[k].sequence, k);
    EXPECT_NEAR(run.frames[k].send_time, double(k + 1) * 4096 / kDefaultSampleRate, 1e-12);
  }
}

TEST(Sampler, OfferedRateMatchesFramedRate) {
  const auto sc = noise_only_scene();
  const auto node = sampler_for(sc);
  const auto run = sampler_run(node, sc, 0.0, 10.0, link_of(kInf), 2);
  double bits = 0.0;
  for (const auto& f : run.frames) bits += 8.0 * double(f.bytes.size());
  const double span = run.frames.back().send_time - run.frames.front().send_time + node.cfg.frame_duration();
  EXPECT_NEAR(bits / span / wire::framed_data_rate(node.cfg), 1.0, 1e-3);
}

TEST(Sampler, FramesAreTheQuantizedRenderedFeed) {
  const auto sc = sky_scene();
  const auto node = sampler_for(sc);
  const auto run = sampler_run(node, sc, 0.0, 0.05, link_of(kInf), 3);
  const auto stream = dequantized_stream(run, node.full_scale);
  std::size_t pos = 0;
  for (const auto& f : run.frames) {
    const scene::RenderWindow w{f.capture_start, node.cfg.frame_duration(), node.cfg.sample_rate};
    const auto feed = scene::render_antenna_feed(sc, sc.sampler_location, {1, 0, 0, Band::L1}, w, nullptr, nullptr,
                                                 signal::derive_seed(3, "sampler/noise", f.sequence));
    const auto expected = signal::dequantize_iq(signal::quantize_iq(feed, 16, node.full_scale), node.full_scale);
    for (const auto s : expected.samples) ASSERT_EQ(stream[pos++], s);
  }
  EXPECT_EQ(pos, stream.size());
}

TEST(Jammer, ZeroOutsideIntervals) {
  JammerConfig cfg;
  cfg.enabled_intervals = {{Band::L1, 1.0, 2.0}};
  const auto before = jammer_generate(cfg, Band::L1, 0.0, 0.5, kDefaultSampleRate, 1);
  EXPECT_EQ(signal::mean_power(before), 0.0);
  const auto l2 = jammer_generate(cfg, Band::L2, 1.0, 0.5, kDefaultSampleRate, 1);
  EXPECT_EQ(signal::mean_power(l2), 0.0);
  const auto edge = jammer_generate(cfg, Band::L1, 1.9, 0.2, kDefaultSampleRate, 1);
  const auto split = static_cast<std::size_t>(std::llround(0.1 * kDefaultSampleRate));
  for (std::size_t n = split; n < edge.size(); ++n) ASSERT_EQ(edge.samples[n], signal::Sample{});
  EXPECT_NE(edge.samples[split - 1], signal::Sample{});
}

TEST(Jammer, PowerWithinOnePercent) {
  JammerConfig cfg;
  cfg.noise_power = 1000.0;
  cfg.enabled_intervals = {{Band::L1, 0.0, 10.0}};
  const auto buf = jammer_generate(cfg, Band::L1, 0.0, 1.0e6 / kDefaultSampleRate, kDefaultSampleRate, 5);
  ASSERT_EQ(buf.size(), 1'000'000u);
  double p = 0.0;
  for (const auto s : buf.samples) p += std::norm(s);
  EXPECT_NEAR(p / double(buf.size()), 1000.0, 10.0);
}

TEST(Jammer, FlatSpectrumWithinOneDecibel) {
  JammerConfig cfg;
  cfg.noise_power = 4.0;
  cfg.enabled_intervals = {{Band::L2, 0.0, 10.0}};
  const auto buf = jammer_generate(cfg, Band::L2, 0.0, 2.0, kDefaultSampleRate, 8);
  const auto psd = spectral::welch_psd(buf, 1024);
  // Sub-band averages of 32 bins each.
  std::vector<double> bands;
  for (std::size_t b = 0; b + 32 <= psd.power_db.size(); b += 32) {
    double lin = 0.0;
    for (std::size_t k = b; k < b + 32; ++k) lin += std::pow(10.0, psd.power_db[k] / 10.0);
    bands.push_back(10.0 * std::log10(lin / 32.0));
  }
  const auto [lo, hi] = std::minmax_element(bands.begin(), bands.end());
  EXPECT_LT(*hi - *lo, 1.0);
  EXPECT_NEAR(psd.total_power(), 4.0, 0.1);
}

TEST(Jammer, ConfigurationErrors) {
  JammerConfig cfg;
  cfg.bands = {Band::L1};
  EXPECT_THROW(jammer_generate(cfg, Band::L2, 0.0, 0.01, kDefaultSampleRate, 1), DomainError);
  cfg.enabled_intervals = {{Band::L1, 0.0, 2.0}, {Band::L1, 1.0, 3.0}};
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg.enabled_intervals = {{Band::L2, 0.0, 2.0}};
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg.enabled_intervals = {};
  cfg.noise_power = -1.0;
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Forwarder, IdealLinkIsDelayedCopy) {
  const auto sc = sky_scene();
  ForwarderNode fwd;
  fwd.replay_gain = 1.0;
  fwd.jitter_buffer_target = 0.25;
  const double latency = 0.01;
  const auto r = relay(sc, link_of(kInf, latency), fwd, 0.5);
  const auto stream = dequantized_stream(r.sampled, fwd.full_scale);
  // Capture-to-emission: one frame, link latency, jitter buffer.
  const double delay = 4096 / kDefaultSampleRate + latency + 0.25;
  const auto d = static_cast<std::size_t>(std::llround(delay * kDefaultSampleRate));
  const auto& out = r.replay.feed.samples;
  for (std::size_t n = 0; n < d; ++n) ASSERT_EQ(out[n], signal::Sample{});
  for (std::size_t n = d; n < out.size(); ++n) ASSERT_EQ(out[n], stream[n - d]) << n;
  EXPECT_EQ(r.replay.stats.gap_seconds, 0.0);
}

TEST(Forwarder, ReplayGainScalesOutput) {
  const auto sc = noise_only_scene();
  ForwarderNode a;
  a.replay_gain = 1.0;
  ForwarderNode b = a;
  b.replay_gain = 2.0;
  const auto ra = relay(sc, link_of(kInf), a, 0.3);
  const auto rb = relay(sc, link_of(kInf), b, 0.3);
  for (std::size_t n = 0; n < ra.replay.feed.size(); ++n) ASSERT_EQ(rb.replay.feed.samples[n], 2.0 * ra.replay.feed.samples[n]);
}

TEST(Forwarder, TwoSecondOutageLeavesGapOfOutageMinusBuffer) {
  const auto sc = noise_only_scene();
  ForwarderNode fwd;
  const auto link = wire::apply_congestion_episode(link_of(49e6), 5.0, 2.0, 0.0);
  const auto r = relay(sc, link, fwd, 12.0);
  // Frozen from tests/oracles/derived_values.py: 2 - 0.25 = 1.75 s within
  // one frame.
  EXPECT_NEAR(r.replay.stats.gap_seconds, 1.75, 0.004);
  const auto starts = std::count_if(r.replay.replay_log.begin(), r.replay.replay_log.end(),
                                    [](const LogEvent& e) { return e.event == "underrun_start"; });
  EXPECT_EQ(starts, 1);
}

TEST(Forwarder, SlowLinkStarvesReplayInRatio) {
  const auto sc = noise_only_scene();
  ForwarderNode fwd;
  const double horizon = 40.0;
  const auto r = relay(sc, link_of(11e6), fwd, horizon);
  // Silence share over the late part of the window, after the send buffer
  // has filled.
  const auto& out = r.replay.feed.samples;
  const auto from = static_cast<std::size_t>(10.0 * kDefaultSampleRate);
  const auto zeros = std::count(out.begin() + static_cast<std::ptrdiff_t>(from), out.end(), signal::Sample{});
  // Frozen from tests/oracles/derived_values.py: 1 - 11 / 32.836.
  EXPECT_NEAR(double(zeros) / double(out.size() - from), 0.665002, 0.02);
}

TEST(Forwarder, CorruptFramesAreDiscardedAndLogged) {
  const auto sc = noise_only_scene();
  auto run = sampler_run(sampler_for(sc), sc, 0.0, 0.1, link_of(kInf), 4);
  std::vector<ArrivedFrame> arrived;
  for (const auto& f : run.frames) arrived.push_back({f.send_time, f.bytes});
  arrived[3].bytes[wire::kHeaderBytes + 5] ^= 0xFF;
  ForwarderNode fwd;
  fwd.jitter_buffer_target = 0.0;
  const auto out = forwarder_replay(fwd, arrived, kDefaultSampleRate, 0.0, 0.2);
  EXPECT_EQ(out.stats.frames_corrupt, 1u);
  EXPECT_EQ(out.stats.frames_received, arrived.size() - 1);
  EXPECT_TRUE(std::any_of(out.replay_log.begin(), out.replay_log.end(),
                          [](const LogEvent& e) { return e.event == "frame_discarded"; }));
}

TEST(Forwarder, NodeValidation) {
  ForwarderNode fwd;
  fwd.jitter_buffer_target = -0.1;
  EXPECT_THROW(fwd.validate(), DomainError);
  fwd = ForwarderNode{};
  fwd.replay_gain = -1.0;
  EXPECT_THROW(fwd.validate(), DomainError);
}

AttackScript warm_script() {
  return {{{PhaseKind::Idle, 0, 15}, {PhaseKind::JamAll, 15, 30}, {PhaseKind::ReplayL1_JamOthers, 45, 15},
           {PhaseKind::RejamPulse, 60, 3}, {PhaseKind::ReplayL1_JamOthers, 63, 10}}};
}

TEST(Sequencer, PhaseOutputs) {
  const auto s = warm_script();
  s.validate();
  const auto jam = attack_sequencer(s, 20.0);
  EXPECT_TRUE(jam.jam_l1 && jam.jam_l2 && !jam.replay);
  const auto rep = attack_sequencer(s, 50.0);
  EXPECT_TRUE(!rep.jam_l1 && rep.jam_l2 && rep.replay);
  const auto pulse = attack_sequencer(s, 61.0);
  EXPECT_TRUE(pulse.jam_l1);
  EXPECT_TRUE(attack_sequencer(s, 64.0).replay);
  EXPECT_EQ(attack_sequencer(s, 5.0), outputs_for(PhaseKind::Idle));
  EXPECT_EQ(attack_sequencer(s, 100.0), outputs_for(PhaseKind::Idle));
  EXPECT_EQ(attack_sequencer(s, -1.0), outputs_for(PhaseKind::Idle));
  const auto only = outputs_for(PhaseKind::ReplayOnly);
  EXPECT_TRUE(only.replay && !only.jam_l1 && !only.jam_l2);
  const auto stop = outputs_for(PhaseKind::Stop);
  EXPECT_FALSE(stop.replay || stop.jam_l1 || stop.jam_l2);
}

TEST(Sequencer, EmptyScriptIsIdle) {
  const AttackScript s;
  s.validate();
  for (const double t : {0.0, 1.0, 1e6}) EXPECT_EQ(attack_sequencer(s, t), outputs_for(PhaseKind::Idle));
  EXPECT_TRUE(jam_intervals(s, Band::L1).empty());
}

TEST(Sequencer, PiecewiseConstantBetweenBoundaries) {
  const auto s = warm_script();
  for (const auto& p : s.phases) {
    const auto at_start = attack_sequencer(s, p.start);
    for (int k = 1; k < 50; ++k) ASSERT_EQ(attack_sequencer(s, p.start + p.duration * k / 50.0), at_start);
  }
}

TEST(Sequencer, MergedIntervals) {
  const auto s = warm_script();
  const auto l2 = jam_intervals(s, Band::L2);
  ASSERT_EQ(l2.size(), 1u);
  EXPECT_EQ(l2[0].start, 15.0);
  EXPECT_EQ(l2[0].end, 73.0);
  const auto l1 = jam_intervals(s, Band::L1);
  ASSERT_EQ(l1.size(), 2u);
  EXPECT_EQ(l1[1].start, 60.0);
  EXPECT_EQ(l1[1].end, 63.0);
  const auto rep = replay_intervals(s);
  ASSERT_EQ(rep.size(), 2u);
  EXPECT_EQ(rep[0], std::make_pair(45.0, 60.0));
}

TEST(Sequencer, ValidationRejectsBadScripts) {
  EXPECT_THROW((AttackScript{{{PhaseKind::JamAll, 0, 10}, {PhaseKind::Idle, 5, 10}}}.validate()), DomainError);
  EXPECT_THROW((AttackScript{{{PhaseKind::JamAll, 0, 0}}}.validate()), DomainError);
  EXPECT_THROW((AttackScript{{{PhaseKind::Idle, 0, 10}, {PhaseKind::ReplayL1_JamOthers, 10, 5}}}.validate()),
               DomainError);
  EXPECT_NO_THROW((AttackScript{{{PhaseKind::ReplayL1_JamOthers, 0, 60}}}.validate()));
}

TEST(Sequencer, PhaseNames) {
  for (const auto k : {PhaseKind::Idle, PhaseKind::JamAll, PhaseKind::ReplayL1_JamOthers, PhaseKind::RejamPulse,
                       PhaseKind::ReplayOnly, PhaseKind::Stop}) {
    EXPECT_EQ(phase_from_string(to_string(k)), k);
  }
  EXPECT_FALSE(phase_from_string("Jam").has_value());
}

}  // namespace
}  // namespace relaylab::adversary
