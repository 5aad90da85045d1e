#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "relaylab/errors.hpp"
#include "relaylab/receiver/acquisition.hpp"
#include "relaylab/receiver/pseudorange.hpp"
#include "relaylab/receiver/pvt.hpp"
#include "relaylab/receiver/receiver.hpp"
#include "relaylab/receiver/tracking.hpp"
#include "relaylab/scene/render.hpp"
#include "relaylab/signal/random.hpp"
#include "relaylab/signal/synthesis.hpp"

namespace relaylab::receiver {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kFs = kDefaultSampleRate;

signal::SatelliteSignalSpec spec_at(int prn, double amplitude, double code_phase, double doppler) {
  signal::SatelliteSignalSpec s;
  s.prn_id = prn;
  s.amplitude = amplitude;
  s.code_phase_offset = code_phase;
  s.doppler_hz = doppler;
  s.nav = signal::NavBitSource::explicit_bits({1});
  return s;
}

signal::IqBuffer feed_of(std::vector<signal::SatelliteSignalSpec> specs, double duration, double noise_var,
                         std::uint64_t seed, double start = 0.0) {
  auto buf = signal::synthesize_baseband(specs, kFs, duration, start);
  return noise_var > 0.0 ? signal::add_awgn(buf, noise_var, seed) : buf;
}

double chip_distance(double a, double b) {
  const double d = std::abs(a - b);
  return std::min(d, kCodeLength - d);
}

// Amplitude 0.1 in unit noise at 1.024 MHz: C/N0 = 10 log10(0.01 * 1.024e6) = 40 dB-Hz.
constexpr double kAmp = 0.1;

TEST(Acquisition, FindsKnownPhaseAndDoppler) {
  const ReceiverConfig cfg;
  const auto feed = feed_of({spec_at(14, kAmp, 345.6, 1234.0)}, 0.012, 1.0, 1);
  const auto r = acquire(feed, 14, cfg);
  EXPECT_TRUE(r.detected);
  EXPECT_GE(r.peak_metric, cfg.acquisition_threshold);
  EXPECT_LE(chip_distance(r.code_phase, 345.6), 0.5);
  EXPECT_LE(std::abs(r.doppler - 1234.0), cfg.doppler_bin_hz / 2);
  EXPECT_GE(r.code_phase, 0.0);
  EXPECT_LT(r.code_phase, kCodeLength);
}

TEST(Acquisition, NoiseFalseAlarmRateBelowOnePercent) {
  const ReceiverConfig cfg;
  Acquirer acq(cfg, kFs);
  int alarms = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    signal::IqBuffer zero(acq.window_samples(), kFs, 0.0);
    const auto noise = signal::add_awgn(zero, 1.0, signal::derive_seed(99, "fa", static_cast<std::uint64_t>(trial)));
    acq.load(noise.samples, 0.0);
    const auto r = acq.search(1 + trial % 32);
    if (r.detected) ++alarms;
    ASSERT_EQ(r.detected, r.peak_metric >= cfg.acquisition_threshold);
  }
  EXPECT_LE(alarms, 10);
}

TEST(Acquisition, AllZeroFeedIsNotDetected) {
  const signal::IqBuffer zero(20480, kFs, 0.0);
  EXPECT_FALSE(acquire(zero, 3, ReceiverConfig{}).detected);
}

TEST(Acquisition, StrongerCopyWins) {
  const ReceiverConfig cfg;
  const auto feed = feed_of({spec_at(9, kAmp, 100.25, 500.0), spec_at(9, 2 * kAmp, 700.5, -1500.0)}, 0.012, 1.0, 2);
  const auto r = acquire(feed, 9, cfg);
  EXPECT_TRUE(r.detected);
  EXPECT_LE(chip_distance(r.code_phase, 700.5), 0.5);
  EXPECT_LE(std::abs(r.doppler + 1500.0), cfg.doppler_bin_hz / 2);
}

TEST(Acquisition, ScaleInvariantArgmax) {
  const ReceiverConfig cfg;
  const auto feed = feed_of({spec_at(21, kAmp, 12.0, -3210.0)}, 0.012, 1.0, 3);
  const auto a = acquire(feed, 21, cfg);
  for (const double k : {1e-3, 0.5, 7.3, 1e4}) {
    auto scaled = feed;
    for (auto& s : scaled.samples) s *= k;
    const auto b = acquire(scaled, 21, cfg);
    EXPECT_DOUBLE_EQ(b.code_phase, a.code_phase) << k;
    EXPECT_DOUBLE_EQ(b.doppler, a.doppler) << k;
    EXPECT_NEAR(b.peak_metric, a.peak_metric, 1e-9 * a.peak_metric) << k;
  }
}

TEST(Acquisition, ShortFeedThrows) {
  const signal::IqBuffer tiny(5000, kFs, 0.0);
  EXPECT_THROW(acquire(tiny, 1, ReceiverConfig{}), DomainError);
}

TrackingChannel channel_on(int prn, double code_phase, double doppler) {
  TrackingChannel ch;
  ch.prn_id = prn;
  ch.state = ChannelState::Acquiring;
  ch.start(code_phase / kChipRate * kFs, doppler, kFs);
  return ch;
}

TEST(Tracking, StationarySignalCodePhaseDrift) {
  const ReceiverConfig cfg;
  const double phase = 511.3;
  auto ch = channel_on(17, phase, 0.0);
  const auto feed = feed_of({spec_at(17, kAmp, phase, 0.0)}, 1.2, 1.0, 4);
  ch = track_update(ch, feed, cfg);
  EXPECT_EQ(ch.state, ChannelState::Tracking);
  EXPECT_TRUE(std::isfinite(ch.cn0_est));
  EXPECT_NEAR(ch.cn0_est, 40.0, 3.0);
  EXPECT_LT(chip_distance(ch.code_phase, phase), 0.01);
  EXPECT_LT(std::abs(ch.doppler), 5.0);
}

TEST(Tracking, FollowsDoppler) {
  const ReceiverConfig cfg;
  auto ch = channel_on(2, 80.0, 2100.0);
  const auto feed = feed_of({spec_at(2, kAmp, 80.0, 2000.0)}, 1.0, 1.0, 5);
  ch = track_update(ch, feed, cfg);
  EXPECT_EQ(ch.state, ChannelState::Tracking);
  EXPECT_NEAR(ch.doppler, 2000.0, 10.0);
}

TEST(Tracking, RemovedSignalIsLostWithinTimeout) {
  ReceiverConfig cfg;
  auto ch = channel_on(6, 300.0, 0.0);
  ch = track_update(ch, feed_of({spec_at(6, kAmp, 300.0, 0.0)}, 1.0, 1.0, 6), cfg);
  ASSERT_EQ(ch.state, ChannelState::Tracking);
  // Noise only from t = 1 s, processed in 0.1 s steps.
  double lost_at = -1.0;
  for (int k = 0; k < 40 && lost_at < 0; ++k) {
    const double t = 1.0 + 0.1 * k;
    ch = track_update(ch, feed_of({}, 0.1, 1.0, 100 + static_cast<std::uint64_t>(k), t), cfg);
    if (ch.state == ChannelState::Lost) lost_at = t + 0.1;
  }
  ASSERT_GT(lost_at, 0.0);
  EXPECT_GT(lost_at - 1.0, cfg.loss_timeout_s);
  // Estimator window (20 blocks of 5 ms) plus the timeout plus one step.
  EXPECT_LE(lost_at - 1.0, cfg.loss_timeout_s + 0.1 + 0.1 + 1e-9);
}

TEST(Tracking, JammedChannelIsLost) {
  ReceiverConfig cfg;
  auto ch = channel_on(6, 300.0, 0.0);
  ch = track_update(ch, feed_of({spec_at(6, kAmp, 300.0, 0.0)}, 1.0, 1.0, 6), cfg);
  ASSERT_EQ(ch.state, ChannelState::Tracking);
  // Signal still present, noise raised 30 dB.
  ch = track_update(ch, feed_of({spec_at(6, kAmp, 300.0, 0.0)}, 3.0, 1000.0, 7, 1.0), cfg);
  EXPECT_EQ(ch.state, ChannelState::Lost);
}

TEST(Tracking, RateMismatchThrows) {
  auto ch = channel_on(6, 300.0, 0.0);
  const signal::IqBuffer other(4092, 2.046e6, 0.0);
  EXPECT_THROW(track_update(ch, other, ReceiverConfig{}), DomainError);
}

TEST(Pseudorange, NoTrackingChannelsGiveEmptyList) {
  EXPECT_TRUE(extract_pseudoranges({}, 1000.0, kFs).empty());
  std::vector<TrackingChannel> idle(3);
  EXPECT_TRUE(extract_pseudoranges(idle, 1000.0, kFs).empty());
}

// Receiver-level fixtures: six static satellites above Fulda, searched by PRN.
scene::SatelliteOrbitSpec overhead(int prn, double lat_deg, double lon_deg) {
  const double r = 26'560'000.0;
  scene::SatelliteOrbitSpec s;
  s.prn_id = prn;
  s.motion = scene::EcefPosition{r * std::cos(lat_deg * kDeg) * std::cos(lon_deg * kDeg),
                                 r * std::cos(lat_deg * kDeg) * std::sin(lon_deg * kDeg), r * std::sin(lat_deg * kDeg)};
  return s;
}

scene::Scene fulda_scene() {
  scene::Scene sc;
  sc.sampler_location = scene::geodetic_to_ecef({59.4036 * kDeg, 17.9494 * kDeg, 30.0});
  sc.victim_location = scene::geodetic_to_ecef({50.5558 * kDeg, 9.6808 * kDeg, 260.0});
  sc.nav_seed = 21;
  sc.satellites = {overhead(3, 55, 14), overhead(7, 80, 20), overhead(11, 50, 45),
                   overhead(19, 35, 5), overhead(22, 60, -20), overhead(26, 40, 25)};
  return sc;
}

ReceiverConfig fulda_config() {
  ReceiverConfig cfg;
  cfg.search_prns = {3, 7, 11, 19, 22, 26};
  return cfg;
}

// Streams `duration` seconds rendered at `antenna`, delayed by `delay`.
Receiver run_receiver(const scene::Scene& sc, const scene::EcefPosition& antenna, double duration, double delay,
                      const ReceiverConfig& cfg) {
  Receiver rx(cfg, sc, kFs);
  const double step = 0.5;
  for (int k = 0; k * step < duration - 1e-9; ++k) {
    const double t = k * step;
    auto block = scene::render_antenna_feed(sc, antenna, {1, 0, 0, Band::L1}, {t - delay, step, kFs}, nullptr,
                                            nullptr, signal::derive_seed(8, "rx-test", static_cast<std::uint64_t>(k)));
    block.start_time = t;
    rx.process(std::span(&block, 1));
  }
  return rx;
}

double light_time_range(const scene::SatelliteOrbitSpec& sat, const scene::EcefPosition& rx, double t) {
  double range = scene::geometric_range(sat.position_at(t), rx);
  for (int i = 0; i < 5; ++i) range = scene::geometric_range(sat.position_at(t - range / kSpeedOfLight), rx);
  return range;
}

class ReceiverEndToEnd : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    scene_ = new scene::Scene(fulda_scene());
    clean_ = new Receiver(run_receiver(*scene_, scene_->victim_location, 15.0, 0.0, fulda_config()));
  }
  static void TearDownTestSuite() {
    delete clean_;
    delete scene_;
  }
  static scene::Scene* scene_;
  static Receiver* clean_;
};

scene::Scene* ReceiverEndToEnd::scene_ = nullptr;
Receiver* ReceiverEndToEnd::clean_ = nullptr;

TEST_F(ReceiverEndToEnd, CleanFeedFixesAtTruth) {
  const auto& log = clean_->pvt_log();
  ASSERT_FALSE(log.empty());
  const auto& last = log.back().solution;
  ASSERT_TRUE(last.fix);
  EXPECT_EQ(last.used_satellites.size(), 6u);
  EXPECT_LT((last.position - scene_->victim_location).norm(), 50.0);
  EXPECT_LT(std::abs(last.clock_bias), 50.0 / kSpeedOfLight);
  for (const auto& rec : log) {
    if (rec.solution.fix) {
      EXPECT_GE(rec.solution.used_satellites.size(), 4u);
      EXPECT_TRUE(std::isfinite(rec.solution.residual_rms));
    }
  }
}

TEST_F(ReceiverEndToEnd, PseudorangesMatchForwardModel) {
  const auto channels = clean_->channels(Band::L1);
  const double index = 15.0 * kFs;
  const auto prs = extract_pseudoranges(channels, index, kFs);
  ASSERT_EQ(prs.size(), 6u);
  const double half_chip = kSpeedOfLight * 0.5 / kChipRate;  // 146.5 m
  for (const auto& pr : prs) {
    const auto* sat = scene_->find(pr.prn_id);
    ASSERT_NE(sat, nullptr);
    EXPECT_LT(std::abs(pr.pseudorange - light_time_range(*sat, scene_->victim_location, 15.0)), half_chip) << pr.prn_id;
  }
}

TEST_F(ReceiverEndToEnd, LostChannelsAreExcluded) {
  auto channels = clean_->channels(Band::L1);
  ASSERT_EQ(channels.size(), 6u);  // one per searched PRN
  std::vector<TrackingChannel> four;
  for (const auto& ch : channels) {
    if (ch.state == ChannelState::Tracking && four.size() < 4) four.push_back(ch);
  }
  ASSERT_EQ(four.size(), 4u);
  four[1].state = ChannelState::Lost;
  EXPECT_EQ(extract_pseudoranges(four, 15.0 * kFs, kFs).size(), 3u);
}

TEST_F(ReceiverEndToEnd, TransitionsFollowTheStateMachine) {
  const ReceiverConfig cfg = fulda_config();
  for (const auto& tr : clean_->transitions()) {
    const auto edge = std::make_pair(tr.from, tr.to);
    const bool allowed = edge == std::make_pair(ChannelState::Idle, ChannelState::Acquiring) ||
                         edge == std::make_pair(ChannelState::Acquiring, ChannelState::Tracking) ||
                         edge == std::make_pair(ChannelState::Tracking, ChannelState::Lost) ||
                         edge == std::make_pair(ChannelState::Lost, ChannelState::Acquiring);
    EXPECT_TRUE(allowed) << to_string(tr.from) << "->" << to_string(tr.to);
    if (tr.to == ChannelState::Lost) {
      EXPECT_GT(tr.lock_timer, cfg.loss_timeout_s);
    }
  }
}

TEST(ReceiverReplay, DelayedRemoteFeedFixesAtRemoteSiteWithShiftedClock) {
  // The victim hears only the sky recorded 1115 km away, 5 ms late.
  const auto sc = fulda_scene();
  const double delay = 0.005;
  const auto rx = run_receiver(sc, sc.sampler_location, 15.0, delay, fulda_config());
  const auto& log = rx.pvt_log();
  ASSERT_FALSE(log.empty());
  const auto& last = log.back().solution;
  ASSERT_TRUE(last.fix);
  EXPECT_LT((last.position - sc.sampler_location).norm(), 150.0);
  EXPECT_NEAR(last.clock_bias, delay, 150.0 / kSpeedOfLight);
}

// PVT against a forward model that only evaluates ranges.
struct Geometry {
  scene::EcefPosition truth;
  double bias = 0.0;
  std::vector<PvtMeasurement> meas;
};

Geometry random_geometry(std::mt19937_64& gen, int count, double noise_m = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  Geometry g;
  const double lat = std::asin(2 * u(gen) - 1);
  const double lon = 2 * std::numbers::pi * u(gen);
  g.truth = scene::geodetic_to_ecef({lat, lon, 1000.0 * u(gen)});
  g.bias = 1e-3 * (2 * u(gen) - 1);
  const auto up = g.truth * (1.0 / g.truth.norm());
  while (static_cast<int>(g.meas.size()) < count) {
    scene::EcefPosition dir{n(gen), n(gen), n(gen)};
    dir = dir * (1.0 / dir.norm());
    if (scene::dot(dir, up) < 0.3) continue;
    // Satellite at GPS radius along `dir` from the receiver.
    const double b = scene::dot(g.truth, dir);
    const double s = -b + std::sqrt(b * b - g.truth.norm() * g.truth.norm() + 26.56e6 * 26.56e6);
    const auto sat = g.truth + dir * s;
    const double rho = scene::geometric_range(sat, g.truth) + kSpeedOfLight * g.bias + noise_m * n(gen);
    g.meas.push_back({static_cast<int>(g.meas.size()) + 1, Band::L1, sat, rho});
  }
  return g;
}

TEST(Pvt, RecoversTruthOnHundredGeometries) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_geometry(gen, 6);
    const auto sol = solve_pvt(g.meas);
    ASSERT_TRUE(sol.fix) << trial << " " << to_string(sol.reason);
    EXPECT_LT((sol.position - g.truth).norm(), 1e-3) << trial;
    EXPECT_LT(std::abs(sol.clock_bias - g.bias), 1e-12) << trial;
    EXPECT_LT(sol.residual_rms, 1e-3) << trial;
    EXPECT_EQ(sol.used_satellites.size(), 6u);
  }
}

TEST(Pvt, CommonDelayOnlyMovesClockBias) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_geometry(gen, 7);
    const auto base = solve_pvt(g.meas);
    for (const double dt : {1e-6, 5e-3, 0.264}) {
      auto shifted = g.meas;
      for (auto& m : shifted) m.pseudorange += kSpeedOfLight * dt;
      const auto sol = solve_pvt(shifted);
      ASSERT_TRUE(sol.fix);
      EXPECT_LT((sol.position - base.position).norm(), 1e-3);
      EXPECT_NEAR(sol.clock_bias - base.clock_bias, dt, 1e-12);
    }
  }
}

TEST(Pvt, ThreeMeasurementsAreInsufficient) {
  std::mt19937_64 gen(9);
  const auto g = random_geometry(gen, 3);
  const auto sol = solve_pvt(g.meas);
  EXPECT_FALSE(sol.fix);
  EXPECT_EQ(sol.reason, NoFixReason::InsufficientSatellites);
  EXPECT_EQ(solve_pvt({}).reason, NoFixReason::InsufficientSatellites);
}

TEST(Pvt, DegenerateGeometryIsBadGeometry) {
  std::mt19937_64 gen(10);
  auto g = random_geometry(gen, 5);
  for (auto& m : g.meas) {
    m.sat_pos = g.meas.front().sat_pos;
    m.pseudorange = g.meas.front().pseudorange;
  }
  const auto sol = solve_pvt(g.meas);
  EXPECT_FALSE(sol.fix);
  EXPECT_EQ(sol.reason, NoFixReason::BadGeometry);
}

TEST(Pvt, TranslationEquivariance) {
  std::mt19937_64 gen(11);
  const scene::EcefPosition shift{12345.0, -54321.0, 2.0e5};
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_geometry(gen, 6);
    auto moved = g.meas;
    for (auto& m : moved) m.sat_pos = m.sat_pos + shift;
    const auto a = solve_pvt(g.meas, {g.truth, 0.0});
    const auto b = solve_pvt(moved, {g.truth + shift, 0.0});
    ASSERT_TRUE(a.fix && b.fix);
    EXPECT_LT((b.position - (a.position + shift)).norm(), 1e-3);
    EXPECT_NEAR(a.clock_bias, b.clock_bias, 1e-12);
  }
}

TEST(Pvt, DroppingASatelliteDoesNotImproveAccuracyOnAverage) {
  std::mt19937_64 gen(12);
  double err6 = 0.0;
  double err5 = 0.0;
  const int trials = 300;
  for (int trial = 0; trial < trials; ++trial) {
    const auto g = random_geometry(gen, 6, 5.0);
    const auto full = solve_pvt(g.meas);
    const std::vector<PvtMeasurement> fewer(g.meas.begin(), g.meas.end() - 1);
    const auto reduced = solve_pvt(fewer);
    ASSERT_TRUE(full.fix && reduced.fix);
    err6 += (full.position - g.truth).norm();
    err5 += (reduced.position - g.truth).norm();
  }
  EXPECT_GT(err5 / trials, err6 / trials);
}

}  // namespace
}  // namespace relaylab::receiver
