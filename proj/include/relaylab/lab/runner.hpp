#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relaylab/adversary/event_log.hpp"
#include "relaylab/adversary/sequencer.hpp"
#include "relaylab/lab/scenario.hpp"
#include "relaylab/receiver/receiver.hpp"
#include "relaylab/spectral/detectors.hpp"
#include "relaylab/spectral/psd.hpp"
#include "relaylab/wire/link.hpp"

namespace relaylab::lab {

/// Number of consecutive fixes inside the capture radius that declare capture.
inline constexpr int kCaptureStreak = 10;

/// One wideband monitor snapshot.
struct MonitorSnapshot {
  double t = 0.0;
  adversary::PhaseKind phase = adversary::PhaseKind::Idle;
  spectral::PowerSpectrum spectrum;
  double jamming_score = 0.0;    // dB vs. baseline
  double replay_contrast = 0.0;  // dB, best candidate band
  bool baseline = false;         // part of the clean baseline average
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  double horizon = 0.0;

  std::optional<double> time_to_first_fix;  // s, scenario time
  std::optional<double> time_to_capture;    // first fix of the capturing streak
  std::optional<double> final_fix_time;
  std::optional<double> final_position_error_vs_victim_truth;   // m
  std::optional<double> final_position_error_vs_sampler_truth;  // m
  int fixes = 0;
  double stall_seconds = 0.0;
  std::vector<spectral::SpectralAlarm> alarms;

  // Frame and sample accounting: captured = delivered + lost_to_stall + dropped_by_link.
  std::uint64_t frames_captured = 0;
  std::uint64_t frames_delivered = 0;
  std::uint64_t frames_lost_to_stall = 0;
  std::uint64_t frames_dropped_by_link = 0;
  std::uint64_t frames_in_flight = 0;  // delivered, arriving after the horizon
  std::uint64_t samples_captured = 0;
  std::uint64_t samples_delivered = 0;
  std::uint64_t samples_lost = 0;
  double replay_gap_seconds = 0.0;     // completed underruns after playout start
  double longest_replay_gap = 0.0;

  bool captured() const { return time_to_capture.has_value(); }
};

struct RunOptions {
  /// Live mode: wall-clock seconds per scenario second (1 = real time).
  double live_pace = 1.0;
};

/// Everything a run produces, in memory. write_run_directory turns it into files.
struct RunResult {
  Scenario scenario;
  RunReport report;
  std::vector<receiver::PvtRecord> pvt;
  std::vector<receiver::ChannelLogRow> channel_log;
  std::vector<receiver::StateTransition> transitions;
  std::vector<receiver::AcquisitionEvent> acquisitions;
  adversary::EventLog capture_log;
  adversary::EventLog replay_log;
  wire::DeliverySchedule link;
  std::optional<spectral::PowerSpectrum> baseline;
  std::vector<MonitorSnapshot> snapshots;
};

/// Executes sampler -> link -> forwarder -> combiner -> receiver over
/// [0, horizon). Virtual mode is deterministic in (scenario, seed); Live mode
/// moves the frames over loopback TCP at wall-clock pace.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Capture verdict and summary figures from a PVT log.
void summarize_fixes(const Scenario& scenario, const std::vector<receiver::PvtRecord>& pvt, RunReport& report);

/// Replay-band candidates for the spike detector at the monitor rate.
std::vector<spectral::FrequencyBand> replay_candidate_bands(const Scenario& scenario);

}  // namespace relaylab::lab
