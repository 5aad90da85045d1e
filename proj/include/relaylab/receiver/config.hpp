#pragma once

#include <optional>
#include <vector>

#include "relaylab/constants.hpp"
#include "relaylab/scene/geometry.hpp"

namespace relaylab::receiver {

// Noise-only peak metric over 3200 searches (tools/calibrate_threshold):
// p99 3.45, max 3.98. The margin above p99 keeps false acquisitions rare
// with 32 searches per tick.
inline constexpr double kDefaultAcquisitionThreshold = 4.0;

struct ReceiverConfig {
  double acquisition_threshold = kDefaultAcquisitionThreshold;
  double doppler_span_hz = 5000.0;  // search +/- span
  double doppler_bin_hz = 250.0;
  int coherent_ms = 1;
  int noncoherent_sums = 10;

  double cn0_floor_dbhz = 25.0;
  double loss_timeout_s = 2.0;
  double reacquisition_period_s = 1.0;
  double verify_time_s = 0.2;       // pull-in time before an acquisition is confirmed

  double dll_gain = 0.02;           // fraction of the measured code error applied per epoch
  double fll_gain = 0.02;
  double pull_in_dll_gain = 0.3;
  double fll_pull_in_gain = 0.3;
  double pull_in_s = 0.1;

  double power_on_time = 0.0;       // receiver switched on at this scenario time
  double clock_offset_s = 0.0;      // local clock minus true time
  double pvt_interval_s = 1.0;
  double time_search_window_s = 60.0;  // transmit-time search below local time

  std::vector<Band> bands{Band::L1};
  std::vector<int> search_prns;     // empty: all 32

  void validate() const;
};

/// Warm-start assistance. Without it the receiver searches every PRN and
/// starts its solution from the Earth's centre.
struct ReceiverAssist {
  std::optional<scene::EcefPosition> position;
};

}  // namespace relaylab::receiver
