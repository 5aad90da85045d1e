#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "relaylab/adversary/forwarder.hpp"
#include "relaylab/adversary/sampler.hpp"
#include "relaylab/adversary/sequencer.hpp"
#include "relaylab/errors.hpp"
#include "relaylab/receiver/config.hpp"
#include "relaylab/scene/geometry.hpp"
#include "relaylab/wire/frame.hpp"
#include "relaylab/wire/link.hpp"

namespace relaylab::lab {

enum class RunMode : std::uint8_t { Virtual, Live };

std::string_view to_string(RunMode m);

/// Which known position, if any, the victim receiver starts from.
enum class AssistSource : std::uint8_t { None, Victim, Sampler };

std::string_view to_string(AssistSource a);

/// Wideband spectrum monitor at the victim antenna.
struct MonitorConfig {
  bool enabled = true;
  double sample_rate = 4 * kDefaultSampleRate;  // integer multiple of the stream rate
  double snapshot_s = 0.05;
  double period_s = 1.0;
  std::uint32_t nfft = 4096;
  double baseline_end = 10.0;  // snapshots before this time form the clean baseline
};

/// Raised by the parser and validator; what() carries "file:line: message".
class ScenarioError : public FormatError {
 public:
  using FormatError::FormatError;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  double horizon = 60.0;
  RunMode mode = RunMode::Virtual;
  double capture_radius = 1000.0;  // m

  scene::Scene scene;
  wire::StreamConfig stream;
  double sampler_full_scale = 4.0;
  double sampler_clock_skew = 0.0;
  wire::LinkModel link;
  double jitter_buffer = 0.25;  // s
  double replay_gain = 2.0;     // linear amplitude
  std::vector<Band> jam_bands{Band::L1, Band::L2};
  double jam_power = 1000.0;    // linear, relative to the noise floor
  adversary::AttackScript script;
  receiver::ReceiverConfig receiver;
  AssistSource assist = AssistSource::None;
  MonitorConfig monitor;

  /// Node configurations derived from the fields above. The jammer power is
  /// expressed at the noise reference rate.
  adversary::SamplerNode sampler_node() const;
  adversary::ForwarderNode forwarder_node() const;
  receiver::ReceiverAssist receiver_assist() const;

  /// Cross-field checks; throws DomainError naming the offending section.
  void validate() const;
};

/// Parses the scenario tree format (see README). Unknown keys, missing
/// sections and constraint violations raise ScenarioError with the line of
/// the offending entry. `origin` names the source in diagnostics.
Scenario parse_scenario_text(std::string_view text, std::string_view origin = "<scenario>");
Scenario parse_scenario(const std::filesystem::path& path);

/// Fully resolved form: every default spelled out, positions as ECEF.
/// parse_scenario_text(serialize_scenario(s)) reproduces s.
std::string serialize_scenario(const Scenario& s);

}  // namespace relaylab::lab
