#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "relaylab/adversary/jammer.hpp"

namespace relaylab::adversary {

enum class PhaseKind : std::uint8_t { Idle, JamAll, ReplayL1_JamOthers, RejamPulse, ReplayOnly, Stop };

std::string_view to_string(PhaseKind k);
std::optional<PhaseKind> phase_from_string(std::string_view s);

struct AttackPhase {
  PhaseKind kind = PhaseKind::Idle;
  double start = 0.0;
  double duration = 0.0;

  double end() const { return start + duration; }
};

struct AttackScript {
  std::vector<AttackPhase> phases;

  /// Throws DomainError unless phases have positive duration, are time
  /// ordered and non-overlapping, and every ReplayL1_JamOthers phase either
  /// starts at t = 0 or follows a JamAll phase.
  void validate() const;
  double end_time() const;
};

struct ControlOutputs {
  PhaseKind phase = PhaseKind::Idle;
  bool jam_l1 = false;
  bool jam_l2 = false;
  bool replay = false;

  bool jam(Band b) const { return b == Band::L1 ? jam_l1 : jam_l2; }
  bool operator==(const ControlOutputs&) const = default;
};

ControlOutputs outputs_for(PhaseKind kind);

/// Piecewise-constant controls at time t; Idle outside every phase.
ControlOutputs attack_sequencer(const AttackScript& script, double t);

/// Merged intervals during which the jammer is on for `band`.
std::vector<JamInterval> jam_intervals(const AttackScript& script, Band band);

/// Merged intervals during which the replay output is on.
std::vector<std::pair<double, double>> replay_intervals(const AttackScript& script);

}  // namespace relaylab::adversary
