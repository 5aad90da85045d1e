#include "relaylab/adversary/sequencer.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "relaylab/errors.hpp"

namespace relaylab::adversary {
namespace {

constexpr std::array<std::pair<PhaseKind, std::string_view>, 6> kNames{{
    {PhaseKind::Idle, "Idle"},
    {PhaseKind::JamAll, "JamAll"},
    {PhaseKind::ReplayL1_JamOthers, "ReplayL1_JamOthers"},
    {PhaseKind::RejamPulse, "RejamPulse"},
    {PhaseKind::ReplayOnly, "ReplayOnly"},
    {PhaseKind::Stop, "Stop"},
}};

template <typename Pred>
std::vector<std::pair<double, double>> merged(const AttackScript& script, Pred on) {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : script.phases) {
    if (!on(outputs_for(p.kind))) continue;
    if (!out.empty() && p.start <= out.back().second) {
      out.back().second = std::max(out.back().second, p.end());
    } else {
      out.emplace_back(p.start, p.end());
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(PhaseKind k) {
  for (const auto& [kind, name] : kNames) {
    if (kind == k) return name;
  }
  return "Idle";
}

std::optional<PhaseKind> phase_from_string(std::string_view s) {
  for (const auto& [kind, name] : kNames) {
    if (name == s) return kind;
  }
  return std::nullopt;
}

void AttackScript::validate() const {
  bool seen_jam_all = false;
  double prev_end = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const auto& p = phases[i];
    if (!(p.duration > 0.0) || !std::isfinite(p.duration) || !(p.start >= 0.0)) {
      throw DomainError("AttackScript: phase " + std::to_string(i) + " needs start >= 0 and duration > 0");
    }
    if (i > 0 && p.start < prev_end) {
      throw DomainError("AttackScript: phase " + std::to_string(i) + " overlaps or precedes the previous phase");
    }
    if (p.kind == PhaseKind::ReplayL1_JamOthers && !seen_jam_all && p.start != 0.0) {
      throw DomainError("AttackScript: ReplayL1_JamOthers must start at t = 0 or follow a JamAll phase");
    }
    seen_jam_all = seen_jam_all || p.kind == PhaseKind::JamAll;
    prev_end = p.end();
  }
}

double AttackScript::end_time() const { return phases.empty() ? 0.0 : phases.back().end(); }

ControlOutputs outputs_for(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::JamAll:
      return {kind, true, true, false};
    case PhaseKind::ReplayL1_JamOthers:
      return {kind, false, true, true};
    case PhaseKind::RejamPulse:
      return {kind, true, true, false};
    case PhaseKind::ReplayOnly:
      return {kind, false, false, true};
    case PhaseKind::Idle:
    case PhaseKind::Stop:
      break;
  }
  return {kind, false, false, false};
}

ControlOutputs attack_sequencer(const AttackScript& script, double t) {
  for (const auto& p : script.phases) {
    if (t >= p.start && t < p.end()) return outputs_for(p.kind);
  }
  return outputs_for(PhaseKind::Idle);
}

std::vector<JamInterval> jam_intervals(const AttackScript& script, Band band) {
  std::vector<JamInterval> out;
  for (const auto& [a, b] : merged(script, [band](const ControlOutputs& c) { return c.jam(band); })) {
    out.push_back({band, a, b});
  }
  return out;
}

std::vector<std::pair<double, double>> replay_intervals(const AttackScript& script) {
  return merged(script, [](const ControlOutputs& c) { return c.replay; });
}

}  // namespace relaylab::adversary
