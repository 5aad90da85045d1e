#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "relaylab/constants.hpp"
#include "relaylab/scene/geometry.hpp"

namespace relaylab::receiver {

enum class NoFixReason : std::uint8_t { None, InsufficientSatellites, BadGeometry, Diverged };

std::string_view to_string(NoFixReason r);

struct PvtMeasurement {
  int prn_id = 0;
  Band band = Band::L1;
  scene::EcefPosition sat_pos;
  double pseudorange = 0.0;  // m
};

struct PvtSolution {
  scene::EcefPosition position;
  double clock_bias = 0.0;    // s
  double residual_rms = 0.0;  // m
  std::vector<int> used_satellites;  // PRN per measurement used
  bool fix = false;
  NoFixReason reason = NoFixReason::None;
  int iterations = 0;
};

struct PvtGuess {
  scene::EcefPosition position;
  double clock_bias = 0.0;  // s
};

inline constexpr int kPvtMaxIterations = 20;
inline constexpr double kPvtTolerance = 1e-4;  // m

/// Gauss-Newton on rho_i = |sat_i - x| + c * b. Stops when the position update
/// falls below 1e-4 m or after 20 iterations (then Diverged). Fewer than four
/// measurements give InsufficientSatellites; a rank-deficient or badly
/// conditioned geometry matrix gives BadGeometry.
PvtSolution solve_pvt(std::span<const PvtMeasurement> measurements, const PvtGuess& initial_guess = {});

}  // namespace relaylab::receiver
