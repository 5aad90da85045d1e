#include "relaylab/receiver/pvt.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace relaylab::receiver {
namespace {

constexpr double kMaxCondition = 1e8;

}  // namespace

std::string_view to_string(NoFixReason r) {
  switch (r) {
    case NoFixReason::None:
      return "None";
    case NoFixReason::InsufficientSatellites:
      return "InsufficientSatellites";
    case NoFixReason::BadGeometry:
      return "BadGeometry";
    case NoFixReason::Diverged:
      return "Diverged";
  }
  return "None";
}

PvtSolution solve_pvt(std::span<const PvtMeasurement> measurements, const PvtGuess& initial_guess) {
  PvtSolution sol;
  sol.position = initial_guess.position;
  sol.clock_bias = initial_guess.clock_bias;
  if (measurements.size() < 4) {
    sol.reason = NoFixReason::InsufficientSatellites;
    return sol;
  }

  const auto n = static_cast<Eigen::Index>(measurements.size());
  Eigen::Vector3d x(initial_guess.position.x, initial_guess.position.y, initial_guess.position.z);
  double cb = kSpeedOfLight * initial_guess.clock_bias;
  Eigen::MatrixXd h(n, 4);
  Eigen::VectorXd r(n);

  auto linearize = [&] {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& m = measurements[static_cast<std::size_t>(i)];
      const Eigen::Vector3d s(m.sat_pos.x, m.sat_pos.y, m.sat_pos.z);
      const Eigen::Vector3d los = s - x;
      const double range = los.norm();
      h.row(i) << -los.transpose() / range, 1.0;
      r(i) = m.pseudorange - (range + cb);
    }
  };

  bool converged = false;
  for (int it = 1; it <= kPvtMaxIterations; ++it) {
    linearize();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (!(sv(3) > 0.0) || sv(0) / sv(3) > kMaxCondition) {
      sol.reason = NoFixReason::BadGeometry;
      sol.iterations = it;
      return sol;
    }
    const Eigen::Vector4d dx = svd.solve(r);
    if (!dx.allFinite()) break;
    x += dx.head<3>();
    cb += dx(3);
    sol.iterations = it;
    if (dx.head<3>().norm() < kPvtTolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    sol.reason = NoFixReason::Diverged;
    return sol;
  }

  linearize();
  sol.position = {x(0), x(1), x(2)};
  sol.clock_bias = cb / kSpeedOfLight;
  sol.residual_rms = std::sqrt(r.squaredNorm() / static_cast<double>(n));
  if (!std::isfinite(sol.residual_rms)) {
    sol.reason = NoFixReason::Diverged;
    return sol;
  }
  for (const auto& m : measurements) sol.used_satellites.push_back(m.prn_id);
  sol.fix = true;
  return sol;
}

}  // namespace relaylab::receiver
