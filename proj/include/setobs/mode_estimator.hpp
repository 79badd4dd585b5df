#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "setobs/errors.hpp"
#include "setobs/numeric.hpp"
#include "setobs/observer_bank.hpp"

namespace setobs {

struct ModeSet {
  std::set<std::size_t> surviving;
  std::map<std::size_t, long> eliminated_at;

  static ModeSet all(std::size_t Q) {
    ModeSet s;
    for (std::size_t q = 1; q <= Q; ++q) s.surviving.insert(q);
    return s;
  }
};

/// What one surviving mode reports at step k.
struct ModeStepData {
  BallEstimate state;
  BallEstimate input;
  double residual_norm = 0.0;
  double threshold = 0.0;
};

struct EstimateSnapshot {
  long k = 0;
  ModeSet mode_set;
  std::map<std::size_t, ModeStepData> per_mode;
  std::vector<BallEstimate> fused_states;
  std::vector<BallEstimate> fused_inputs;
};

/// Drops every surviving mode whose residual norm strictly exceeds its
/// threshold.
inline ModeSet eliminate_step(const ModeSet& prev, const std::map<std::size_t, ModeStepData>& data,
                              long k) {
  ModeSet next = prev;
  for (std::size_t q : prev.surviving) {
    auto it = data.find(q);
    if (it == data.end()) throw ConfigError("eliminate_step: no data for mode " + std::to_string(q));
    if (it->second.residual_norm > it->second.threshold) {
      next.surviving.erase(q);
      next.eliminated_at[q] = k;
    }
  }
  if (next.surviving.empty()) {
    throw ModelMismatch("every mode was eliminated", k);
  }
  return next;
}

/// The estimate is the union of the surviving balls, kept as a list.
inline EstimateSnapshot fuse(EstimateSnapshot snap) {
  if (snap.mode_set.surviving.empty()) throw ModelMismatch("no surviving mode to fuse", snap.k);
  snap.fused_states.clear();
  snap.fused_inputs.clear();
  for (std::size_t q : snap.mode_set.surviving) {
    const auto& d = snap.per_mode.at(q);
    snap.fused_states.push_back(d.state);
    snap.fused_inputs.push_back(d.input);
  }
  return snap;
}

/// One ball containing every ball in the list: centered at the radius-weighted
/// centroid (plain centroid if all radii are zero). Looser than the union.
inline BallEstimate bounding_ball(const std::vector<BallEstimate>& balls) {
  if (balls.empty()) throw ConfigError("bounding_ball: empty list");
  double wsum = 0.0;
  for (const auto& b : balls) wsum += b.radius;
  const bool weighted = wsum > 0.0 && std::isfinite(wsum);
  Vector c = Vector::Zero(balls.front().center.size());
  for (const auto& b : balls) {
    const double w = weighted ? b.radius / wsum : 1.0 / static_cast<double>(balls.size());
    c += w * b.center;
  }
  double r = 0.0;
  for (const auto& b : balls) r = std::max(r, (b.center - c).norm() + b.radius);
  return {c, r};
}

}  // namespace setobs
