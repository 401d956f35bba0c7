#pragma once

#include "lsamarl/sim/world.hpp"
#include "lsamarl/tensor/tensor.hpp"

namespace lsamarl::sim {

// N x X local view of one CAV. Columns: b, p, x, y, vx, vy [, cos, sin].
using ObservationMatrix = Tensor;

namespace feature {
inline constexpr std::size_t kPresent = 0;
inline constexpr std::size_t kPriority = 1;
inline constexpr std::size_t kX = 2;
inline constexpr std::size_t kY = 3;
inline constexpr std::size_t kVx = 4;
inline constexpr std::size_t kVy = 5;
inline constexpr std::size_t kCos = 6;
inline constexpr std::size_t kSin = 7;
}  // namespace feature

/// Row 0 is the observer: b = 1, zero relative position, absolute speed over
/// v_max in the velocity slots. Rows 1.. are the nearest vehicles within the
/// sensing radius (ties by lower id), with positions relative to the observer
/// divided by the radius and velocities relative to the observer divided by
/// v_max, clamped to [-1, 1]. Unused rows are zero. The configured feature
/// mask is applied last. A crashed or exited agent observes all zeros.
/// Throws std::invalid_argument for an id that is not a CAV.
ObservationMatrix observe(const WorldState& state, const ScenarioConfig& cfg, int agent_id);

// Zeroes the columns hidden by `mask` in place.
void apply_feature_mask(ObservationMatrix& obs, FeatureMask mask);

}  // namespace lsamarl::sim
