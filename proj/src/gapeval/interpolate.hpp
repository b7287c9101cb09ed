#pragma once

#include "gapeval/types.hpp"

namespace gapeval {

/// Fills every gap with a cubic Hermite segment per coordinate, anchored at
/// the last observation before and the first observation after the gap.
/// Endpoint slopes come from one-sided first differences against the nearest
/// observed neighbour on the far side (zero slope when there is none).
/// Observed entries pass through bit-exact. Every marker must be observed at
/// frames 0 and T-1; extrapolation is not supported.
MarkerSequence interpolate_gaps(const MarkerSequence& seq);

} // namespace gapeval
