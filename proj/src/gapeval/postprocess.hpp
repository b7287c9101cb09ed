#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gapeval/types.hpp"

namespace gapeval {

enum class SmoothScope { full, gaps_only };

SmoothScope smooth_scope_from_name(const std::string& name);

/// Least-squares Savitzky-Golay convolution weights for the window center.
/// Exposed for verification; smooth_savgol uses the same fit.
std::vector<double> savgol_central_coefficients(std::size_t window, std::size_t order);

/// Savitzky-Golay smoothing per coordinate trajectory. Interior frames use
/// the central convolution; the first and last half-windows evaluate the
/// polynomial fitted to the terminal window instead, so trajectories that are
/// polynomials of degree <= order pass through unchanged everywhere.
MarkerSequence smooth_savgol(const MarkerSequence& seq, std::size_t window, std::size_t order);

/// Reconstruction post-pass: first restores observed entries from the raw
/// sequence bit-exactly, then (window > 0) smooths, either the whole sequence
/// or only the entries the mask marks missing.
MarkerSequence postprocess(const MarkerSequence& pred, const MarkerSequence& original,
                           const ObservationMask& mask, std::size_t window, std::size_t order,
                           SmoothScope scope = SmoothScope::full);

} // namespace gapeval
