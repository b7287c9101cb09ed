#include "gapeval/postprocess.hpp"

#include <Eigen/Dense>

#include "gapeval/error.hpp"

namespace gapeval {

SmoothScope smooth_scope_from_name(const std::string& name) {
    if (name == "all") return SmoothScope::full;
    if (name == "gaps") return SmoothScope::gaps_only;
    throw_usage("unknown smoothing scope '" + name + "' (expected all or gaps)");
}

namespace {

void check_savgol_params(std::size_t window, std::size_t order) {
    if (window < 3 || window % 2 == 0) throw_usage("smoothing window must be odd and at least 3");
    if (order >= window) throw_usage("polynomial order must be smaller than the window");
}

/// Projection of a window of samples onto degree-`order` polynomials:
/// row r gives the fitted value at window position r.
Eigen::MatrixXd savgol_projection(std::size_t window, std::size_t order) {
    const auto n = static_cast<Eigen::Index>(window);
    const auto cols = static_cast<Eigen::Index>(order + 1);
    Eigen::MatrixXd vmd(n, cols);
    double half = static_cast<double>(window - 1) / 2.0;
    for (Eigen::Index r = 0; r < n; ++r) {
        double xv = static_cast<double>(r) - half;
        double p = 1.0;
        for (Eigen::Index c = 0; c < cols; ++c) {
            vmd(r, c) = p;
            p *= xv;
        }
    }
    return vmd * (vmd.transpose() * vmd).ldlt().solve(vmd.transpose());
}

} // namespace

std::vector<double> savgol_central_coefficients(std::size_t window, std::size_t order) {
    check_savgol_params(window, order);
    Eigen::MatrixXd proj = savgol_projection(window, order);
    Eigen::Index mid = static_cast<Eigen::Index>(window / 2);
    std::vector<double> coeffs(window);
    for (std::size_t i = 0; i < window; ++i)
        coeffs[i] = proj(mid, static_cast<Eigen::Index>(i));
    return coeffs;
}

MarkerSequence smooth_savgol(const MarkerSequence& seq, std::size_t window, std::size_t order) {
    check_savgol_params(window, order);
    const std::size_t T = seq.frames();
    if (T < window) throw_data("sequence shorter than the smoothing window");
    if (!seq.fully_present()) throw_data("smoothing needs a fully present sequence");

    Eigen::MatrixXd proj = savgol_projection(window, order);
    const std::size_t h = window / 2;
    const std::size_t M = seq.markers();

    MarkerSequence out = seq;
    std::vector<double> column(T);
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t c = 0; c < 3; ++c) {
            for (std::size_t t = 0; t < T; ++t) column[t] = seq.at(t, m, c);
            for (std::size_t t = 0; t < T; ++t) {
                std::size_t start;
                Eigen::Index row;
                if (t < h) {
                    start = 0;
                    row = static_cast<Eigen::Index>(t);
                } else if (t + h >= T) {
                    start = T - window;
                    row = static_cast<Eigen::Index>(t - (T - window));
                } else {
                    start = t - h;
                    row = static_cast<Eigen::Index>(h);
                }
                double acc = 0.0;
                for (std::size_t i = 0; i < window; ++i)
                    acc += proj(row, static_cast<Eigen::Index>(i)) * column[start + i];
                out.at(t, m, c) = acc;
            }
        }
    return out;
}

MarkerSequence postprocess(const MarkerSequence& pred, const MarkerSequence& original,
                           const ObservationMask& mask, std::size_t window, std::size_t order,
                           SmoothScope scope) {
    if (pred.frames() != original.frames() || pred.marker_ids() != original.marker_ids())
        throw_data("prediction and raw sequence have different shapes");
    mask.require_shape(pred);
    if (!pred.fully_present()) throw_data("prediction must be fully present");

    MarkerSequence out = pred;
    for (std::size_t t = 0; t < out.frames(); ++t)
        for (std::size_t m = 0; m < out.markers(); ++m) {
            if (!mask.observed(t, m)) continue;
            if (!original.present(t, m))
                throw_data("mask says marker '" + out.marker_ids()[m] +
                           "' is observed at frame " + std::to_string(t) +
                           " but the raw value is absent");
            out.set_position(t, m, original.position(t, m));
        }

    if (window == 0) return out;
    MarkerSequence smoothed = smooth_savgol(out, window, order);
    if (scope == SmoothScope::full) return smoothed;

    for (std::size_t t = 0; t < out.frames(); ++t)
        for (std::size_t m = 0; m < out.markers(); ++m)
            if (mask.missing(t, m)) out.set_position(t, m, smoothed.position(t, m));
    return out;
}

} // namespace gapeval
