#include "gapeval/metrics.hpp"

#include <cmath>

#include "gapeval/error.hpp"

namespace gapeval {

NormMode norm_mode_from_name(const std::string& name) {
    if (name == "per_coordinate") return NormMode::per_coordinate;
    if (name == "per_marker") return NormMode::per_marker;
    throw_usage("unknown norm mode '" + name + "' (expected per_coordinate or per_marker)");
}

const char* norm_mode_name(NormMode mode) {
    switch (mode) {
        case NormMode::per_coordinate: return "per_coordinate";
        case NormMode::per_marker: return "per_marker";
    }
    throw_usage("invalid norm mode");
}

namespace {

void require_same_shape(const MarkerSequence& a, const MarkerSequence& b) {
    if (a.frames() != b.frames() || a.markers() != b.markers())
        throw_data("sequences have different shapes (" + std::to_string(a.frames()) + "x" +
                   std::to_string(a.markers()) + " vs " + std::to_string(b.frames()) + "x" +
                   std::to_string(b.markers()) + ")");
    if (a.marker_ids() != b.marker_ids()) throw_data("sequences have different marker ids");
    if (a.fps() != b.fps()) throw_data("sequences have different frame rates");
}

void require_fully_present(const MarkerSequence& seq, const char* what) {
    if (!seq.fully_present())
        throw_data(std::string(what) + " must be fully present");
}

/// Mean of squared residuals: per_coordinate divides the summed squared
/// 3-vector norms by 3x the slot count, per_marker by the slot count.
double rms_from(double sum_sq, std::size_t slots, NormMode norm) {
    if (slots == 0) throw_numeric("metric scope selects no entries");
    double denom = static_cast<double>(slots) * (norm == NormMode::per_coordinate ? 3.0 : 1.0);
    return std::sqrt(sum_sq / denom);
}

} // namespace

BoneLengthSeries bone_lengths(const MarkerSequence& seq, const SkeletonConfig& skel) {
    auto index = skel.resolve(seq);
    const std::size_t T = seq.frames();

    std::vector<std::vector<std::size_t>> ends_a, ends_b;
    BoneLengthSeries series;
    series.frames = T;
    for (const auto& bone : skel.bones) {
        series.bone_names.push_back(bone.name);
        auto cols = [&](const std::vector<std::string>& ids) {
            std::vector<std::size_t> out;
            out.reserve(ids.size());
            for (const auto& id : ids) out.push_back(index.at(id));
            return out;
        };
        ends_a.push_back(cols(bone.end_a));
        ends_b.push_back(cols(bone.end_b));
    }

    series.lengths.resize(T * skel.bones.size());
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t d = 0; d < skel.bones.size(); ++d) {
            auto centroid = [&](const std::vector<std::size_t>& cols) {
                double c[3] = {0.0, 0.0, 0.0};
                for (std::size_t m : cols) {
                    if (!seq.present(t, m))
                        throw_data("marker '" + seq.marker_ids()[m] + "' of bone '" +
                                   skel.bones[d].name + "' absent at frame " + std::to_string(t));
                    for (int k = 0; k < 3; ++k) c[k] += seq.at(t, m, k);
                }
                for (int k = 0; k < 3; ++k) c[k] /= static_cast<double>(cols.size());
                return std::array<double, 3>{c[0], c[1], c[2]};
            };
            auto ca = centroid(ends_a[d]);
            auto cb = centroid(ends_b[d]);
            double dx = ca[0] - cb[0];
            double dy = ca[1] - cb[1];
            double dz = ca[2] - cb[2];
            series.lengths[t * skel.bones.size() + d] = std::sqrt(dx * dx + dy * dy + dz * dz);
        }
    }
    return series;
}

double rmse(const MarkerSequence& pred, const MarkerSequence& gt, NormMode norm,
            const ObservationMask* scope) {
    require_same_shape(pred, gt);
    if (scope) scope->require_shape(pred);

    double sum_sq = 0.0;
    std::size_t slots = 0;
    for (std::size_t t = 0; t < pred.frames(); ++t)
        for (std::size_t m = 0; m < pred.markers(); ++m) {
            if (scope && scope->observed(t, m)) continue;
            if (!pred.present(t, m) || !gt.present(t, m))
                throw_data("scored entry absent at frame " + std::to_string(t) + ", marker '" +
                           pred.marker_ids()[m] + "'");
            for (std::size_t c = 0; c < 3; ++c) {
                double d = pred.at(t, m, c) - gt.at(t, m, c);
                sum_sq += d * d;
            }
            ++slots;
        }
    return rms_from(sum_sq, slots, norm);
}

double vd_gt(const MarkerSequence& pred, const MarkerSequence& gt, NormMode norm) {
    require_same_shape(pred, gt);
    if (pred.frames() < 2) throw_data("velocity distance needs at least two frames");
    require_fully_present(pred, "prediction");
    require_fully_present(gt, "ground truth");

    double sum_sq = 0.0;
    for (std::size_t t = 0; t + 1 < pred.frames(); ++t)
        for (std::size_t m = 0; m < pred.markers(); ++m)
            for (std::size_t c = 0; c < 3; ++c) {
                double vp = pred.at(t + 1, m, c) - pred.at(t, m, c);
                double vg = gt.at(t + 1, m, c) - gt.at(t, m, c);
                double d = vp - vg;
                sum_sq += d * d;
            }
    return rms_from(sum_sq, (pred.frames() - 1) * pred.markers(), norm);
}

double vd(const MarkerSequence& pred, NormMode norm) {
    if (pred.frames() < 3) throw_data("self velocity distance needs at least three frames");
    require_fully_present(pred, "prediction");

    double sum_sq = 0.0;
    for (std::size_t t = 0; t + 2 < pred.frames(); ++t)
        for (std::size_t m = 0; m < pred.markers(); ++m)
            for (std::size_t c = 0; c < 3; ++c) {
                double v0 = pred.at(t + 1, m, c) - pred.at(t, m, c);
                double v1 = pred.at(t + 2, m, c) - pred.at(t + 1, m, c);
                double d = v1 - v0;
                sum_sq += d * d;
            }
    return rms_from(sum_sq, (pred.frames() - 2) * pred.markers(), norm);
}

double bdp_gt(const MarkerSequence& pred, const MarkerSequence& gt, const SkeletonConfig& skel) {
    require_same_shape(pred, gt);
    BoneLengthSeries lp = bone_lengths(pred, skel);
    BoneLengthSeries lg = bone_lengths(gt, skel);

    double sum_sq = 0.0;
    for (std::size_t i = 0; i < lp.lengths.size(); ++i) {
        double d = lp.lengths[i] - lg.lengths[i];
        sum_sq += d * d;
    }
    if (lp.lengths.empty()) throw_numeric("skeleton config defines no bones");
    return std::sqrt(sum_sq / static_cast<double>(lp.lengths.size()));
}

double bdp(const MarkerSequence& pred, const SkeletonConfig& skel) {
    if (pred.frames() < 2) throw_data("bone-length drift needs at least two frames");
    BoneLengthSeries lp = bone_lengths(pred, skel);
    if (lp.bones() == 0) throw_numeric("skeleton config defines no bones");

    double sum_sq = 0.0;
    for (std::size_t t = 0; t + 1 < lp.frames; ++t)
        for (std::size_t d = 0; d < lp.bones(); ++d) {
            double diff = lp.at(t + 1, d) - lp.at(t, d);
            sum_sq += diff * diff;
        }
    return std::sqrt(sum_sq / static_cast<double>((lp.frames - 1) * lp.bones()));
}

LossBreakdown training_loss(const MarkerSequence& pred, const MarkerSequence& gt,
                            const ObservationMask& miss, double lambda) {
    require_same_shape(pred, gt);
    miss.require_shape(pred);
    if (pred.frames() < 2) throw_data("training loss needs at least two frames");
    require_fully_present(pred, "prediction");
    require_fully_present(gt, "ground truth");
    if (lambda < 0.0) throw_usage("lambda must be non-negative");

    const std::size_t T = pred.frames();
    double pos_sq = 0.0;
    double vel_sq = 0.0;
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t m = 0; m < pred.markers(); ++m) {
            if (!miss.missing(t, m)) continue;
            for (std::size_t c = 0; c < 3; ++c) {
                double d = pred.at(t, m, c) - gt.at(t, m, c);
                pos_sq += d * d;
                if (t > 0) {
                    double vp = pred.at(t, m, c) - pred.at(t - 1, m, c);
                    double vg = gt.at(t, m, c) - gt.at(t - 1, m, c);
                    double dv = vp - vg;
                    vel_sq += dv * dv;
                }
            }
        }

    LossBreakdown out;
    out.position = pos_sq / static_cast<double>(T);
    out.velocity = vel_sq / static_cast<double>(T - 1);
    out.total = out.position + lambda * out.velocity;
    return out;
}

} // namespace gapeval
