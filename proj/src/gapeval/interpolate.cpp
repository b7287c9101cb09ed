#include "gapeval/interpolate.hpp"

#include <string>

#include "gapeval/error.hpp"

namespace gapeval {

namespace {

struct Anchor {
    double value[3];
    double slope[3];  // cm per frame
    std::size_t frame;
};

Anchor make_anchor(const MarkerSequence& seq, std::size_t m, std::size_t at, std::size_t far_side) {
    Anchor a;
    a.frame = at;
    Vec3 p = seq.position(at, m);
    for (int c = 0; c < 3; ++c) {
        a.value[c] = p[c];
        a.slope[c] = 0.0;
    }
    if (far_side != at) {
        Vec3 q = seq.position(far_side, m);
        double dt = static_cast<double>(at) - static_cast<double>(far_side);
        for (int c = 0; c < 3; ++c) a.slope[c] = (p[c] - q[c]) / dt;
    }
    return a;
}

} // namespace

MarkerSequence interpolate_gaps(const MarkerSequence& seq) {
    const std::size_t T = seq.frames();
    const std::size_t M = seq.markers();
    if (T < 2) throw_data("interpolation needs at least two frames");
    for (std::size_t m = 0; m < M; ++m)
        if (!seq.present(0, m) || !seq.present(T - 1, m))
            throw_data("marker '" + seq.marker_ids()[m] +
                       "' absent at the first or last frame, cannot interpolate");

    MarkerSequence out = seq;
    for (std::size_t m = 0; m < M; ++m) {
        std::size_t t = 1;
        while (t < T) {
            if (seq.present(t, m)) {
                ++t;
                continue;
            }
            std::size_t gap_start = t;
            while (!seq.present(t, m)) ++t;  // terminates: frame T-1 is observed
            std::size_t gap_end = t;         // first observed frame after the gap

            std::size_t a = gap_start - 1;
            std::size_t b = gap_end;
            std::size_t b_next = b;
            for (std::size_t u = b + 1; u < T; ++u)
                if (seq.present(u, m)) {
                    b_next = u;
                    break;
                }
            std::size_t a_prev = a;
            if (a > 0) {
                for (std::size_t u = a; u-- > 0;)
                    if (seq.present(u, m)) {
                        a_prev = u;
                        break;
                    }
            }

            Anchor left = make_anchor(seq, m, a, a_prev);
            Anchor right = make_anchor(seq, m, b, b_next);
            double span = static_cast<double>(b - a);
            for (std::size_t u = gap_start; u < gap_end; ++u) {
                double s = (static_cast<double>(u) - static_cast<double>(a)) / span;
                double s2 = s * s;
                double s3 = s2 * s;
                double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
                double h10 = s3 - 2.0 * s2 + s;
                double h01 = -2.0 * s3 + 3.0 * s2;
                double h11 = s3 - s2;
                for (std::size_t c = 0; c < 3; ++c)
                    out.at(u, m, c) = h00 * left.value[c] + h10 * span * left.slope[c] +
                                      h01 * right.value[c] + h11 * span * right.slope[c];
                out.set_present(u, m, true);
            }
            ++t;
        }
    }
    return out;
}

} // namespace gapeval
