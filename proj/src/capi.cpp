#include "mocapgapeval.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "gapeval/corrupt.hpp"
#include "gapeval/error.hpp"
#include "gapeval/interpolate.hpp"
#include "gapeval/marker_csv.hpp"
#include "gapeval/metrics.hpp"
#include "gapeval/postprocess.hpp"
#include "gapeval/preprocess.hpp"
#include "gapeval/reconstruct.hpp"
#include "gapeval/ridge.hpp"
#include "gapeval/rng.hpp"
#include "gapeval/skeleton_json.hpp"
#include "gapeval/stats.hpp"
#include "gapeval/synth.hpp"
#include "gapeval/types.hpp"

#ifndef MGE_VERSION
#define MGE_VERSION "0.0.0"
#endif

struct mge_seq {
    gapeval::MarkerSequence v;
};
struct mge_mask {
    gapeval::ObservationMask v;
};
struct mge_skel {
    gapeval::SkeletonConfig v;
};
struct mge_model {
    gapeval::RidgeDenoiser v;
};
struct mge_report {
    gapeval::MetricReport v;
};
struct mge_ratings {
    gapeval::RatingsTable v;
};
struct mge_scores {
    gapeval::StimulusScores v;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
mge_status guarded(F&& body) noexcept {
    try {
        body();
        return MGE_OK;
    } catch (const gapeval::Error& e) {
        g_last_error = e.what();
        switch (e.kind()) {
            case gapeval::ErrorKind::usage:
                return MGE_ERR_USAGE;
            case gapeval::ErrorKind::data:
                return MGE_ERR_DATA;
            case gapeval::ErrorKind::numeric:
                return MGE_ERR_NUMERIC;
        }
        return MGE_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MGE_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return MGE_ERR_INTERNAL;
    }
}

void require(const void* p, const char* name) {
    if (p == nullptr) gapeval::throw_usage(std::string(name) + " must not be NULL");
}

char* heap_copy(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

gapeval::SkeletonConfig build_layout(std::size_t actors, const std::string& layout) {
    if (layout == "full") return gapeval::full_skeleton(actors);
    if (layout == "minimal") return gapeval::minimal_skeleton(actors);
    gapeval::throw_usage("unknown skeleton layout '" + layout + "' (expected full or minimal)");
}

} // namespace

extern "C" {

const char* mge_version(void) { return MGE_VERSION; }

const char* mge_last_error(void) { return g_last_error.c_str(); }

void mge_string_free(char* s) { std::free(s); }

/* ---- sequences ------------------------------------------------------- */

mge_status mge_markers_read(const char* path, double fps_override, mge_seq** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        std::optional<double> fps;
        if (fps_override > 0.0) fps = fps_override;
        *out = new mge_seq{gapeval::read_markers(path, fps)};
    });
}

mge_status mge_markers_write(const mge_seq* seq, const char* path) {
    return guarded([&] {
        require(seq, "seq");
        require(path, "path");
        gapeval::write_markers(seq->v, path);
    });
}

void mge_seq_free(mge_seq* seq) { delete seq; }

size_t mge_seq_frames(const mge_seq* seq) { return seq ? seq->v.frames() : 0; }

size_t mge_seq_markers(const mge_seq* seq) { return seq ? seq->v.markers() : 0; }

double mge_seq_fps(const mge_seq* seq) { return seq ? seq->v.fps() : 0.0; }

const char* mge_seq_marker_id(const mge_seq* seq, size_t m) {
    if (seq == nullptr || m >= seq->v.markers()) return nullptr;
    return seq->v.marker_ids()[m].c_str();
}

mge_status mge_seq_value(const mge_seq* seq, size_t frame, size_t marker, size_t coord,
                         double* value, int* present) {
    return guarded([&] {
        require(seq, "seq");
        if (frame >= seq->v.frames() || marker >= seq->v.markers() || coord >= 3)
            gapeval::throw_usage("sequence index out of range");
        if (value != nullptr) *value = seq->v.at(frame, marker, coord);
        if (present != nullptr) *present = seq->v.present(frame, marker) ? 1 : 0;
    });
}

/* ---- skeleton configs ------------------------------------------------ */

mge_status mge_skel_read(const char* path, mge_skel** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new mge_skel{gapeval::read_skeleton(path)};
    });
}

mge_status mge_skel_write(const mge_skel* skel, const char* path) {
    return guarded([&] {
        require(skel, "skel");
        require(path, "path");
        gapeval::write_skeleton(skel->v, path);
    });
}

mge_status mge_skel_build(size_t actors, const char* layout, mge_skel** out) {
    return guarded([&] {
        require(layout, "layout");
        require(out, "out");
        *out = new mge_skel{build_layout(actors, layout)};
    });
}

size_t mge_skel_actors(const mge_skel* skel) { return skel ? skel->v.actors.size() : 0; }

void mge_skel_free(mge_skel* skel) { delete skel; }

/* ---- observation masks ------------------------------------------------ */

mge_status mge_mask_read(const char* path, mge_mask** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new mge_mask{gapeval::read_mask(path)};
    });
}

mge_status mge_mask_write(const mge_mask* mask, const mge_seq* ids_from, const char* path) {
    return guarded([&] {
        require(mask, "mask");
        require(ids_from, "ids_from");
        require(path, "path");
        gapeval::write_mask(mask->v, ids_from->v.marker_ids(), path);
    });
}

void mge_mask_free(mge_mask* mask) { delete mask; }

size_t mge_mask_frames(const mge_mask* mask) { return mask ? mask->v.frames() : 0; }

size_t mge_mask_markers(const mge_mask* mask) { return mask ? mask->v.markers() : 0; }

int mge_mask_observed(const mge_mask* mask, size_t frame, size_t marker) {
    if (mask == nullptr || frame >= mask->v.frames() || marker >= mask->v.markers()) return 0;
    return mask->v.observed(frame, marker) ? 1 : 0;
}

mge_status mge_mask_sample(const mge_seq* seq, const char* mode, double p, size_t count,
                           size_t duration, const char* part, uint64_t seed,
                           const mge_skel* skel, mge_mask** out) {
    return guarded([&] {
        require(seq, "seq");
        require(mode, "mode");
        require(out, "out");
        gapeval::GapSpec spec;
        spec.mode = gapeval::gap_mode_from_name(mode);
        spec.p = p;
        spec.count = count;
        spec.duration = duration;
        spec.seed = seed;
        if (part != nullptr) spec.part = gapeval::body_part_from_name(part);
        if (spec.mode == gapeval::GapMode::bodypart) {
            require(skel, "skel");
            require(part, "part");
            *out = new mge_mask{
                gapeval::sample_mask(seq->v.frames(), seq->v.marker_ids(), spec, skel->v)};
        } else {
            *out = new mge_mask{gapeval::sample_mask(seq->v.frames(), seq->v.markers(), spec)};
        }
    });
}

/* ---- corruption and schedules ----------------------------------------- */

mge_status mge_curriculum(int epoch, double n_start, double n_rate, double d_start, double d_rate,
                          size_t frames, size_t markers, size_t* number, size_t* duration) {
    return guarded([&] {
        require(number, "number");
        require(duration, "duration");
        gapeval::CurriculumParams params;
        params.n_start = n_start;
        params.n_rate = n_rate;
        params.d_start = d_start;
        params.d_rate = d_rate;
        params.validate();
        auto [n, d] = gapeval::curriculum(epoch, params, frames, markers);
        *number = n;
        *duration = d;
    });
}

mge_status mge_derive_seed(uint64_t seed, uint64_t a, uint64_t b, uint64_t* out) {
    return guarded([&] {
        require(out, "out");
        *out = gapeval::Rng::derive_seed(seed, a, b);
    });
}

mge_status mge_noise_sigma(int epoch, double c, double* sigma) {
    return guarded([&] {
        require(sigma, "sigma");
        if (c < 0.0) gapeval::throw_usage("noise cap c must be non-negative");
        *sigma = gapeval::noise_sigma(epoch, c);
    });
}

mge_status mge_apply_mask(const mge_seq* seq, const mge_mask* mask, mge_seq** out) {
    return guarded([&] {
        require(seq, "seq");
        require(mask, "mask");
        require(out, "out");
        *out = new mge_seq{gapeval::apply_mask(seq->v, mask->v)};
    });
}

mge_status mge_add_masked_noise(const mge_seq* seq, const mge_mask* mask, double sigma,
                                uint64_t seed, mge_seq** out) {
    return guarded([&] {
        require(seq, "seq");
        require(mask, "mask");
        require(out, "out");
        *out = new mge_seq{gapeval::add_masked_noise(seq->v, mask->v, sigma, seed)};
    });
}

mge_status mge_add_global_noise(const mge_seq* seq, double sigma, uint64_t seed, mge_seq** out) {
    return guarded([&] {
        require(seq, "seq");
        require(out, "out");
        *out = new mge_seq{gapeval::add_global_noise(seq->v, sigma, seed)};
    });
}

mge_status mge_interpolate_gaps(const mge_seq* seq, mge_seq** out) {
    return guarded([&] {
        require(seq, "seq");
        require(out, "out");
        *out = new mge_seq{gapeval::interpolate_gaps(seq->v)};
    });
}

/* ---- synthetic motion -------------------------------------------------- */

mge_status mge_synth(const mge_skel* skel, size_t actors, double seconds, double fps,
                     double amplitude, double freq_lo, double freq_hi, uint64_t seed,
                     mge_seq** out) {
    return guarded([&] {
        require(out, "out");
        gapeval::SynthSpec spec;
        spec.actors = actors;
        spec.seconds = seconds;
        spec.fps = fps;
        if (amplitude >= 0.0) spec.amplitude = amplitude;
        if (freq_lo > 0.0) spec.freq_lo = freq_lo;
        if (freq_hi > 0.0) spec.freq_hi = freq_hi;
        spec.seed = seed;
        if (skel != nullptr) {
            *out = new mge_seq{gapeval::generate(spec, skel->v)};
        } else {
            gapeval::SkeletonConfig def = gapeval::full_skeleton(actors);
            *out = new mge_seq{gapeval::generate(spec, def)};
        }
    });
}

mge_status mge_augment(const mge_seq* seq, const mge_skel* skel, const char* mode, mge_seq** out) {
    return guarded([&] {
        require(seq, "seq");
        require(skel, "skel");
        require(mode, "mode");
        require(out, "out");
        *out = new mge_seq{gapeval::augment(seq->v, skel->v, gapeval::augment_from_name(mode))};
    });
}

/* ---- reconstruction ---------------------------------------------------- */

mge_status mge_train_ridge(const mge_seq* const* clean, size_t n_clean, const mge_skel* skel,
                           double n_start, double n_rate, double d_start, double d_rate, double c,
                           double lambda, int epochs, size_t window_radius, double reg,
                           uint64_t seed, mge_model** out) {
    return guarded([&] {
        require(clean, "clean");
        require(skel, "skel");
        require(out, "out");
        std::vector<gapeval::MarkerSequence> seqs;
        seqs.reserve(n_clean);
        for (size_t i = 0; i < n_clean; ++i) {
            require(clean[i], "clean[i]");
            seqs.push_back(clean[i]->v);
        }
        gapeval::CurriculumParams params;
        params.n_start = n_start;
        params.n_rate = n_rate;
        params.d_start = d_start;
        params.d_rate = d_rate;
        params.c = c;
        params.lambda = lambda;
        *out = new mge_model{
            gapeval::train_ridge(seqs, skel->v, params, epochs, window_radius, reg, seed)};
    });
}

mge_status mge_ridge_save(const mge_model* model, const char* path) {
    return guarded([&] {
        require(model, "model");
        require(path, "path");
        gapeval::save_ridge(model->v, path);
    });
}

mge_status mge_ridge_load(const char* path, mge_model** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new mge_model{gapeval::load_ridge(path)};
    });
}

void mge_model_free(mge_model* model) { delete model; }

mge_status mge_fill_interp(const mge_seq* corrupted, const mge_mask* mask, mge_seq** out) {
    return guarded([&] {
        require(corrupted, "corrupted");
        require(mask, "mask");
        require(out, "out");
        *out = new mge_seq{gapeval::fill_interpolation(corrupted->v, mask->v)};
    });
}

mge_status mge_fill_ridge(const mge_model* model, const mge_seq* corrupted, const mge_mask* mask,
                          const mge_skel* skel, mge_seq** out) {
    return guarded([&] {
        require(model, "model");
        require(corrupted, "corrupted");
        require(mask, "mask");
        require(skel, "skel");
        require(out, "out");
        *out = new mge_seq{gapeval::fill_ridge(model->v, corrupted->v, mask->v, skel->v)};
    });
}

mge_status mge_fill_hips_outwards(const mge_model* const models[4], const mge_seq* corrupted,
                                  const mge_mask* mask, const mge_skel* skel, mge_seq** out) {
    return guarded([&] {
        require(models, "models");
        require(corrupted, "corrupted");
        require(mask, "mask");
        require(skel, "skel");
        require(out, "out");

        gapeval::InterpolationReconstructor fallback;
        std::array<std::unique_ptr<gapeval::RidgeReconstructor>, 4> owned;
        std::array<const gapeval::Reconstructor*, 4> parts{};
        for (size_t i = 0; i < 4; ++i) {
            if (models[i] != nullptr) {
                owned[i] = std::make_unique<gapeval::RidgeReconstructor>(models[i]->v);
                parts[i] = owned[i].get();
            } else {
                parts[i] = &fallback;
            }
        }
        *out = new mge_seq{gapeval::fill_hips_outwards(parts, corrupted->v, mask->v, skel->v)};
    });
}

mge_status mge_postprocess(const mge_seq* pred, const mge_seq* raw, const mge_mask* mask,
                           size_t smoothing_window, size_t order, const char* scope,
                           mge_seq** out) {
    return guarded([&] {
        require(pred, "pred");
        require(raw, "raw");
        require(mask, "mask");
        require(out, "out");
        gapeval::SmoothScope s =
            scope ? gapeval::smooth_scope_from_name(scope) : gapeval::SmoothScope::full;
        *out = new mge_seq{
            gapeval::postprocess(pred->v, raw->v, mask->v, smoothing_window, order, s)};
    });
}

/* ---- metrics ----------------------------------------------------------- */

mge_status mge_metric(const mge_seq* pred, const mge_seq* gt, const mge_mask* mask,
                      const mge_skel* skel, const char* metric, const char* norm, int scoped,
                      double* value) {
    return guarded([&] {
        require(pred, "pred");
        require(metric, "metric");
        require(value, "value");
        std::string name = metric;
        gapeval::NormMode nm = norm ? gapeval::norm_mode_from_name(norm)
                                    : gapeval::NormMode::per_coordinate;
        if (scoped != 0 && name != "rmse")
            gapeval::throw_usage("scope 'missing' only applies to rmse");

        if (name == "rmse") {
            require(gt, "gt");
            const gapeval::ObservationMask* scope_mask = nullptr;
            if (scoped != 0) {
                require(mask, "mask");
                scope_mask = &mask->v;
            }
            *value = gapeval::rmse(pred->v, gt->v, nm, scope_mask);
        } else if (name == "vd_gt") {
            require(gt, "gt");
            *value = gapeval::vd_gt(pred->v, gt->v, nm);
        } else if (name == "vd") {
            *value = gapeval::vd(pred->v, nm);
        } else if (name == "bdp_gt") {
            require(gt, "gt");
            require(skel, "skel");
            *value = gapeval::bdp_gt(pred->v, gt->v, skel->v);
        } else if (name == "bdp") {
            require(skel, "skel");
            *value = gapeval::bdp(pred->v, skel->v);
        } else {
            gapeval::throw_usage("unknown metric '" + name + "'");
        }
    });
}

mge_status mge_training_loss(const mge_seq* pred, const mge_seq* gt, const mge_mask* missing,
                             double lambda, double* total, double* position, double* velocity) {
    return guarded([&] {
        require(pred, "pred");
        require(gt, "gt");
        require(missing, "missing");
        gapeval::LossBreakdown loss = gapeval::training_loss(pred->v, gt->v, missing->v, lambda);
        if (total != nullptr) *total = loss.total;
        if (position != nullptr) *position = loss.position;
        if (velocity != nullptr) *velocity = loss.velocity;
    });
}

/* ---- metric reports ----------------------------------------------------- */

mge_status mge_report_new(mge_report** out) {
    return guarded([&] {
        require(out, "out");
        *out = new mge_report{};
    });
}

mge_status mge_report_read(const char* path, mge_report** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new mge_report{gapeval::read_metric_report(path)};
    });
}

mge_status mge_report_add(mge_report* report, const char* stimulus, const char* metric,
                          double value, const char* norm) {
    return guarded([&] {
        require(report, "report");
        require(stimulus, "stimulus");
        require(metric, "metric");
        require(norm, "norm");
        report->v.add(stimulus, metric, value, norm);
    });
}

mge_status mge_report_write(const mge_report* report, const char* path) {
    return guarded([&] {
        require(report, "report");
        require(path, "path");
        gapeval::write_metric_report(report->v, path);
    });
}

mge_status mge_report_append(const mge_report* report, const char* path) {
    return guarded([&] {
        require(report, "report");
        require(path, "path");
        gapeval::append_metric_report(report->v, path);
    });
}

size_t mge_report_count(const mge_report* report) { return report ? report->v.rows.size() : 0; }

mge_status mge_report_row(const mge_report* report, size_t i, const char** stimulus,
                          const char** metric, double* value, const char** norm) {
    return guarded([&] {
        require(report, "report");
        if (i >= report->v.rows.size()) gapeval::throw_usage("report row index out of range");
        const auto& row = report->v.rows[i];
        if (stimulus != nullptr) *stimulus = row.stimulus_id.c_str();
        if (metric != nullptr) *metric = row.metric.c_str();
        if (value != nullptr) *value = row.value;
        if (norm != nullptr) *norm = row.norm_mode.c_str();
    });
}

void mge_report_free(mge_report* report) { delete report; }

/* ---- ratings and reliability ------------------------------------------- */

mge_status mge_ratings_read(const char* path, mge_ratings** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new mge_ratings{gapeval::read_ratings(path)};
    });
}

void mge_ratings_free(mge_ratings* ratings) { delete ratings; }

mge_status mge_scores_compute(const mge_ratings* ratings, mge_scores** out) {
    return guarded([&] {
        require(ratings, "ratings");
        require(out, "out");
        *out = new mge_scores{gapeval::aggregate(ratings->v)};
    });
}

void mge_scores_free(mge_scores* scores) { delete scores; }

size_t mge_scores_count(const mge_scores* scores) { return scores ? scores->v.rows.size() : 0; }

const char* mge_scores_id(const mge_scores* scores, size_t i) {
    if (scores == nullptr || i >= scores->v.rows.size()) return nullptr;
    return scores->v.rows[i].stimulus_id.c_str();
}

double mge_scores_mean(const mge_scores* scores, size_t i) {
    if (scores == nullptr || i >= scores->v.rows.size()) return 0.0;
    return scores->v.rows[i].mean;
}

size_t mge_scores_ratings(const mge_scores* scores, size_t i) {
    if (scores == nullptr || i >= scores->v.rows.size()) return 0;
    return scores->v.rows[i].count;
}

size_t mge_scores_categories(const mge_scores* scores) {
    return scores ? scores->v.categories.size() : 0;
}

int mge_scores_category(const mge_scores* scores, size_t k) {
    if (scores == nullptr || k >= scores->v.categories.size()) return 0;
    return scores->v.categories[k];
}

double mge_scores_fraction(const mge_scores* scores, size_t i, size_t k) {
    if (scores == nullptr || i >= scores->v.rows.size()) return 0.0;
    if (k >= scores->v.rows[i].fractions.size()) return 0.0;
    return scores->v.rows[i].fractions[k];
}

mge_status mge_kendall(const double* metric_values, const double* rating_means, size_t n,
                       double* tau, double* p_value) {
    return guarded([&] {
        require(metric_values, "metric_values");
        require(rating_means, "rating_means");
        std::vector<double> x(metric_values, metric_values + n);
        std::vector<double> y(rating_means, rating_means + n);
        gapeval::TauResult result = gapeval::kendall_tau(x, y);
        if (tau != nullptr) *tau = result.tau;
        if (p_value != nullptr) *p_value = result.p_value;
    });
}

mge_status mge_alpha(const mge_ratings* ratings, double* alpha) {
    return guarded([&] {
        require(ratings, "ratings");
        require(alpha, "alpha");
        *alpha = gapeval::krippendorff_alpha(ratings->v);
    });
}

mge_status mge_alpha_bootstrap(const mge_ratings* ratings, size_t resamples, uint64_t seed,
                               double* lo, double* hi) {
    return guarded([&] {
        require(ratings, "ratings");
        require(lo, "lo");
        require(hi, "hi");
        gapeval::BootstrapInterval ci = gapeval::alpha_bootstrap(ratings->v, resamples, seed);
        *lo = ci.lo;
        *hi = ci.hi;
    });
}

mge_status mge_correlate(const mge_report* report, const mge_ratings* ratings, size_t resamples,
                         uint64_t seed, const char* out_csv, char** warnings) {
    return guarded([&] {
        require(report, "report");
        require(ratings, "ratings");
        require(out_csv, "out_csv");
        gapeval::CorrelationResult result =
            gapeval::correlate_metrics(report->v, ratings->v, resamples, seed);
        gapeval::write_correlation_csv(result.rows, out_csv);
        if (warnings != nullptr) {
            if (result.warnings.empty()) {
                *warnings = nullptr;
            } else {
                std::string joined;
                for (const auto& w : result.warnings) {
                    if (!joined.empty()) joined += '\n';
                    joined += w;
                }
                *warnings = heap_copy(joined);
            }
        }
    });
}

} // extern "C"
