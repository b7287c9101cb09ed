/* C interface to the mocap gap-evaluation toolkit.
 *
 * Conventions:
 *   - Every function returns an mge_status; outputs go through pointers.
 *   - On failure, mge_last_error() describes the problem (thread-local).
 *   - Handles are opaque and freed with their mge_*_free function.
 *   - const char* values returned through accessors stay owned by their
 *     handle and are valid until that handle is freed or mutated.
 */
#ifndef MOCAPGAPEVAL_H
#define MOCAPGAPEVAL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mge_status {
    MGE_OK = 0,
    MGE_ERR_INTERNAL = 1,
    MGE_ERR_USAGE = 2,
    MGE_ERR_DATA = 3,
    MGE_ERR_NUMERIC = 4
} mge_status;

typedef struct mge_seq mge_seq;         /* marker sequence */
typedef struct mge_mask mge_mask;       /* observation mask */
typedef struct mge_skel mge_skel;       /* skeleton config */
typedef struct mge_model mge_model;     /* ridge denoiser */
typedef struct mge_report mge_report;   /* per-stimulus metric rows */
typedef struct mge_ratings mge_ratings; /* subjective rating rows */
typedef struct mge_scores mge_scores;   /* aggregated per-stimulus scores */

const char* mge_version(void);

/* Message for the most recent failing call on this thread; never NULL. */
const char* mge_last_error(void);

void mge_string_free(char* s);

/* ---- sequences ------------------------------------------------------- */

/* fps_override > 0 forces the frame rate; pass 0 to infer from the file. */
mge_status mge_markers_read(const char* path, double fps_override, mge_seq** out);
mge_status mge_markers_write(const mge_seq* seq, const char* path);
void mge_seq_free(mge_seq* seq);

size_t mge_seq_frames(const mge_seq* seq);
size_t mge_seq_markers(const mge_seq* seq);
double mge_seq_fps(const mge_seq* seq);
const char* mge_seq_marker_id(const mge_seq* seq, size_t m);
mge_status mge_seq_value(const mge_seq* seq, size_t frame, size_t marker, size_t coord,
                         double* value, int* present);

/* ---- skeleton configs ------------------------------------------------ */

mge_status mge_skel_read(const char* path, mge_skel** out);
mge_status mge_skel_write(const mge_skel* skel, const char* path);
/* layout: "full" (63 markers per actor) or "minimal" (12 per actor). */
mge_status mge_skel_build(size_t actors, const char* layout, mge_skel** out);
size_t mge_skel_actors(const mge_skel* skel);
void mge_skel_free(mge_skel* skel);

/* ---- observation masks ------------------------------------------------ */

mge_status mge_mask_read(const char* path, mge_mask** out);
mge_status mge_mask_write(const mge_mask* mask, const mge_seq* ids_from, const char* path);
void mge_mask_free(mge_mask* mask);

size_t mge_mask_frames(const mge_mask* mask);
size_t mge_mask_markers(const mge_mask* mask);
int mge_mask_observed(const mge_mask* mask, size_t frame, size_t marker);

/* Gap sampling over the shape of `seq`. mode: "iid" (uses p), "window"
 * (uses count/duration), "bodypart" (uses part/duration and skel; skel may
 * be NULL for the other modes). Frames 0 and T-1 stay observed. */
mge_status mge_mask_sample(const mge_seq* seq, const char* mode, double p, size_t count,
                           size_t duration, const char* part, uint64_t seed,
                           const mge_skel* skel, mge_mask** out);

/* ---- corruption and schedules ----------------------------------------- */

mge_status mge_curriculum(int epoch, double n_start, double n_rate, double d_start, double d_rate,
                          size_t frames, size_t markers, size_t* number, size_t* duration);
mge_status mge_noise_sigma(int epoch, double c, double* sigma);

/* Deterministic seed substream derivation, the same mixing train/bootstrap
 * use internally. */
mge_status mge_derive_seed(uint64_t seed, uint64_t a, uint64_t b, uint64_t* out);

mge_status mge_apply_mask(const mge_seq* seq, const mge_mask* mask, mge_seq** out);
mge_status mge_add_masked_noise(const mge_seq* seq, const mge_mask* mask, double sigma,
                                uint64_t seed, mge_seq** out);
mge_status mge_add_global_noise(const mge_seq* seq, double sigma, uint64_t seed, mge_seq** out);
mge_status mge_interpolate_gaps(const mge_seq* seq, mge_seq** out);

/* ---- synthetic motion -------------------------------------------------- */

/* amplitude < 0 picks the calibrated default; freq_lo/freq_hi <= 0 pick the
 * default band. */
mge_status mge_synth(const mge_skel* skel, size_t actors, double seconds, double fps,
                     double amplitude, double freq_lo, double freq_hi, uint64_t seed,
                     mge_seq** out);

/* mode: "mirror_x", "mirror_y" or "swap_actors". */
mge_status mge_augment(const mge_seq* seq, const mge_skel* skel, const char* mode, mge_seq** out);

/* ---- reconstruction ---------------------------------------------------- */

mge_status mge_train_ridge(const mge_seq* const* clean, size_t n_clean, const mge_skel* skel,
                           double n_start, double n_rate, double d_start, double d_rate, double c,
                           double lambda, int epochs, size_t window_radius, double reg,
                           uint64_t seed, mge_model** out);
mge_status mge_ridge_save(const mge_model* model, const char* path);
mge_status mge_ridge_load(const char* path, mge_model** out);
void mge_model_free(mge_model* model);

mge_status mge_fill_interp(const mge_seq* corrupted, const mge_mask* mask, mge_seq** out);
mge_status mge_fill_ridge(const mge_model* model, const mge_seq* corrupted, const mge_mask* mask,
                          const mge_skel* skel, mge_seq** out);

/* models[4] ordered hips, torso, head, limbs; NULL entries fall back to the
 * interpolation baseline for that part. */
mge_status mge_fill_hips_outwards(const mge_model* const models[4], const mge_seq* corrupted,
                                  const mge_mask* mask, const mge_skel* skel, mge_seq** out);

/* smoothing_window 0 skips smoothing; scope: "all" or "gaps". */
mge_status mge_postprocess(const mge_seq* pred, const mge_seq* raw, const mge_mask* mask,
                           size_t smoothing_window, size_t order, const char* scope,
                           mge_seq** out);

/* ---- metrics ----------------------------------------------------------- */

/* metric: rmse | vd_gt | vd | bdp_gt | bdp. gt may be NULL for vd and bdp.
 * skel is needed for bdp_gt and bdp. norm: per_coordinate | per_marker.
 * scoped != 0 restricts rmse to entries the mask marks missing. */
mge_status mge_metric(const mge_seq* pred, const mge_seq* gt, const mge_mask* mask,
                      const mge_skel* skel, const char* metric, const char* norm, int scoped,
                      double* value);

mge_status mge_training_loss(const mge_seq* pred, const mge_seq* gt, const mge_mask* missing,
                             double lambda, double* total, double* position, double* velocity);

/* ---- metric reports ----------------------------------------------------- */

mge_status mge_report_new(mge_report** out);
mge_status mge_report_read(const char* path, mge_report** out);
mge_status mge_report_add(mge_report* report, const char* stimulus, const char* metric,
                          double value, const char* norm);
mge_status mge_report_write(const mge_report* report, const char* path);
/* Merges into an existing file (creates it when absent). */
mge_status mge_report_append(const mge_report* report, const char* path);
size_t mge_report_count(const mge_report* report);
mge_status mge_report_row(const mge_report* report, size_t i, const char** stimulus,
                          const char** metric, double* value, const char** norm);
void mge_report_free(mge_report* report);

/* ---- ratings and reliability ------------------------------------------- */

mge_status mge_ratings_read(const char* path, mge_ratings** out);
void mge_ratings_free(mge_ratings* ratings);

mge_status mge_scores_compute(const mge_ratings* ratings, mge_scores** out);
void mge_scores_free(mge_scores* scores);
size_t mge_scores_count(const mge_scores* scores);
const char* mge_scores_id(const mge_scores* scores, size_t i);
double mge_scores_mean(const mge_scores* scores, size_t i);
size_t mge_scores_ratings(const mge_scores* scores, size_t i);
size_t mge_scores_categories(const mge_scores* scores);
int mge_scores_category(const mge_scores* scores, size_t k);
double mge_scores_fraction(const mge_scores* scores, size_t i, size_t k);

mge_status mge_kendall(const double* metric_values, const double* rating_means, size_t n,
                       double* tau, double* p_value);

mge_status mge_alpha(const mge_ratings* ratings, double* alpha);
mge_status mge_alpha_bootstrap(const mge_ratings* ratings, size_t resamples, uint64_t seed,
                               double* lo, double* hi);

/* Joins metric rows with ratings on stimulus id, computes tau, p and a
 * bootstrap CI per metric, and writes the correlation CSV. Stimuli present
 * in the report but absent from the ratings are an error; rating stimuli
 * missing a metric produce a warning and are omitted from that metric's
 * pairs. *warnings (optional) receives a newline-separated heap string, NULL
 * when there were none; free with mge_string_free. */
mge_status mge_correlate(const mge_report* report, const mge_ratings* ratings, size_t resamples,
                         uint64_t seed, const char* out_csv, char** warnings);

#ifdef __cplusplus
}
#endif

#endif /* MOCAPGAPEVAL_H */
