#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gapeval/types.hpp"

namespace gapeval {

/// Per-stimulus rating summary: arithmetic mean, rating count, and the
/// fraction of ratings falling in each category of the declared scale.
struct StimulusScores {
    struct Row {
        std::string stimulus_id;
        double mean = 0.0;
        std::size_t count = 0;
        std::vector<double> fractions;
    };
    std::vector<int> categories;
    std::vector<Row> rows;

    const Row& row_for(const std::string& stimulus_id) const;
};

StimulusScores aggregate(const RatingsTable& ratings);

struct TauResult {
    double tau = 0.0;
    double p_value = 1.0;
};

/// Rank correlation between a better-is-smaller metric and a better-is-larger
/// rating, signed so that perfect agreement gives +1. Tau-b handles ties;
/// the two-sided p-value is exact (full pairing permutation) for n <= 10 and
/// a tie-corrected normal approximation beyond that.
TauResult kendall_tau(const std::vector<double>& metric_values,
                      const std::vector<double>& rating_means);

/// Tau-a variant for tie-free data; same sign convention and p-value scheme.
TauResult kendall_tau_a(const std::vector<double>& metric_values,
                        const std::vector<double>& rating_means);

/// Just the signed tau-b statistic, for resampling loops.
double kendall_tau_only(const std::vector<double>& metric_values,
                        const std::vector<double>& rating_means);

/// As kendall_tau_only, but nullopt instead of an error when either side is
/// fully tied (a routine outcome inside bootstrap resamples).
std::optional<double> try_kendall_tau(const std::vector<double>& metric_values,
                                      const std::vector<double>& rating_means);

struct BootstrapInterval {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t skipped = 0;
};

/// Percentile bootstrap over item indices [0, n_items): draws `resamples`
/// resamples with replacement, evaluates the statistic on each (nullopt =
/// undefined, skipped), and returns the lo/hi percentiles of the kept values.
/// Each resample uses its own seed substream derived from `seed`, so any
/// evaluation order gives identical results. Errors when more than half the
/// resamples are undefined.
BootstrapInterval bootstrap_ci(
    const std::function<std::optional<double>(const std::vector<std::size_t>&)>& statistic,
    std::size_t n_items, std::size_t resamples, std::uint64_t seed, double lo_percentile = 2.5,
    double hi_percentile = 97.5);

/// Krippendorff's alpha with the ordinal distance over the table's declared
/// category set, via the coincidence-matrix formulation. Stimuli with fewer
/// than two ratings contribute no pairs. Alpha is 1 when expected
/// disagreement is zero (everyone agrees everywhere).
double krippendorff_alpha(const RatingsTable& ratings);

/// Unit-list form, one vector of ratings per stimulus. Nullopt when no unit
/// has two ratings (no pairable values).
std::optional<double> krippendorff_alpha(const std::vector<std::vector<int>>& units,
                                         const std::vector<int>& categories);

/// Percentile bootstrap CI for alpha, resampling stimuli with replacement.
BootstrapInterval alpha_bootstrap(const RatingsTable& ratings, std::size_t resamples,
                                  std::uint64_t seed);

struct CorrelationRow {
    std::string metric;
    double tau = 0.0;
    double p_value = 1.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::size_t n_stimuli = 0;
};

struct CorrelationResult {
    std::vector<CorrelationRow> rows;
    std::vector<std::string> warnings;
};

/// Joins metric rows with mean ratings on stimulus id and computes, per
/// metric present in the report (in the canonical rmse, vd_gt, vd, bdp_gt,
/// bdp order), signed tau-b, its p-value, and a stimulus-level percentile
/// bootstrap CI. Report stimuli missing from the ratings are an error; rated
/// stimuli missing a metric are dropped from that metric's pairs with a
/// warning. Each metric's bootstrap runs on its own seed substream.
CorrelationResult correlate_metrics(const MetricReport& report, const RatingsTable& ratings,
                                    std::size_t resamples, std::uint64_t seed);

} // namespace gapeval
