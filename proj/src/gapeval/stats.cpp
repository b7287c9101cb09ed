#include "gapeval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <numbers>
#include <numeric>

#include "gapeval/error.hpp"
#include "gapeval/rng.hpp"

namespace gapeval {

const StimulusScores::Row& StimulusScores::row_for(const std::string& stimulus_id) const {
    for (const auto& row : rows)
        if (row.stimulus_id == stimulus_id) return row;
    throw_usage("no aggregated ratings for stimulus '" + stimulus_id + "'");
}

StimulusScores aggregate(const RatingsTable& ratings) {
    if (ratings.rows().empty()) throw_data("ratings table is empty");

    StimulusScores scores;
    scores.categories = ratings.categories();
    for (const auto& id : ratings.stimulus_ids()) {
        auto values = ratings.ratings_for(id);
        StimulusScores::Row row;
        row.stimulus_id = id;
        row.count = values.size();
        row.mean = std::accumulate(values.begin(), values.end(), 0.0) /
                   static_cast<double>(values.size());
        row.fractions.assign(scores.categories.size(), 0.0);
        for (int v : values) {
            std::size_t k = std::find(scores.categories.begin(), scores.categories.end(), v) -
                            scores.categories.begin();
            row.fractions[k] += 1.0 / static_cast<double>(values.size());
        }
        scores.rows.push_back(std::move(row));
    }
    return scores;
}

namespace {

struct TauParts {
    long long s = 0;          // concordant minus discordant
    double denom = 0.0;       // tie-corrected (tau-b) or n0 (tau-a)
    bool x_all_tied = false;
    bool y_all_tied = false;
};

double tie_term(const std::vector<double>& v, double (*f)(double)) {
    std::map<double, long long> groups;
    for (double x : v) ++groups[x];
    double total = 0.0;
    for (const auto& [value, count] : groups) total += f(static_cast<double>(count));
    return total;
}

long long pair_sign_sum(const std::vector<double>& x, const std::vector<double>& y) {
    long long s = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            double prod = (x[j] - x[i]) * (y[j] - y[i]);
            if (prod > 0.0)
                ++s;
            else if (prod < 0.0)
                --s;
        }
    return s;
}

TauParts tau_parts(const std::vector<double>& x, const std::vector<double>& y, bool tau_b) {
    const std::size_t n = x.size();
    double n0 = static_cast<double>(n) * (n - 1) / 2.0;
    auto pairs = [](double t) { return t * (t - 1) / 2.0; };
    double n1 = tie_term(x, pairs);
    double n2 = tie_term(y, pairs);

    TauParts parts;
    parts.s = pair_sign_sum(x, y);
    parts.x_all_tied = (n1 >= n0);
    parts.y_all_tied = (n2 >= n0);
    parts.denom = tau_b ? std::sqrt((n0 - n1) * (n0 - n2)) : n0;
    return parts;
}

/// Signed tau under the agreement convention: the raw statistic correlates
/// metric against rating directly, so perfect best-metric/best-rating
/// agreement (metric up, rating down) is -1 raw and +1 reported.
double signed_tau(const std::vector<double>& x, const std::vector<double>& y, bool tau_b) {
    TauParts parts = tau_parts(x, y, tau_b);
    if (parts.x_all_tied) throw_numeric("all metric values tied, rank correlation undefined");
    if (parts.y_all_tied) throw_numeric("all rating values tied, rank correlation undefined");
    return -(static_cast<double>(parts.s) / parts.denom);
}

/// Ties stay ties under any reshuffling of y, so the tau denominator is the
/// same for every arrangement and only S has to be recounted.
double exact_permutation_p(const std::vector<double>& x, std::vector<double> y, bool tau_b,
                           double tau_obs) {
    double denom = tau_parts(x, y, tau_b).denom;
    std::sort(y.begin(), y.end());
    long long total = 0;
    long long at_least = 0;
    double threshold = std::abs(tau_obs) - 1e-12;
    do {
        ++total;
        double tau = static_cast<double>(pair_sign_sum(x, y)) / denom;
        if (std::abs(tau) >= threshold) ++at_least;
    } while (std::next_permutation(y.begin(), y.end()));
    return static_cast<double>(at_least) / static_cast<double>(total);
}

double normal_approx_p(const std::vector<double>& x, const std::vector<double>& y, long long s) {
    const double n = static_cast<double>(x.size());
    auto v_lead = [](double t) { return t * (t - 1) * (2 * t + 5); };
    auto pairs = [](double t) { return t * (t - 1); };
    auto triples = [](double t) { return t * (t - 1) * (t - 2); };

    double v0 = n * (n - 1) * (2 * n + 5);
    double vt = tie_term(x, v_lead);
    double vu = tie_term(y, v_lead);
    double v1 = tie_term(x, pairs) * tie_term(y, pairs) / (2.0 * n * (n - 1));
    double v2 = tie_term(x, triples) * tie_term(y, triples) / (9.0 * n * (n - 1) * (n - 2));
    double var = (v0 - vt - vu) / 18.0 + v1 + v2;
    if (!(var > 0.0)) throw_numeric("degenerate tie structure, p-value undefined");
    double z = static_cast<double>(s) / std::sqrt(var);
    return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

TauResult kendall_impl(const std::vector<double>& x, const std::vector<double>& y, bool tau_b) {
    if (x.size() != y.size()) throw_usage("metric and rating vectors differ in length");
    if (x.size() < 2) throw_data("rank correlation needs at least two stimuli");
    for (double v : x)
        if (!std::isfinite(v)) throw_data("metric values must be finite");
    for (double v : y)
        if (!std::isfinite(v)) throw_data("rating values must be finite");

    TauResult result;
    result.tau = signed_tau(x, y, tau_b);
    if (x.size() <= 10)
        result.p_value = exact_permutation_p(x, y, tau_b, result.tau);
    else
        result.p_value = normal_approx_p(x, y, tau_parts(x, y, tau_b).s);
    return result;
}

} // namespace

TauResult kendall_tau(const std::vector<double>& metric_values,
                      const std::vector<double>& rating_means) {
    return kendall_impl(metric_values, rating_means, true);
}

TauResult kendall_tau_a(const std::vector<double>& metric_values,
                        const std::vector<double>& rating_means) {
    return kendall_impl(metric_values, rating_means, false);
}

double kendall_tau_only(const std::vector<double>& metric_values,
                        const std::vector<double>& rating_means) {
    if (metric_values.size() != rating_means.size())
        throw_usage("metric and rating vectors differ in length");
    if (metric_values.size() < 2) throw_data("rank correlation needs at least two stimuli");
    return signed_tau(metric_values, rating_means, true);
}

std::optional<double> try_kendall_tau(const std::vector<double>& metric_values,
                                      const std::vector<double>& rating_means) {
    if (metric_values.size() != rating_means.size())
        throw_usage("metric and rating vectors differ in length");
    if (metric_values.size() < 2) return std::nullopt;
    TauParts parts = tau_parts(metric_values, rating_means, true);
    if (parts.x_all_tied || parts.y_all_tied) return std::nullopt;
    return -(static_cast<double>(parts.s) / parts.denom);
}

BootstrapInterval bootstrap_ci(
    const std::function<std::optional<double>(const std::vector<std::size_t>&)>& statistic,
    std::size_t n_items, std::size_t resamples, std::uint64_t seed, double lo_percentile,
    double hi_percentile) {
    if (n_items < 2) throw_data("bootstrap needs at least two items");
    if (resamples == 0) throw_usage("bootstrap needs at least one resample");
    if (lo_percentile < 0.0 || hi_percentile > 100.0 || lo_percentile > hi_percentile)
        throw_usage("bootstrap percentiles must satisfy 0 <= lo <= hi <= 100");

    std::vector<double> kept;
    kept.reserve(resamples);
    std::size_t skipped = 0;
    std::vector<std::size_t> pick(n_items);
    for (std::size_t r = 0; r < resamples; ++r) {
        Rng rng(Rng::derive_seed(seed, r));
        for (std::size_t i = 0; i < n_items; ++i)
            pick[i] = static_cast<std::size_t>(rng.uniform_below(n_items));
        if (auto value = statistic(pick))
            kept.push_back(*value);
        else
            ++skipped;
    }
    if (skipped * 2 > resamples)
        throw_numeric("more than half of the bootstrap resamples were undefined (" +
                      std::to_string(skipped) + " of " + std::to_string(resamples) + ")");

    std::sort(kept.begin(), kept.end());
    auto percentile = [&kept](double q) {
        double h = (static_cast<double>(kept.size()) - 1.0) * q / 100.0;
        std::size_t lo = static_cast<std::size_t>(h);
        double frac = h - static_cast<double>(lo);
        if (lo + 1 >= kept.size()) return kept.back();
        return kept[lo] + frac * (kept[lo + 1] - kept[lo]);
    };

    BootstrapInterval interval;
    interval.lo = percentile(lo_percentile);
    interval.hi = percentile(hi_percentile);
    interval.skipped = skipped;
    return interval;
}

std::optional<double> krippendorff_alpha(const std::vector<std::vector<int>>& units,
                                         const std::vector<int>& categories) {
    const std::size_t K = categories.size();
    auto category_index = [&](int value) {
        return static_cast<std::size_t>(
            std::find(categories.begin(), categories.end(), value) - categories.begin());
    };

    std::vector<double> coincidence(K * K, 0.0);
    for (const auto& values : units) {
        const std::size_t m = values.size();
        if (m < 2) continue;
        double weight = 1.0 / static_cast<double>(m - 1);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j) continue;
                std::size_t ci = category_index(values[i]);
                std::size_t cj = category_index(values[j]);
                if (ci >= K || cj >= K) throw_data("rating outside the declared category set");
                coincidence[ci * K + cj] += weight;
            }
    }

    std::vector<double> marginal(K, 0.0);
    double n = 0.0;
    for (std::size_t c = 0; c < K; ++c)
        for (std::size_t k = 0; k < K; ++k) {
            marginal[c] += coincidence[c * K + k];
            n += coincidence[c * K + k];
        }
    if (n <= 0.0) return std::nullopt;

    // delta^2(c, k) = (sum_{g=c..k} n_g - (n_c + n_k) / 2)^2 over marginals.
    std::vector<double> delta_sq(K * K, 0.0);
    for (std::size_t c = 0; c < K; ++c)
        for (std::size_t k = c + 1; k < K; ++k) {
            double span = 0.0;
            for (std::size_t g = c; g <= k; ++g) span += marginal[g];
            double d = span - (marginal[c] + marginal[k]) / 2.0;
            delta_sq[c * K + k] = d * d;
            delta_sq[k * K + c] = d * d;
        }

    double d_o = 0.0;
    double d_e = 0.0;
    for (std::size_t c = 0; c < K; ++c)
        for (std::size_t k = 0; k < K; ++k) {
            d_o += coincidence[c * K + k] * delta_sq[c * K + k];
            d_e += marginal[c] * marginal[k] * delta_sq[c * K + k];
        }
    d_o /= n;
    d_e /= n * (n - 1.0);

    if (d_e == 0.0) return 1.0;
    return 1.0 - d_o / d_e;
}

double krippendorff_alpha(const RatingsTable& ratings) {
    std::vector<std::vector<int>> units;
    for (const auto& id : ratings.stimulus_ids()) units.push_back(ratings.ratings_for(id));
    auto alpha = krippendorff_alpha(units, ratings.categories());
    if (!alpha) throw_numeric("no pairable ratings, reliability undefined");
    return *alpha;
}

BootstrapInterval alpha_bootstrap(const RatingsTable& ratings, std::size_t resamples,
                                  std::uint64_t seed) {
    std::vector<std::vector<int>> units;
    for (const auto& id : ratings.stimulus_ids()) units.push_back(ratings.ratings_for(id));

    auto statistic = [&units, &ratings](const std::vector<std::size_t>& pick) {
        std::vector<std::vector<int>> resampled;
        resampled.reserve(pick.size());
        for (std::size_t i : pick) resampled.push_back(units[i]);
        return krippendorff_alpha(resampled, ratings.categories());
    };
    return bootstrap_ci(statistic, units.size(), resamples, seed);
}

CorrelationResult correlate_metrics(const MetricReport& report, const RatingsTable& ratings,
                                    std::size_t resamples, std::uint64_t seed) {
    StimulusScores scores = aggregate(ratings);
    std::vector<std::string> rated_ids = ratings.stimulus_ids();
    auto rated = [&rated_ids](const std::string& id) {
        return std::find(rated_ids.begin(), rated_ids.end(), id) != rated_ids.end();
    };

    std::map<std::string, std::map<std::string, double>> by_metric;
    std::vector<std::string> unknown;
    for (const auto& row : report.rows) {
        if (!rated(row.stimulus_id)) {
            if (std::find(unknown.begin(), unknown.end(), row.stimulus_id) == unknown.end())
                unknown.push_back(row.stimulus_id);
            continue;
        }
        auto [it, inserted] = by_metric[row.metric].emplace(row.stimulus_id, row.value);
        if (!inserted)
            throw_data("duplicate " + row.metric + " row for stimulus '" + row.stimulus_id + "'");
    }
    if (!unknown.empty()) {
        std::string list;
        for (const auto& id : unknown) list += (list.empty() ? "" : ", ") + id;
        throw_data("metric rows reference stimuli absent from the ratings: " + list);
    }
    if (by_metric.empty()) throw_data("metric report is empty");

    static const char* kMetricOrder[] = {"rmse", "vd_gt", "vd", "bdp_gt", "bdp"};

    CorrelationResult result;
    for (std::size_t mi = 0; mi < std::size(kMetricOrder); ++mi) {
        auto it = by_metric.find(kMetricOrder[mi]);
        if (it == by_metric.end()) continue;
        const auto& values = it->second;

        std::vector<double> xs;
        std::vector<double> ys;
        for (const auto& id : rated_ids) {
            auto vi = values.find(id);
            if (vi == values.end()) {
                result.warnings.push_back("stimulus '" + id + "' has no " + it->first +
                                          " row, omitted from that correlation");
                continue;
            }
            xs.push_back(vi->second);
            ys.push_back(scores.row_for(id).mean);
        }
        if (xs.size() < 2)
            throw_data("metric " + it->first + " covers fewer than two rated stimuli");

        TauResult tau = kendall_tau(xs, ys);
        auto statistic = [&xs, &ys](const std::vector<std::size_t>& pick) {
            std::vector<double> rx(pick.size());
            std::vector<double> ry(pick.size());
            for (std::size_t i = 0; i < pick.size(); ++i) {
                rx[i] = xs[pick[i]];
                ry[i] = ys[pick[i]];
            }
            return try_kendall_tau(rx, ry);
        };
        BootstrapInterval ci =
            bootstrap_ci(statistic, xs.size(), resamples, Rng::derive_seed(seed, mi));

        CorrelationRow row;
        row.metric = it->first;
        row.tau = tau.tau;
        row.p_value = tau.p_value;
        row.ci_lo = ci.lo;
        row.ci_hi = ci.hi;
        row.n_stimuli = xs.size();
        result.rows.push_back(std::move(row));
    }
    return result;
}

} // namespace gapeval
