#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "gapeval/error.hpp"
#include "gapeval/rng.hpp"
#include "gapeval/stats.hpp"
#include "gapeval/types.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

using namespace gapeval;

namespace {

std::vector<double> vec(const double* data, std::size_t n) {
    return std::vector<double>(data, data + n);
}

/// Two-sided permutation p for the flipped tau, brute force over all n!
/// arrangements of y.
double brute_permutation_p(std::vector<double> x, std::vector<double> y) {
    const double observed = std::abs(oracle::pair_tau(x, y));
    std::sort(y.begin(), y.end());
    std::size_t total = 0, at_least = 0;
    do {
        ++total;
        if (std::abs(oracle::pair_tau(x, y)) >= observed - 1e-12) ++at_least;
    } while (std::next_permutation(y.begin(), y.end()));
    return static_cast<double>(at_least) / static_cast<double>(total);
}

} // namespace

TEST_CASE("aggregate summarises ratings per stimulus") {
    RatingsTable table;
    table.add("s2", "r1", 4);
    table.add("s1", "r1", 2);
    table.add("s2", "r2", 5);
    table.add("s2", "r3", 4);
    table.add("s1", "r2", 3);

    auto scores = aggregate(table);
    REQUIRE(scores.rows.size() == 2);
    CHECK(scores.rows[0].stimulus_id == "s2");
    CHECK(scores.rows[0].count == 3);
    CHECK(scores.rows[0].mean == doctest::Approx(13.0 / 3.0).epsilon(1e-15));
    CHECK(scores.rows[1].stimulus_id == "s1");
    CHECK(scores.rows[1].mean == doctest::Approx(2.5).epsilon(1e-15));

    REQUIRE(scores.rows[0].fractions.size() == 5);
    CHECK(scores.rows[0].fractions[3] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));  // rating 4
    CHECK(scores.rows[0].fractions[4] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));  // rating 5
    CHECK(scores.rows[0].fractions[0] == 0.0);

    CHECK(scores.row_for("s1").count == 2);
    CHECK_THROWS_AS(scores.row_for("s9"), Error);
}

TEST_CASE("kendall tau is +1 when metric and rating rank opposite ways") {
    // Smaller metric, higher rating: perfect agreement.
    std::vector<double> metric = {0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> rating = {5, 4, 3, 2, 1};
    auto res = kendall_tau(metric, rating);
    CHECK(res.tau == doctest::Approx(1.0).epsilon(1e-15));

    // Same direction: perfect disagreement.
    std::vector<double> reversed = {1, 2, 3, 4, 5};
    CHECK(kendall_tau(metric, reversed).tau == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("kendall tau-b matches reference fixtures") {
    SUBCASE("ties, exact permutation p") {
        auto res = kendall_tau(vec(oracle::kKendallX6, 6), vec(oracle::kKendallY6, 6));
        CHECK(res.tau == doctest::Approx(-oracle::kKendallTau6).epsilon(1e-12));
        CHECK(res.p_value == doctest::Approx(oracle::kKendallP6).epsilon(1e-12));
    }
    SUBCASE("no ties, exact permutation p") {
        auto res = kendall_tau(vec(oracle::kKendallX8, 8), vec(oracle::kKendallY8, 8));
        CHECK(res.tau == doctest::Approx(-oracle::kKendallTau8).epsilon(1e-12));
        CHECK(res.p_value == doctest::Approx(oracle::kKendallP8).epsilon(1e-12));

        // Tie-free tau-a and tau-b coincide.
        auto ta = kendall_tau_a(vec(oracle::kKendallX8, 8), vec(oracle::kKendallY8, 8));
        CHECK(ta.tau == doctest::Approx(res.tau).epsilon(1e-12));
        CHECK(ta.p_value == doctest::Approx(res.p_value).epsilon(1e-12));
    }
    SUBCASE("n > 10 uses the tie-corrected normal approximation") {
        auto res = kendall_tau(vec(oracle::kKendallX15, 15), vec(oracle::kKendallY15, 15));
        CHECK(res.tau == doctest::Approx(-oracle::kKendallTau15).epsilon(1e-12));
        CHECK(res.p_value == doctest::Approx(oracle::kKendallP15).epsilon(1e-12));
    }
}

TEST_CASE("kendall tau agrees with exhaustive pair counting on all orderings") {
    std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> y = {1, 2, 3, 4, 5};
    std::size_t checked = 0;
    do {
        CHECK(kendall_tau_only(x, y) == doctest::Approx(oracle::pair_tau(x, y)).epsilon(1e-12));
        ++checked;
    } while (std::next_permutation(y.begin(), y.end()));
    CHECK(checked == 120);
}

TEST_CASE("exact permutation p matches a brute-force recount") {
    std::vector<double> x = {1, 2, 3, 4, 5};
    SUBCASE("untied") {
        std::vector<double> y = {2, 1, 4, 3, 5};
        CHECK(kendall_tau(x, y).p_value ==
              doctest::Approx(brute_permutation_p(x, y)).epsilon(1e-12));
    }
    SUBCASE("tied") {
        std::vector<double> y = {2, 2, 4, 3, 3};
        CHECK(kendall_tau(x, y).p_value ==
              doctest::Approx(brute_permutation_p(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("kendall tau rejects degenerate inputs") {
    CHECK_THROWS_AS(kendall_tau({1, 1, 1}, {1, 2, 3}), Error);
    CHECK_THROWS_AS(kendall_tau({1, 2, 3}, {2, 2, 2}), Error);
    CHECK_THROWS_AS(kendall_tau({1}, {2}), Error);
    CHECK_THROWS_AS(kendall_tau({1, 2}, {1, 2, 3}), Error);

    CHECK(!try_kendall_tau({1, 1, 1}, {1, 2, 3}).has_value());
    CHECK(!try_kendall_tau({1}, {1}).has_value());
    auto t = try_kendall_tau({1, 2, 3}, {3, 2, 1});
    REQUIRE(t.has_value());
    CHECK(*t == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("bootstrap_ci is deterministic and order-independent") {
    const auto data = vec(oracle::kPercentileData, 10);
    auto statistic = [&](const std::vector<std::size_t>& picks) -> std::optional<double> {
        double sum = 0.0;
        for (std::size_t i : picks) sum += data[i];
        return sum / static_cast<double>(picks.size());
    };

    auto a = bootstrap_ci(statistic, data.size(), 4000, 17);
    auto b = bootstrap_ci(statistic, data.size(), 4000, 17);
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
    CHECK(a.skipped == 0);
    CHECK(a.lo <= a.hi);

    // The interval sits around the sample mean, well inside the data range.
    const double mean = 4.75;
    CHECK(a.lo < mean);
    CHECK(a.hi > mean);
    CHECK(a.lo > 1.0);
    CHECK(a.hi < 9.0);
}

TEST_CASE("bootstrap_ci matches an independent mean bootstrap") {
    const auto data = vec(oracle::kPercentileData, 10);
    auto statistic = [&](const std::vector<std::size_t>& picks) -> std::optional<double> {
        double sum = 0.0;
        for (std::size_t i : picks) sum += data[i];
        return sum / static_cast<double>(picks.size());
    };
    auto ours = bootstrap_ci(statistic, data.size(), 50000, 5);
    auto ref = oracle::mean_bootstrap(data, 50000, 777);
    CHECK(std::abs(ours.lo - ref.first) < 0.1);
    CHECK(std::abs(ours.hi - ref.second) < 0.1);
}

TEST_CASE("bootstrap_ci skips undefined resamples and errors past half") {
    auto sometimes = [](const std::vector<std::size_t>& picks) -> std::optional<double> {
        if (picks[0] == 0) return std::nullopt;
        return static_cast<double>(picks[0]);
    };
    auto out = bootstrap_ci(sometimes, 4, 2000, 3);
    CHECK(out.skipped > 200);
    CHECK(out.skipped < 1000);

    auto mostly_undefined = [](const std::vector<std::size_t>& picks) -> std::optional<double> {
        if (picks[0] != 0) return std::nullopt;
        return 1.0;
    };
    CHECK_THROWS_AS(bootstrap_ci(mostly_undefined, 4, 2000, 3), Error);

    auto constant = [](const std::vector<std::size_t>&) -> std::optional<double> {
        return 3.25;
    };
    auto flat = bootstrap_ci(constant, 4, 100, 0);
    CHECK(flat.lo == 3.25);
    CHECK(flat.hi == 3.25);
}

TEST_CASE("krippendorff alpha on hand fixtures") {
    const std::vector<int> scale = {1, 2, 3, 4, 5};

    SUBCASE("two raters swapping the extremes") {
        auto alpha = krippendorff_alpha({{1, 5}, {5, 1}}, scale);
        REQUIRE(alpha.has_value());
        CHECK(*alpha == doctest::Approx(oracle::kAlphaExtremes).epsilon(1e-12));
    }
    SUBCASE("mixed-agreement eight units") {
        auto alpha = krippendorff_alpha(oracle::kAlphaUnits8, scale);
        REQUIRE(alpha.has_value());
        CHECK(*alpha == doctest::Approx(oracle::kAlphaUnits8Value).epsilon(1e-12));
    }
    SUBCASE("perfect agreement within units") {
        auto alpha = krippendorff_alpha({{3}, {4, 4}, {2, 2}}, scale);
        REQUIRE(alpha.has_value());
        CHECK(*alpha == 1.0);
    }
    SUBCASE("identical ratings everywhere have zero expected disagreement") {
        auto alpha = krippendorff_alpha({{2, 2}, {2, 2, 2}}, scale);
        REQUIRE(alpha.has_value());
        CHECK(*alpha == 1.0);
    }
    SUBCASE("no pairable values") {
        CHECK(!krippendorff_alpha({{1}, {2}, {3}}, scale).has_value());
        CHECK(!krippendorff_alpha({}, scale).has_value());
    }
    SUBCASE("ratings outside the scale are rejected") {
        CHECK_THROWS_AS(krippendorff_alpha({{1, 7}}, scale), Error);
    }
}

TEST_CASE("krippendorff alpha table form matches the unit form") {
    RatingsTable table;
    const char* raters[] = {"r1", "r2", "r3", "r4"};
    for (std::size_t u = 0; u < oracle::kAlphaUnits8.size(); ++u)
        for (std::size_t r = 0; r < oracle::kAlphaUnits8[u].size(); ++r)
            table.add("s" + std::to_string(u), raters[r], oracle::kAlphaUnits8[u][r]);

    CHECK(krippendorff_alpha(table) ==
          doctest::Approx(oracle::kAlphaUnits8Value).epsilon(1e-12));

    RatingsTable lonely;
    lonely.add("s1", "r1", 3);
    lonely.add("s2", "r1", 4);
    CHECK_THROWS_AS(krippendorff_alpha(lonely), Error);
}

TEST_CASE("shuffled labels drive alpha towards zero") {
    Rng rng(88);
    RatingsTable table;
    for (int s = 0; s < 40; ++s)
        for (int r = 0; r < 4; ++r)
            table.add("s" + std::to_string(s), "r" + std::to_string(r),
                      1 + static_cast<int>(rng.uniform_below(5)));
    CHECK(std::abs(krippendorff_alpha(table)) < 0.2);
}

TEST_CASE("alpha bootstrap resamples stimuli deterministically") {
    RatingsTable table;
    const char* raters[] = {"r1", "r2", "r3", "r4"};
    for (std::size_t u = 0; u < oracle::kAlphaUnits8.size(); ++u)
        for (std::size_t r = 0; r < oracle::kAlphaUnits8[u].size(); ++r)
            table.add("s" + std::to_string(u), raters[r], oracle::kAlphaUnits8[u][r]);

    auto a = alpha_bootstrap(table, 3000, 7);
    auto b = alpha_bootstrap(table, 3000, 7);
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
    CHECK(a.lo <= a.hi);
    CHECK(a.lo > -1.01);
    CHECK(a.hi <= 1.0);

    const double point = krippendorff_alpha(table);
    CHECK(a.lo <= point);
    CHECK(a.hi >= point);
}

namespace {

RatingsTable six_stimulus_ratings() {
    // Means: s1 4.67, s2 4.0, s3 3.33, s4 2.67, s5 2.0, s6 1.33.
    RatingsTable table;
    const int grid[6][3] = {{5, 5, 4}, {4, 4, 4}, {3, 4, 3}, {3, 2, 3}, {2, 2, 2}, {1, 2, 1}};
    for (int s = 0; s < 6; ++s)
        for (int r = 0; r < 3; ++r)
            table.add("s" + std::to_string(s + 1), "r" + std::to_string(r + 1), grid[s][r]);
    return table;
}

} // namespace

TEST_CASE("correlate_metrics joins on stimulus id in canonical metric order") {
    auto ratings = six_stimulus_ratings();

    MetricReport report;
    // rmse increases as ratings drop: perfect agreement, tau +1.
    const double rmse_vals[6] = {0.5, 0.8, 1.1, 1.9, 2.5, 3.0};
    // vd decreases as ratings drop: perfect disagreement, tau -1.
    const double vd_vals[6] = {3.0, 2.5, 1.9, 1.1, 0.8, 0.5};
    for (int s = 0; s < 6; ++s) {
        report.add("s" + std::to_string(s + 1), "vd", vd_vals[s], "per_coordinate");
        report.add("s" + std::to_string(s + 1), "rmse", rmse_vals[s], "per_coordinate");
    }
    // bdp only for the first four stimuli: two warnings, four pairs.
    for (int s = 0; s < 4; ++s)
        report.add("s" + std::to_string(s + 1), "bdp", 0.1 * (s + 1), "none");

    auto result = correlate_metrics(report, ratings, 2000, 9);

    REQUIRE(result.rows.size() == 3);
    CHECK(result.rows[0].metric == "rmse");
    CHECK(result.rows[1].metric == "vd");
    CHECK(result.rows[2].metric == "bdp");

    CHECK(result.rows[0].tau == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.rows[0].n_stimuli == 6);
    CHECK(result.rows[1].tau == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(result.rows[2].tau == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.rows[2].n_stimuli == 4);

    CHECK(result.rows[0].ci_lo <= result.rows[0].ci_hi);
    CHECK(result.rows[0].ci_hi <= 1.0);

    REQUIRE(result.warnings.size() == 2);
    CHECK(result.warnings[0].find("s5") != std::string::npos);
    CHECK(result.warnings[0].find("bdp") != std::string::npos);
    CHECK(result.warnings[1].find("s6") != std::string::npos);

    auto again = correlate_metrics(report, ratings, 2000, 9);
    REQUIRE(again.rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(again.rows[i].tau == result.rows[i].tau);
        CHECK(again.rows[i].p_value == result.rows[i].p_value);
        CHECK(again.rows[i].ci_lo == result.rows[i].ci_lo);
        CHECK(again.rows[i].ci_hi == result.rows[i].ci_hi);
    }
}

TEST_CASE("correlate_metrics matches a direct kendall computation") {
    auto ratings = six_stimulus_ratings();
    auto scores = aggregate(ratings);

    MetricReport report;
    const double vals[6] = {1.2, 0.4, 2.2, 0.9, 3.1, 1.7};
    std::vector<double> xs, ys;
    for (int s = 0; s < 6; ++s) {
        const std::string id = "s" + std::to_string(s + 1);
        report.add(id, "vd_gt", vals[s], "per_coordinate");
        xs.push_back(vals[s]);
        ys.push_back(scores.row_for(id).mean);
    }

    auto result = correlate_metrics(report, ratings, 1000, 3);
    REQUIRE(result.rows.size() == 1);
    auto direct = kendall_tau(xs, ys);
    CHECK(result.rows[0].tau == doctest::Approx(direct.tau).epsilon(1e-15));
    CHECK(result.rows[0].p_value == doctest::Approx(direct.p_value).epsilon(1e-15));
    CHECK(result.warnings.empty());
}

TEST_CASE("correlate_metrics rejects bad joins") {
    auto ratings = six_stimulus_ratings();

    SUBCASE("metric stimulus missing from the ratings") {
        MetricReport report;
        for (int s = 0; s < 6; ++s)
            report.add("s" + std::to_string(s + 1), "rmse", 1.0 + s, "per_coordinate");
        report.add("mystery", "rmse", 9.0, "per_coordinate");
        CHECK_THROWS_WITH_AS(correlate_metrics(report, ratings, 100, 0),
                             doctest::Contains("mystery"), Error);
    }
    SUBCASE("duplicate metric row") {
        MetricReport report;
        report.add("s1", "rmse", 1.0, "per_coordinate");
        report.add("s1", "rmse", 2.0, "per_coordinate");
        CHECK_THROWS_AS(correlate_metrics(report, ratings, 100, 0), Error);
    }
    SUBCASE("empty report") {
        MetricReport report;
        CHECK_THROWS_AS(correlate_metrics(report, ratings, 100, 0), Error);
    }
    SUBCASE("fewer than two pairs") {
        MetricReport report;
        report.add("s1", "rmse", 1.0, "per_coordinate");
        CHECK_THROWS_AS(correlate_metrics(report, ratings, 100, 0), Error);
    }
}
