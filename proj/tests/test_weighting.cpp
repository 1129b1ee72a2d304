#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "ccdm/normalize.hpp"
#include "ccdm/panel.hpp"
#include "ccdm/weighting.hpp"

#include "fixtures.hpp"

using namespace ccdm;

namespace {

NormalizedPanel normalized_random_panel(std::mt19937& rng, std::size_t entities,
                                        std::size_t periods,
                                        const std::vector<std::size_t>& shape,
                                        EvaluationScheme& scheme_out) {
    auto panel = fixtures::make_random_panel(rng, entities, periods, shape);
    scheme_out = panel.scheme;
    auto ds = load_panel(panel.csv, panel.scheme).dataset;
    return normalize(ds, dataset_stats(ds));
}

} // namespace

TEST_CASE("msd weights are each column's share of its system's dispersion") {
    // alpha: a1 has normalized column std 0.2, a2 std 0.3 -> weights 0.4, 0.6.
    // Build raw a1 in {0, 10} with 80/20 split: normalized {0,1}, mean 0.2,
    // std sqrt(0.2*0.8) = 0.4; a2 split 50/50: std 0.5. Ratio 4:5.
    // Simpler: craft normalized columns directly through raw values 0/1.
    std::ostringstream out;
    out << "entity,period,indicator,value\n";
    // 10 cells per column via 2 entities x 5 periods
    int i = 0;
    for (const char* entity : {"u", "v"})
        for (int period = 1; period <= 5; ++period) {
            // a1: one 1 in ten cells -> mean 0.1, std 0.3
            out << fixtures::csv_row(entity, period, "a1", i == 0 ? 1.0 : 0.0);
            // a2 (negative direction): values 0/1 flip, half and half -> std 0.5
            out << fixtures::csv_row(entity, period, "a2", i % 2 == 0 ? 1.0 : 0.0);
            // beta system: equal dispersion columns
            out << fixtures::csv_row(entity, period, "b1", i % 2 == 0 ? 3.0 : 7.0);
            out << fixtures::csv_row(entity, period, "b2", i % 2 == 0 ? 40.0 : 90.0);
            ++i;
        }
    auto ds = load_panel(out.str(), fixtures::tiny_scheme()).dataset;
    auto norm = normalize(ds, dataset_stats(ds));
    auto weighting = msd_weights(norm, ds.scheme);

    REQUIRE(weighting.systems.size() == 2);
    CHECK(weighting.adjustments.empty());

    // stds: a1 = sqrt(0.1*0.9) = 0.3, a2 = 0.5 -> weights 3/8, 5/8
    const WeightVector& alpha = weighting.systems[0];
    CHECK(alpha.system_id == "alpha");
    CHECK(alpha.method == WeightMethod::Msd);
    CHECK_THAT(alpha.weight_of("a1"), Catch::Matchers::WithinAbs(0.375, 1e-12));
    CHECK_THAT(alpha.weight_of("a2"), Catch::Matchers::WithinAbs(0.625, 1e-12));

    // equal dispersion -> equal split
    const WeightVector& beta = weighting.systems[1];
    CHECK_THAT(beta.weight_of("b1"), Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(beta.weight_of("b2"), Catch::Matchers::WithinAbs(0.5, 1e-12));
}

TEST_CASE("msd weights match a brute-force recomputation on a random panel") {
    std::mt19937 rng(11);
    EvaluationScheme scheme;
    auto norm = normalized_random_panel(rng, 4, 8, {3, 4, 2}, scheme);
    auto weighting = msd_weights(norm, scheme);

    for (std::size_t s = 0; s < scheme.systems.size(); ++s) {
        std::vector<double> stds;
        double total = 0.0;
        for (const auto& ind : scheme.systems[s].indicators) {
            std::size_t j = *norm.axes.indicator_index(ind.id);
            double mean = 0.0;
            for (std::size_t e = 0; e < 4; ++e)
                for (std::size_t t = 0; t < 8; ++t) mean += norm.value(e, t, j);
            mean /= 32.0;
            double var = 0.0;
            for (std::size_t e = 0; e < 4; ++e)
                for (std::size_t t = 0; t < 8; ++t) {
                    double d = norm.value(e, t, j) - mean;
                    var += d * d;
                }
            stds.push_back(std::sqrt(var / 32.0));
            total += stds.back();
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < stds.size(); ++i) {
            double w = weighting.systems[s].weights[i].second;
            CHECK_THAT(w, Catch::Matchers::WithinAbs(stds[i] / total, 1e-12));
            sum += w;
        }
        CHECK_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-9));
    }
}

TEST_CASE("a system whose columns all have zero dispersion is an error") {
    std::ostringstream out;
    out << "entity,period,indicator,value\n";
    for (const char* entity : {"u", "v"})
        for (int period : {1, 2}) {
            out << fixtures::csv_row(entity, period, "a1", 5.0);  // constant
            out << fixtures::csv_row(entity, period, "a2", 9.0);  // constant
            out << fixtures::csv_row(entity, period, "b1", period * 1.0);
            out << fixtures::csv_row(entity, period, "b2", period * 2.0);
        }
    auto ds = load_panel(out.str(), fixtures::tiny_scheme()).dataset;
    auto norm = normalize(ds, dataset_stats(ds));
    try {
        msd_weights(norm, ds.scheme);
        FAIL("expected ComputeError");
    } catch (const ComputeError& e) {
        CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("alpha"));
    }
}

TEST_CASE("permuting indicator declarations permutes msd weights with them") {
    std::mt19937 rng(5);
    EvaluationScheme scheme;
    auto norm = normalized_random_panel(rng, 3, 5, {4, 2}, scheme);
    auto weighting = msd_weights(norm, scheme);

    EvaluationScheme permuted = scheme;
    std::swap(permuted.systems[0].indicators[0], permuted.systems[0].indicators[3]);
    auto weighting2 = msd_weights(norm, permuted);

    for (const auto& [id, w] : weighting.systems[0].weights)
        CHECK_THAT(weighting2.systems[0].weight_of(id), Catch::Matchers::WithinAbs(w, 1e-12));
}

TEST_CASE("duplicating the whole panel leaves msd weights unchanged") {
    std::mt19937 rng(31);
    auto panel = fixtures::make_random_panel(rng, 3, 4, {3, 3});
    auto ds = load_panel(panel.csv, panel.scheme).dataset;
    auto norm = normalize(ds, dataset_stats(ds));
    auto weighting = msd_weights(norm, panel.scheme);

    // same rows again under fresh entity names
    std::ostringstream doubled;
    doubled << "entity,period,indicator,value\n";
    for (std::size_t e = 0; e < 3; ++e)
        for (std::size_t t = 0; t < 4; ++t)
            for (std::size_t j = 0; j < panel.indicator_ids.size(); ++j) {
                double v = panel.value(e, t, j);
                doubled << fixtures::csv_row(panel.entities[e], panel.periods[t],
                                             panel.indicator_ids[j], v);
                doubled << fixtures::csv_row("z_copy_" + panel.entities[e], panel.periods[t],
                                             panel.indicator_ids[j], v);
            }
    auto ds2 = load_panel(doubled.str(), panel.scheme).dataset;
    auto norm2 = normalize(ds2, dataset_stats(ds2));
    auto weighting2 = msd_weights(norm2, panel.scheme);

    for (std::size_t s = 0; s < weighting.systems.size(); ++s)
        for (std::size_t i = 0; i < weighting.systems[s].weights.size(); ++i)
            CHECK_THAT(weighting2.systems[s].weights[i].second,
                       Catch::Matchers::WithinAbs(weighting.systems[s].weights[i].second, 1e-12));
}

TEST_CASE("fixed weights pass through, renormalize, or reject") {
    auto scheme = fixtures::tiny_scheme();
    scheme.systems[0].indicators[0].fixed_weight = 0.6;
    scheme.systems[0].indicators[1].fixed_weight = 0.4;
    scheme.systems[1].indicators[0].fixed_weight = 0.55;
    scheme.systems[1].indicators[1].fixed_weight = 0.37;  // beta sums to 0.92

    SECTION("renormalize records the adjustment and restores sum 1") {
        auto weighting = fixed_weights(scheme, true);
        REQUIRE(weighting.adjustments.size() == 1);
        CHECK(weighting.adjustments[0].system_id == "beta");
        CHECK_THAT(weighting.adjustments[0].original_sum,
                   Catch::Matchers::WithinAbs(0.92, 1e-12));
        CHECK_THAT(weighting.systems[1].weight_of("b1"),
                   Catch::Matchers::WithinAbs(0.55 / 0.92, 1e-12));
        for (const auto& wv : weighting.systems) {
            double sum = 0.0;
            for (const auto& [id, w] : wv.weights) sum += w;
            CHECK_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-9));
            CHECK(wv.method == WeightMethod::Fixed);
        }
    }

    SECTION("strict mode names the bad sum") {
        try {
            fixed_weights(scheme, false);
            FAIL("expected ComputeError");
        } catch (const ComputeError& e) {
            CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("sum 0.920 != 1"));
        }
    }

    SECTION("an indicator without a weight is an error") {
        scheme.systems[0].indicators[0].fixed_weight.reset();
        CHECK_THROWS_AS(fixed_weights(scheme, true), ComputeError);
    }
}

TEST_CASE("reference scheme fixed weights: exact column accepted untouched") {
    auto parsed = parse_scheme(fixtures::read_file(fixtures::reference_scheme_path()));
    // parse already renormalized two columns; fixed_weights sees sums of 1
    auto weighting = fixed_weights(parsed.scheme, true);
    CHECK(weighting.adjustments.empty());
    for (const auto& wv : weighting.systems) {
        double sum = 0.0;
        for (const auto& [id, w] : wv.weights) sum += w;
        CHECK_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-9));
    }
    // digital economy column was exact, so its weights are the printed ones
    CHECK_THAT(weighting.systems[0].weight_of("telecom_revenue"),
               Catch::Matchers::WithinAbs(0.159, 1e-12));
    CHECK_THAT(weighting.systems[0].weight_of("express_delivery_volume"),
               Catch::Matchers::WithinAbs(0.080, 1e-12));
}

TEST_CASE("equal weights are 1/m per system") {
    auto scheme = fixtures::tiny_scheme();
    auto weighting = equal_weights(scheme);
    for (const auto& wv : weighting.systems) {
        CHECK(wv.method == WeightMethod::Equal);
        for (const auto& [id, w] : wv.weights) CHECK(w == 0.5);
    }

    // single-indicator system gets weight 1
    EvaluationScheme solo = scheme;
    solo.systems[1].indicators.resize(1);
    CHECK(equal_weights(solo).systems[1].weights[0].second == 1.0);

    // the 3x8 reference scheme: every weight 0.125
    auto reference = parse_scheme(fixtures::read_file(fixtures::reference_scheme_path())).scheme;
    auto ew = equal_weights(reference);
    REQUIRE(ew.systems.size() == 3);
    for (const auto& wv : ew.systems)
        for (const auto& [id, w] : wv.weights) CHECK(w == 0.125);
}
