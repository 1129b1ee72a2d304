#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "ccdm/normalize.hpp"
#include "ccdm/panel.hpp"

#include "fixtures.hpp"

using namespace ccdm;

namespace {

// one entity pair over three periods with hand-picked a1 values
PanelDataset make_dataset(std::vector<double> a1_values) {
    std::ostringstream out;
    out << "entity,period,indicator,value\n";
    std::size_t i = 0;
    for (const char* entity : {"p", "q"})
        for (int period : {1, 2, 3}) {
            out << fixtures::csv_row(entity, period, "a1", a1_values[i]);
            out << fixtures::csv_row(entity, period, "a2", a1_values[i]);  // negative direction
            out << fixtures::csv_row(entity, period, "b1", static_cast<double>(period));
            out << fixtures::csv_row(entity, period, "b2", 7.0);           // constant
            ++i;
        }
    return load_panel(out.str(), fixtures::tiny_scheme()).dataset;
}

} // namespace

TEST_CASE("positive indicators map min to 0 and max to 1") {
    auto ds = make_dataset({2.0, 4.0, 10.0, 3.0, 5.0, 6.0});
    auto norm = normalize(ds, dataset_stats(ds));

    std::size_t a1 = *norm.axes.indicator_index("a1");
    CHECK(norm.value(0, 0, a1) == 0.0);                                   // x = min = 2
    CHECK(norm.value(0, 2, a1) == 1.0);                                   // x = max = 10
    CHECK_THAT(norm.value(0, 1, a1), Catch::Matchers::WithinAbs(0.25, 1e-15));  // (4-2)/8
}

TEST_CASE("negative indicators flip the scale") {
    auto ds = make_dataset({2.0, 4.0, 10.0, 3.0, 5.0, 6.0});
    auto norm = normalize(ds, dataset_stats(ds));

    std::size_t a2 = *norm.axes.indicator_index("a2");
    CHECK(norm.value(0, 0, a2) == 1.0);   // x = min -> 1
    CHECK(norm.value(0, 2, a2) == 0.0);   // x = max -> 0
    CHECK_THAT(norm.value(0, 1, a2), Catch::Matchers::WithinAbs(0.75, 1e-15));
}

TEST_CASE("constant indicators take the fill value and are flagged") {
    auto ds = make_dataset({2.0, 4.0, 10.0, 3.0, 5.0, 6.0});

    auto norm = normalize(ds, dataset_stats(ds));
    std::size_t b2 = *norm.axes.indicator_index("b2");
    for (std::size_t e = 0; e < 2; ++e)
        for (std::size_t t = 0; t < 3; ++t) CHECK(norm.value(e, t, b2) == 0.5);
    CHECK(norm.constant_indicators == std::vector<std::string>{"b2"});

    auto shifted = normalize(ds, dataset_stats(ds), 0.3);
    CHECK(shifted.value(0, 0, b2) == 0.3);

    CHECK_THROWS_AS(normalize(ds, dataset_stats(ds), 1.5), ComputeError);
    CHECK_THROWS_AS(normalize(ds, dataset_stats(ds), -0.1), ComputeError);
}

TEST_CASE("stats must match the dataset's indicators one to one") {
    auto ds = make_dataset({2.0, 4.0, 10.0, 3.0, 5.0, 6.0});
    auto stats = dataset_stats(ds);

    auto truncated = stats;
    truncated.pop_back();
    CHECK_THROWS_AS(normalize(ds, truncated), ComputeError);

    auto swapped = stats;
    std::swap(swapped[0], swapped[1]);
    CHECK_THROWS_AS(normalize(ds, swapped), ComputeError);
}

TEST_CASE("normalized values stay in [0, 1] and preserve order") {
    std::mt19937 rng(2024);
    auto panel = fixtures::make_random_panel(rng, 5, 6, {4, 3});
    auto ds = load_panel(panel.csv, panel.scheme).dataset;
    auto norm = normalize(ds, dataset_stats(ds));

    for (double v : norm.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    // monotone in the raw value, direction-aware
    for (std::size_t j = 0; j < norm.axes.indicator_ids.size(); ++j) {
        bool positive = panel.scheme.find_indicator(norm.axes.indicator_ids[j])->direction ==
                        EffectDirection::Positive;
        for (std::size_t e = 0; e < 5; ++e)
            for (std::size_t t = 0; t + 1 < 6; ++t) {
                double rx = ds.value(e, t, j), ry = ds.value(e, t + 1, j);
                double nx = norm.value(e, t, j), ny = norm.value(e, t + 1, j);
                if (rx < ry) CHECK((positive ? nx <= ny : nx >= ny));
            }
    }
}

TEST_CASE("affine rescaling of a raw column leaves its normalized values unchanged") {
    std::vector<double> base{2.0, 4.0, 10.0, 3.0, 5.0, 6.0};
    auto ds = make_dataset(base);
    auto norm = normalize(ds, dataset_stats(ds));

    std::vector<double> scaled;
    for (double v : base) scaled.push_back(3.5 * v - 20.0);
    auto ds2 = make_dataset(scaled);
    auto norm2 = normalize(ds2, dataset_stats(ds2));

    std::size_t a1 = *norm.axes.indicator_index("a1");
    for (std::size_t e = 0; e < 2; ++e)
        for (std::size_t t = 0; t < 3; ++t)
            CHECK_THAT(norm2.value(e, t, a1),
                       Catch::Matchers::WithinAbs(norm.value(e, t, a1), 1e-12));
}
