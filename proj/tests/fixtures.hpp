#pragma once

// Shared test fixtures: the reference metropolitan-circle study (scheme file,
// reported coordination panel, reported lag sequence) and deterministic
// synthetic panel generators for property tests.

#include <algorithm>
#include <array>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ccdm/ccdm.hpp"

namespace fixtures {

inline std::string samples_dir() { return CCDM_SAMPLES_DIR; }
inline std::string reference_scheme_path() { return samples_dir() + "/hzmc_scheme.cfg"; }
inline std::string reference_panel_path() { return samples_dir() + "/hzmc_panel.csv"; }

inline std::string read_file(const std::string& path) { return ccdm::detail::read_file(path); }

// ---------------------------------------------------------------------------
// Reported coordination panel for the reference study: five regions over
// 2015-2022, coupling degree C and coordination degree D as printed (3dp).

constexpr std::array<int, 8> kReportedYears{2015, 2016, 2017, 2018, 2019, 2020, 2021, 2022};

struct ReportedSeries {
    const char* region;
    std::array<double, 8> C;
    std::array<double, 8> D;
};

inline const std::array<ReportedSeries, 5>& reported_panel() {
    static const std::array<ReportedSeries, 5> panel{{
        {"circle",
         {0.329, 0.329, 0.330, 0.331, 0.328, 0.326, 0.326, 0.327},
         {0.271, 0.286, 0.300, 0.319, 0.328, 0.348, 0.360, 0.379}},
        {"hangzhou",
         {0.330, 0.329, 0.332, 0.332, 0.332, 0.333, 0.333, 0.332},
         {0.414, 0.432, 0.452, 0.473, 0.481, 0.512, 0.523, 0.554}},
        {"shaoxing",
         {0.306, 0.317, 0.324, 0.328, 0.323, 0.312, 0.312, 0.312},
         {0.217, 0.224, 0.243, 0.265, 0.283, 0.299, 0.308, 0.314}},
        {"jiaxing",
         {0.284, 0.288, 0.300, 0.294, 0.291, 0.276, 0.285, 0.282},
         {0.191, 0.209, 0.223, 0.245, 0.257, 0.260, 0.288, 0.309}},
        {"huzhou",
         {0.308, 0.309, 0.300, 0.295, 0.270, 0.275, 0.279, 0.282},
         {0.166, 0.190, 0.194, 0.201, 0.195, 0.214, 0.221, 0.230}},
    }};
    return panel;
}

// Reported circle-level lag sequence 2015-2022 as system indices in the
// reference scheme order: 0 = digital_economy, 1 = regional_innovation,
// 2 = talent_employment.
constexpr std::array<std::size_t, 8> kReportedLagSequence{0, 0, 0, 0, 0, 2, 2, 2};

// ---------------------------------------------------------------------------
// Small hand-built schemes for unit tests.

inline ccdm::EvaluationScheme tiny_scheme() {
    ccdm::EvaluationScheme s;
    s.systems = {
        ccdm::SystemSpec{"alpha", "Alpha system",
                         {ccdm::IndicatorSpec{"a1", "A one", "alpha", "core",
                                              ccdm::EffectDirection::Positive, {}},
                          ccdm::IndicatorSpec{"a2", "A two", "alpha", "core",
                                              ccdm::EffectDirection::Negative, {}}}},
        ccdm::SystemSpec{"beta", "Beta system",
                         {ccdm::IndicatorSpec{"b1", "B one", "beta", "core",
                                              ccdm::EffectDirection::Positive, {}},
                          ccdm::IndicatorSpec{"b2", "B two", "beta", "core",
                                              ccdm::EffectDirection::Positive, {}}}},
    };
    return s;
}

inline std::string tiny_scheme_text() {
    return "system alpha \"Alpha system\"\n"
           "indicator a1 \"A one\" system=alpha subsystem=\"core\" direction=+\n"
           "indicator a2 \"A two\" system=alpha subsystem=\"core\" direction=-\n"
           "system beta \"Beta system\"\n"
           "indicator b1 \"B one\" system=beta subsystem=\"core\" direction=+\n"
           "indicator b2 \"B two\" system=beta subsystem=\"core\" direction=+\n";
}

// One CSV row in the long input format.
inline std::string csv_row(const std::string& entity, int period, const std::string& indicator,
                           double value) {
    return entity + "," + std::to_string(period) + "," + indicator + "," +
           ccdm::detail::format_double(value) + "\n";
}

// ---------------------------------------------------------------------------
// Random panels for property and oracle tests. Entity names are zero-padded
// so their lexicographic order equals generation order; periods ascend; the
// scheme lists indicators in generation order. Raw values are therefore laid
// out exactly as the loaded dataset will lay them out.

struct RandomPanel {
    ccdm::EvaluationScheme scheme;
    std::vector<std::string> entities;
    std::vector<int> periods;
    std::vector<std::string> indicator_ids;  // scheme declaration order
    std::vector<double> raw;                 // (e * periods + t) * indicators + j
    std::string csv;                         // rows in shuffled order

    double value(std::size_t e, std::size_t t, std::size_t j) const {
        return raw[(e * periods.size() + t) * indicator_ids.size() + j];
    }
};

inline RandomPanel make_random_panel(std::mt19937& rng, std::size_t entities, std::size_t periods,
                                     const std::vector<std::size_t>& indicators_per_system) {
    RandomPanel p;

    for (std::size_t e = 0; e < entities; ++e) {
        std::string name = "e" + std::to_string(e);
        if (e < 10) name.insert(1, "0");
        p.entities.push_back(name);
    }
    for (std::size_t t = 0; t < periods; ++t) p.periods.push_back(2000 + static_cast<int>(t));

    std::bernoulli_distribution negative(0.25);
    for (std::size_t s = 0; s < indicators_per_system.size(); ++s) {
        ccdm::SystemSpec sys;
        sys.id = "sys" + std::to_string(s);
        sys.label = "System " + std::to_string(s);
        for (std::size_t i = 0; i < indicators_per_system[s]; ++i) {
            ccdm::IndicatorSpec ind;
            ind.id = sys.id + "_x" + std::to_string(i);
            ind.label = "Indicator " + std::to_string(i);
            ind.system_id = sys.id;
            ind.subsystem_label = "main";
            ind.direction = negative(rng) ? ccdm::EffectDirection::Negative
                                          : ccdm::EffectDirection::Positive;
            p.indicator_ids.push_back(ind.id);
            sys.indicators.push_back(std::move(ind));
        }
        p.scheme.systems.push_back(std::move(sys));
    }

    std::uniform_real_distribution<double> value(0.0, 100.0);
    p.raw.resize(entities * periods * p.indicator_ids.size());
    for (double& v : p.raw) v = value(rng);

    std::vector<std::string> rows;
    rows.reserve(p.raw.size());
    for (std::size_t e = 0; e < entities; ++e)
        for (std::size_t t = 0; t < periods; ++t)
            for (std::size_t j = 0; j < p.indicator_ids.size(); ++j)
                rows.push_back(csv_row(p.entities[e], p.periods[t], p.indicator_ids[j],
                                       p.value(e, t, j)));
    std::shuffle(rows.begin(), rows.end(), rng);

    std::ostringstream csv;
    csv << "entity,period,indicator,value\n";
    for (const auto& r : rows) csv << r;
    p.csv = csv.str();
    return p;
}

} // namespace fixtures
