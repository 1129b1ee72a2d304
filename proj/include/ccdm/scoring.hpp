#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ccdm/errors.hpp"
#include "ccdm/normalize.hpp"
#include "ccdm/scheme.hpp"
#include "ccdm/weighting.hpp"

namespace ccdm {

/// Composite development index per (entity, period, system), each a weighted
/// sum of normalized indicator values, so always in [0, 1].
struct SystemScoreSeries {
    std::vector<std::string> entities;
    std::vector<int> periods;
    std::vector<std::string> system_ids;
    std::vector<double> scores;  // (e * periods + t) * systems + s
    std::vector<WeightVector> weights_used;

    std::size_t index(std::size_t e, std::size_t t, std::size_t s) const {
        return (e * periods.size() + t) * system_ids.size() + s;
    }

    double score(std::size_t e, std::size_t t, std::size_t s) const {
        return scores[index(e, t, s)];
    }

    std::optional<std::size_t> entity_index(std::string_view id) const {
        for (std::size_t i = 0; i < entities.size(); ++i)
            if (entities[i] == id) return i;
        return std::nullopt;
    }
};

/// Weighted sums of normalized values per system. Weights must cover each
/// system's indicators exactly; scores are clamped into [0, 1] to absorb
/// last-bit rounding.
inline SystemScoreSeries cdi(const NormalizedPanel& panel, const WeightingResult& weighting,
                             const EvaluationScheme& scheme) {
    const auto& axes = panel.axes;
    if (weighting.systems.size() != scheme.systems.size())
        throw ComputeError("cdi: " + std::to_string(weighting.systems.size()) +
                           " weight vectors for " + std::to_string(scheme.systems.size()) +
                           " systems");

    // per system: panel column index of each indicator, paired with its weight
    std::vector<std::vector<std::pair<std::size_t, double>>> layout;
    layout.reserve(scheme.systems.size());
    for (std::size_t s = 0; s < scheme.systems.size(); ++s) {
        const SystemSpec& sys = scheme.systems[s];
        const WeightVector& wv = weighting.systems[s];
        if (wv.system_id != sys.id)
            throw ComputeError("cdi: weight vector order mismatch at '" + wv.system_id +
                               "', expected '" + sys.id + "'");
        if (wv.weights.size() != sys.indicators.size())
            throw ComputeError("cdi: system '" + sys.id + "' has " +
                               std::to_string(sys.indicators.size()) + " indicators but " +
                               std::to_string(wv.weights.size()) + " weights");
        std::vector<std::pair<std::size_t, double>> cols;
        cols.reserve(sys.indicators.size());
        for (std::size_t i = 0; i < sys.indicators.size(); ++i) {
            if (wv.weights[i].first != sys.indicators[i].id)
                throw ComputeError("cdi: weight order mismatch in system '" + sys.id + "' at '" +
                                   wv.weights[i].first + "', expected '" + sys.indicators[i].id +
                                   "'");
            auto j = axes.indicator_index(sys.indicators[i].id);
            if (!j)
                throw ComputeError("cdi: indicator '" + sys.indicators[i].id +
                                   "' not in the panel");
            cols.emplace_back(*j, wv.weights[i].second);
        }
        layout.push_back(std::move(cols));
    }

    SystemScoreSeries out;
    out.entities = axes.entities;
    out.periods = axes.periods;
    for (const auto& sys : scheme.systems) out.system_ids.push_back(sys.id);
    out.weights_used = weighting.systems;
    out.scores.resize(axes.entities.size() * axes.periods.size() * scheme.systems.size());

    for (std::size_t e = 0; e < axes.entities.size(); ++e)
        for (std::size_t t = 0; t < axes.periods.size(); ++t)
            for (std::size_t s = 0; s < scheme.systems.size(); ++s) {
                double acc = 0.0;
                for (const auto& [j, w] : layout[s]) acc += w * panel.value(e, t, j);
                out.scores[out.index(e, t, s)] = std::clamp(acc, 0.0, 1.0);
            }
    return out;
}

enum class AggregateMode { MeanOfScores };

/// Collapses a subset of entities into one synthetic entity by averaging
/// their scores cell-wise. The result has the same periods and systems and a
/// single entity named `aggregate_id`.
inline SystemScoreSeries aggregate_scores(const SystemScoreSeries& series,
                                          const std::vector<std::string>& members,
                                          const std::string& aggregate_id,
                                          AggregateMode mode = AggregateMode::MeanOfScores) {
    (void)mode;  // one mode today; the parameter pins the contract
    if (members.empty()) throw ComputeError("aggregate_scores: empty member list");

    std::vector<std::size_t> rows;
    rows.reserve(members.size());
    for (const auto& m : members) {
        auto e = series.entity_index(m);
        if (!e) throw ComputeError("aggregate_scores: unknown entity '" + m + "'");
        rows.push_back(*e);
    }

    SystemScoreSeries out;
    out.entities = {aggregate_id};
    out.periods = series.periods;
    out.system_ids = series.system_ids;
    out.weights_used = series.weights_used;
    out.scores.resize(series.periods.size() * series.system_ids.size());

    const double n = static_cast<double>(rows.size());
    for (std::size_t t = 0; t < series.periods.size(); ++t)
        for (std::size_t s = 0; s < series.system_ids.size(); ++s) {
            double sum = 0.0;
            for (std::size_t e : rows) sum += series.score(e, t, s);
            out.scores[out.index(0, t, s)] = sum / n;
        }
    return out;
}

} // namespace ccdm
