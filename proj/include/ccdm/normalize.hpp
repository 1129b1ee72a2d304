#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ccdm/errors.hpp"
#include "ccdm/panel.hpp"
#include "ccdm/scheme.hpp"

namespace ccdm {

/// Direction-aware min-max rescaling of a raw panel. Self-contained: carries
/// its own axes, the stats it was computed from, and the list of indicators
/// whose pooled range collapsed to a point.
struct NormalizedPanel {
    PanelAxes axes;
    std::vector<double> values;                    // in [0, 1], axes.index() layout
    std::vector<IndicatorStats> stats_used;
    std::vector<std::string> constant_indicators;  // max == min, filled with constant_fill

    double value(std::size_t e, std::size_t t, std::size_t j) const {
        return values[axes.index(e, t, j)];
    }
};

/// Rescales every cell with the pooled per-indicator extrema:
///   positive direction: (x - min) / (max - min)
///   negative direction: (max - x) / (max - min)
/// Indicators with max == min carry no ordering information; every cell gets
/// `constant_fill` and the indicator is flagged.
inline NormalizedPanel normalize(const PanelDataset& ds, const std::vector<IndicatorStats>& stats,
                                 double constant_fill = 0.5) {
    const auto& axes = ds.axes;
    if (constant_fill < 0.0 || constant_fill > 1.0)
        throw ComputeError("normalize: constant_fill " + detail::format_double(constant_fill) +
                           " outside [0, 1]");
    if (stats.size() != axes.indicator_ids.size())
        throw ComputeError("normalize: " + std::to_string(stats.size()) + " stats entries for " +
                           std::to_string(axes.indicator_ids.size()) + " indicators");
    for (std::size_t j = 0; j < stats.size(); ++j)
        if (stats[j].indicator_id != axes.indicator_ids[j])
            throw ComputeError("normalize: stats order mismatch at '" + stats[j].indicator_id +
                               "', expected '" + axes.indicator_ids[j] + "'");

    NormalizedPanel out;
    out.axes = axes;
    out.values.resize(ds.values.size());
    out.stats_used = stats;

    for (std::size_t j = 0; j < axes.indicator_ids.size(); ++j) {
        const IndicatorStats& st = stats[j];
        const IndicatorSpec* spec = ds.scheme.find_indicator(axes.indicator_ids[j]);
        if (!spec)
            throw ComputeError("normalize: indicator '" + axes.indicator_ids[j] +
                               "' not in the dataset's scheme");
        double range = st.max - st.min;
        if (range == 0.0) {
            out.constant_indicators.push_back(axes.indicator_ids[j]);
            for (std::size_t e = 0; e < axes.entities.size(); ++e)
                for (std::size_t t = 0; t < axes.periods.size(); ++t)
                    out.values[axes.index(e, t, j)] = constant_fill;
            continue;
        }
        bool positive = spec->direction == EffectDirection::Positive;
        for (std::size_t e = 0; e < axes.entities.size(); ++e)
            for (std::size_t t = 0; t < axes.periods.size(); ++t) {
                double x = ds.value(e, t, j);
                double v = positive ? (x - st.min) / range : (st.max - x) / range;
                out.values[axes.index(e, t, j)] = v;
            }
    }
    return out;
}

} // namespace ccdm
