#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccdm/errors.hpp"
#include "ccdm/scheme.hpp"

namespace ccdm {

/// Shared axis layout of a dense panel: entities x periods x indicators.
/// Entities are sorted lexicographically, periods ascending, indicators in
/// scheme declaration order, so identical input content always yields the
/// same layout regardless of row order.
struct PanelAxes {
    std::vector<std::string> entities;
    std::vector<int> periods;
    std::vector<std::string> indicator_ids;

    bool operator==(const PanelAxes&) const = default;

    std::size_t cell_count() const { return entities.size() * periods.size() * indicator_ids.size(); }

    std::size_t index(std::size_t e, std::size_t t, std::size_t j) const {
        return (e * periods.size() + t) * indicator_ids.size() + j;
    }

    std::optional<std::size_t> entity_index(std::string_view id) const {
        for (std::size_t i = 0; i < entities.size(); ++i)
            if (entities[i] == id) return i;
        return std::nullopt;
    }

    std::optional<std::size_t> period_index(int period) const {
        for (std::size_t i = 0; i < periods.size(); ++i)
            if (periods[i] == period) return i;
        return std::nullopt;
    }

    std::optional<std::size_t> indicator_index(std::string_view id) const {
        for (std::size_t i = 0; i < indicator_ids.size(); ++i)
            if (indicator_ids[i] == id) return i;
        return std::nullopt;
    }
};

enum class MissingPolicy { Fail, Interpolate, DropEntity };

/// One gap filled by the Interpolate policy.
struct FilledCell {
    std::string entity;
    int period = 0;
    std::string indicator_id;
    double value = 0.0;

    bool operator==(const FilledCell&) const = default;
};

/// What ingest did to the raw rows before the dataset became dense.
struct LoadReport {
    std::vector<FilledCell> filled;               // Interpolate only, sorted (entity, period, indicator)
    std::vector<std::string> dropped_entities;    // DropEntity only, sorted
    std::size_t row_count = 0;                    // data rows read, before any drop

    bool operator==(const LoadReport&) const = default;
};

/// Dense raw panel tied to the scheme it was loaded against.
struct PanelDataset {
    PanelAxes axes;
    std::vector<double> values;  // axes.cell_count() entries, axes.index() layout
    EvaluationScheme scheme;

    double value(std::size_t e, std::size_t t, std::size_t j) const {
        return values[axes.index(e, t, j)];
    }
};

struct LoadResult {
    PanelDataset dataset;
    LoadReport report;
};

/// Pooled per-indicator summary over every entity and period.
struct IndicatorStats {
    std::string indicator_id;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double population_std = 0.0;  // divisor n, not n-1

    bool operator==(const IndicatorStats&) const = default;
};

namespace detail {

struct CsvRow {
    std::string entity;
    int period = 0;
    std::string indicator_id;
    double value = 0.0;
};

// Splits one CSV line into exactly `n` plain fields. Values never contain
// commas or quotes in this format, so no quoting rules apply.
inline std::vector<std::string_view> split_csv_line(std::string_view line, std::size_t n,
                                                    std::size_t line_no) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (fields.size() != n)
        throw DataError("panel csv line " + std::to_string(line_no) + ": expected " +
                        std::to_string(n) + " fields, got " + std::to_string(fields.size()));
    return fields;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Linear fill for one entity/indicator series with gaps. Interior gaps
// interpolate between the nearest observed neighbors in period value;
// boundary gaps copy the nearest observed point.
inline void fill_series(const std::vector<int>& periods, std::vector<double>& series,
                        const std::vector<bool>& present, const std::string& entity,
                        const std::string& indicator_id, std::vector<FilledCell>& filled) {
    const std::size_t n = periods.size();
    std::size_t observed = 0;
    for (bool p : present)
        if (p) ++observed;
    if (observed == 0)
        throw DataError("cannot interpolate: entity '" + entity + "' has no observations for '" +
                        indicator_id + "'");
    if (observed == n) return;

    for (std::size_t t = 0; t < n; ++t) {
        if (present[t]) continue;
        // nearest observed neighbors on each side
        std::optional<std::size_t> lo, hi;
        for (std::size_t i = t; i-- > 0;)
            if (present[i]) { lo = i; break; }
        for (std::size_t i = t + 1; i < n; ++i)
            if (present[i]) { hi = i; break; }

        double v;
        if (lo && hi) {
            double span = static_cast<double>(periods[*hi] - periods[*lo]);
            double frac = static_cast<double>(periods[t] - periods[*lo]) / span;
            v = series[*lo] + frac * (series[*hi] - series[*lo]);
        } else if (lo) {
            v = series[*lo];
        } else {
            v = series[*hi];
        }
        series[t] = v;
        filled.push_back(FilledCell{entity, periods[t], indicator_id, v});
    }
}

} // namespace detail

/// Reads long-format CSV (`entity,period,indicator,value` with that exact
/// header) into a dense panel over the scheme's indicators. The period grid is
/// the union of all observed periods; gaps are handled per `policy`.
/// Duplicate cells are always an error.
inline LoadResult load_panel(std::string_view csv_text, const EvaluationScheme& scheme,
                             MissingPolicy policy = MissingPolicy::Fail) {
    std::vector<detail::CsvRow> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos <= csv_text.size()) {
        std::size_t eol = csv_text.find('\n', pos);
        std::string_view raw =
            csv_text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? csv_text.size() + 1 : eol + 1;
        ++line_no;

        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        if (detail::trim(raw).empty()) continue;

        if (!header_seen) {
            auto fields = detail::split_csv_line(raw, 4, line_no);
            if (detail::trim(fields[0]) != "entity" || detail::trim(fields[1]) != "period" ||
                detail::trim(fields[2]) != "indicator" || detail::trim(fields[3]) != "value")
                throw DataError("panel csv line " + std::to_string(line_no) +
                                ": header must be 'entity,period,indicator,value'");
            header_seen = true;
            continue;
        }

        auto fields = detail::split_csv_line(raw, 4, line_no);
        detail::CsvRow row;
        row.entity = std::string(detail::trim(fields[0]));
        if (row.entity.empty())
            throw DataError("panel csv line " + std::to_string(line_no) + ": empty entity");
        std::string_view period_tok = detail::trim(fields[1]);
        if (!detail::parse_int(period_tok, row.period))
            throw DataError("panel csv line " + std::to_string(line_no) + ": bad period '" +
                            std::string(period_tok) + "'");
        row.indicator_id = std::string(detail::trim(fields[2]));
        if (!scheme.find_indicator(row.indicator_id))
            throw DataError("panel csv line " + std::to_string(line_no) + ": unknown indicator '" +
                            row.indicator_id + "'");
        std::string_view value_tok = detail::trim(fields[3]);
        if (!detail::parse_double(value_tok, row.value))
            throw DataError("panel csv line " + std::to_string(line_no) + ": bad value '" +
                            std::string(value_tok) + "' (must be a finite number)");
        rows.push_back(std::move(row));
    }
    if (!header_seen) throw DataError("panel csv: missing header line");
    if (rows.empty()) throw DataError("panel csv: no data rows");

    // Canonical axes. The period grid is fixed by the whole file, before any
    // entity is dropped.
    PanelAxes axes;
    for (const auto& r : rows) {
        if (std::find(axes.entities.begin(), axes.entities.end(), r.entity) == axes.entities.end())
            axes.entities.push_back(r.entity);
        if (std::find(axes.periods.begin(), axes.periods.end(), r.period) == axes.periods.end())
            axes.periods.push_back(r.period);
    }
    std::sort(axes.entities.begin(), axes.entities.end());
    std::sort(axes.periods.begin(), axes.periods.end());
    for (const auto* ind : scheme.all_indicators()) axes.indicator_ids.push_back(ind->id);

    std::vector<double> values(axes.cell_count(), 0.0);
    std::vector<bool> present(axes.cell_count(), false);
    for (const auto& r : rows) {
        std::size_t e = *axes.entity_index(r.entity);
        std::size_t t = *axes.period_index(r.period);
        std::size_t j = *axes.indicator_index(r.indicator_id);
        std::size_t idx = axes.index(e, t, j);
        if (present[idx])
            throw DataError("panel csv: duplicate cell (" + r.entity + ", " +
                            std::to_string(r.period) + ", " + r.indicator_id + ")");
        present[idx] = true;
        values[idx] = r.value;
    }

    LoadReport report;
    report.row_count = rows.size();

    if (policy == MissingPolicy::Fail) {
        for (std::size_t e = 0; e < axes.entities.size(); ++e)
            for (std::size_t j = 0; j < axes.indicator_ids.size(); ++j)
                for (std::size_t t = 0; t < axes.periods.size(); ++t)
                    if (!present[axes.index(e, t, j)])
                        throw DataError("panel csv: missing cell (" + axes.entities[e] + ", " +
                                        std::to_string(axes.periods[t]) + ", " +
                                        axes.indicator_ids[j] + ")");
    } else if (policy == MissingPolicy::Interpolate) {
        for (std::size_t e = 0; e < axes.entities.size(); ++e)
            for (std::size_t j = 0; j < axes.indicator_ids.size(); ++j) {
                std::vector<double> series(axes.periods.size());
                std::vector<bool> series_present(axes.periods.size());
                bool any_gap = false;
                for (std::size_t t = 0; t < axes.periods.size(); ++t) {
                    std::size_t idx = axes.index(e, t, j);
                    series[t] = values[idx];
                    series_present[t] = present[idx];
                    if (!present[idx]) any_gap = true;
                }
                if (!any_gap) continue;
                detail::fill_series(axes.periods, series, series_present, axes.entities[e],
                                    axes.indicator_ids[j], report.filled);
                for (std::size_t t = 0; t < axes.periods.size(); ++t)
                    values[axes.index(e, t, j)] = series[t];
            }
        std::sort(report.filled.begin(), report.filled.end(),
                  [](const FilledCell& a, const FilledCell& b) {
                      if (a.entity != b.entity) return a.entity < b.entity;
                      if (a.period != b.period) return a.period < b.period;
                      return a.indicator_id < b.indicator_id;
                  });
    } else {  // DropEntity
        std::vector<std::string> kept;
        for (std::size_t e = 0; e < axes.entities.size(); ++e) {
            bool complete = true;
            for (std::size_t t = 0; t < axes.periods.size() && complete; ++t)
                for (std::size_t j = 0; j < axes.indicator_ids.size() && complete; ++j)
                    if (!present[axes.index(e, t, j)]) complete = false;
            if (complete)
                kept.push_back(axes.entities[e]);
            else
                report.dropped_entities.push_back(axes.entities[e]);
        }
        if (kept.empty())
            throw DataError("panel csv: every entity has missing cells, nothing left after drop");
        if (kept.size() != axes.entities.size()) {
            std::vector<double> kept_values;
            kept_values.reserve(kept.size() * axes.periods.size() * axes.indicator_ids.size());
            for (const auto& entity : kept) {
                std::size_t e = *axes.entity_index(entity);
                for (std::size_t t = 0; t < axes.periods.size(); ++t)
                    for (std::size_t j = 0; j < axes.indicator_ids.size(); ++j)
                        kept_values.push_back(values[axes.index(e, t, j)]);
            }
            axes.entities = kept;
            values = std::move(kept_values);
        }
    }

    LoadResult result;
    result.dataset.axes = std::move(axes);
    result.dataset.values = std::move(values);
    result.dataset.scheme = scheme;
    result.report = std::move(report);
    return result;
}

/// Per-indicator min/max/mean/std pooled over all entities and periods.
/// Two-pass mean-then-variance; std uses divisor n.
inline std::vector<IndicatorStats> dataset_stats(const PanelDataset& ds) {
    const auto& axes = ds.axes;
    const std::size_t cells = axes.entities.size() * axes.periods.size();
    if (cells == 0) throw ComputeError("dataset_stats: empty panel");

    std::vector<IndicatorStats> stats;
    stats.reserve(axes.indicator_ids.size());
    for (std::size_t j = 0; j < axes.indicator_ids.size(); ++j) {
        IndicatorStats st;
        st.indicator_id = axes.indicator_ids[j];
        double sum = 0.0;
        st.min = ds.value(0, 0, j);
        st.max = st.min;
        for (std::size_t e = 0; e < axes.entities.size(); ++e)
            for (std::size_t t = 0; t < axes.periods.size(); ++t) {
                double v = ds.value(e, t, j);
                st.min = std::min(st.min, v);
                st.max = std::max(st.max, v);
                sum += v;
            }
        st.mean = sum / static_cast<double>(cells);
        double sq = 0.0;
        for (std::size_t e = 0; e < axes.entities.size(); ++e)
            for (std::size_t t = 0; t < axes.periods.size(); ++t) {
                double d = ds.value(e, t, j) - st.mean;
                sq += d * d;
            }
        st.population_std = std::sqrt(sq / static_cast<double>(cells));
        stats.push_back(std::move(st));
    }
    return stats;
}

} // namespace ccdm
