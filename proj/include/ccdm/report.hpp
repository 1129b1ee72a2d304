#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ccdm/coupling.hpp"
#include "ccdm/normalize.hpp"
#include "ccdm/panel.hpp"
#include "ccdm/scoring.hpp"
#include "ccdm/weighting.hpp"

namespace ccdm {

/// Numeric rendering for exported tables. Report3dp prints fixed 3 decimals
/// (ties round half to even); Full prints the shortest decimal that parses
/// back to the same double.
enum class PrecisionMode { Report3dp, Full };

inline const char* precision_mode_name(PrecisionMode m) {
    return m == PrecisionMode::Report3dp ? "report" : "full";
}

namespace detail {

inline std::string format_general(double v, int significant) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, significant);
    return std::string(buf, res.ptr);
}

inline std::string format_metric(double v, PrecisionMode mode) {
    return mode == PrecisionMode::Report3dp ? format_fixed(v, 3) : format_double(v);
}

inline std::string escape_json(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

} // namespace detail

/// FNV-1a 64-bit content digest, rendered as 16 hex digits.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string fnv1a64_hex(std::string_view bytes) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

/// `indicator,min,max,mean,std`, full precision.
inline std::string stats_csv(const std::vector<IndicatorStats>& stats) {
    std::ostringstream out;
    out << "indicator,min,max,mean,std\n";
    for (const auto& st : stats)
        out << st.indicator_id << ',' << detail::format_double(st.min) << ','
            << detail::format_double(st.max) << ',' << detail::format_double(st.mean) << ','
            << detail::format_double(st.population_std) << '\n';
    return out.str();
}

/// Long-format dump of the normalized panel, 12 significant digits.
inline std::string normalized_csv(const NormalizedPanel& panel) {
    const auto& axes = panel.axes;
    std::ostringstream out;
    out << "entity,period,indicator,value_normalized\n";
    for (std::size_t e = 0; e < axes.entities.size(); ++e)
        for (std::size_t t = 0; t < axes.periods.size(); ++t)
            for (std::size_t j = 0; j < axes.indicator_ids.size(); ++j)
                out << axes.entities[e] << ',' << axes.periods[t] << ',' << axes.indicator_ids[j]
                    << ',' << detail::format_general(panel.value(e, t, j), 12) << '\n';
    return out.str();
}

/// `system,indicator,weight,method`, 6 decimal places.
inline std::string weights_csv(const WeightingResult& weighting) {
    std::ostringstream out;
    out << "system,indicator,weight,method\n";
    for (const auto& wv : weighting.systems)
        for (const auto& [id, w] : wv.weights)
            out << wv.system_id << ',' << id << ',' << detail::format_fixed(w, 6) << ','
                << weight_method_name(wv.method) << '\n';
    return out.str();
}

/// `entity,period,system,score`.
inline std::string scores_csv(const SystemScoreSeries& series, PrecisionMode mode) {
    std::ostringstream out;
    out << "entity,period,system,score\n";
    for (std::size_t e = 0; e < series.entities.size(); ++e)
        for (std::size_t t = 0; t < series.periods.size(); ++t)
            for (std::size_t s = 0; s < series.system_ids.size(); ++s)
                out << series.entities[e] << ',' << series.periods[t] << ','
                    << series.system_ids[s] << ','
                    << detail::format_metric(series.score(e, t, s), mode) << '\n';
    return out.str();
}

/// One score trajectory per (entity, system), periods in panel order.
inline std::string trajectories_json(const SystemScoreSeries& series, PrecisionMode mode) {
    std::ostringstream out;
    out << "{\n  \"series\": [";
    bool first = true;
    for (std::size_t e = 0; e < series.entities.size(); ++e)
        for (std::size_t s = 0; s < series.system_ids.size(); ++s) {
            out << (first ? "\n" : ",\n");
            first = false;
            out << "    {\"entity\": \"" << detail::escape_json(series.entities[e])
                << "\", \"system\": \"" << detail::escape_json(series.system_ids[s])
                << "\", \"periods\": [";
            for (std::size_t t = 0; t < series.periods.size(); ++t)
                out << (t ? ", " : "") << series.periods[t];
            out << "], \"scores\": [";
            for (std::size_t t = 0; t < series.periods.size(); ++t)
                out << (t ? ", " : "") << detail::format_metric(series.score(e, t, s), mode);
            out << "]}";
        }
    out << "\n  ]\n}\n";
    return out.str();
}

/// `entity,period,C,C_rescaled,T,D,stage_C,stage_D,lag,lag_tied`. The lag
/// column prints the trailing system's id.
inline std::string coupling_csv(const std::vector<CouplingRecord>& records,
                                const std::vector<std::string>& system_ids, PrecisionMode mode) {
    std::ostringstream out;
    out << "entity,period,C,C_rescaled,T,D,stage_C,stage_D,lag,lag_tied\n";
    for (const auto& rec : records) {
        out << rec.entity << ',' << rec.period << ',' << detail::format_metric(rec.C, mode) << ','
            << detail::format_metric(rec.C_rescaled, mode) << ','
            << detail::format_metric(rec.T, mode) << ',' << detail::format_metric(rec.D, mode)
            << ',' << stage_name(rec.stage_C) << ',' << stage_name(rec.stage_D) << ','
            << system_ids.at(rec.lag.system_index) << ',' << (rec.lag.tied ? "true" : "false")
            << '\n';
    }
    return out.str();
}

/// `{filled: [...], dropped_entities: [...], row_count: n}`.
inline std::string load_report_json(const LoadReport& report) {
    std::ostringstream out;
    out << "{\n  \"filled\": [";
    for (std::size_t i = 0; i < report.filled.size(); ++i) {
        const auto& f = report.filled[i];
        out << (i ? ",\n" : "\n") << "    {\"entity\": \"" << detail::escape_json(f.entity)
            << "\", \"period\": " << f.period << ", \"indicator\": \""
            << detail::escape_json(f.indicator_id)
            << "\", \"value\": " << detail::format_double(f.value) << "}";
    }
    out << (report.filled.empty() ? "]" : "\n  ]");
    out << ",\n  \"dropped_entities\": [";
    for (std::size_t i = 0; i < report.dropped_entities.size(); ++i)
        out << (i ? ", " : "") << '"' << detail::escape_json(report.dropped_entities[i]) << '"';
    out << "],\n  \"row_count\": " << report.row_count << "\n}\n";
    return out.str();
}

} // namespace ccdm
