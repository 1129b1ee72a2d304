#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "ccdm/coupling.hpp"
#include "ccdm/errors.hpp"
#include "ccdm/normalize.hpp"
#include "ccdm/panel.hpp"
#include "ccdm/report.hpp"
#include "ccdm/scheme.hpp"
#include "ccdm/scoring.hpp"
#include "ccdm/weighting.hpp"

namespace ccdm {

/// Named entity subset scored as one synthetic region next to its members.
struct AggregateGroup {
    std::string name;
    std::vector<std::string> members;

    bool operator==(const AggregateGroup&) const = default;
};

/// Everything a batch run needs. Paths are taken as given (and echoed into
/// the manifest untouched, so identical configs yield identical manifests).
struct RunConfig {
    std::string scheme_path;
    std::string data_path;
    std::string output_dir;
    WeightMethod weight_method = WeightMethod::Msd;
    MissingPolicy missing_policy = MissingPolicy::Fail;
    double constant_fill = 0.5;
    std::vector<AggregateGroup> aggregate_groups;
    PrecisionMode precision = PrecisionMode::Report3dp;
    std::optional<StageThresholds> stage_override;
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ComputeError("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ComputeError("write failed for '" + path.string() + "'");
}

inline const char* missing_policy_name(MissingPolicy p) {
    switch (p) {
        case MissingPolicy::Fail: return "fail";
        case MissingPolicy::Interpolate: return "interpolate";
        case MissingPolicy::DropEntity: return "drop-entity";
    }
    return "?";
}

} // namespace detail

inline std::optional<WeightMethod> weight_method_from_name(std::string_view name) {
    if (name == "msd") return WeightMethod::Msd;
    if (name == "fixed") return WeightMethod::Fixed;
    if (name == "equal") return WeightMethod::Equal;
    return std::nullopt;
}

inline std::optional<MissingPolicy> missing_policy_from_name(std::string_view name) {
    if (name == "fail") return MissingPolicy::Fail;
    if (name == "interpolate") return MissingPolicy::Interpolate;
    if (name == "drop-entity") return MissingPolicy::DropEntity;
    return std::nullopt;
}

struct ValidateOutcome {
    bool ok = false;
    std::string json;  // machine-readable report
};

/// Checks the scheme (parse + invariants) and, when a data path is set, that
/// the panel loads under the configured missing policy. Never throws for
/// content problems; those land in the report with ok = false.
inline ValidateOutcome run_validate(const RunConfig& config) {
    std::ostringstream out;
    bool scheme_ok = false;
    bool data_ok = true;

    out << "{\n  \"scheme\": {";
    std::optional<SchemeParseResult> parsed;
    try {
        parsed = parse_scheme(detail::read_file(config.scheme_path));
        ValidationReport violations = validate_scheme(parsed->scheme);
        scheme_ok = violations.empty();
        out << "\n    \"ok\": " << (scheme_ok ? "true" : "false") << ",\n    \"violations\": [";
        for (std::size_t i = 0; i < violations.size(); ++i)
            out << (i ? ",\n" : "\n") << "      {\"element\": \""
                << detail::escape_json(violations[i].element) << "\", \"message\": \""
                << detail::escape_json(violations[i].message) << "\"}";
        out << (violations.empty() ? "]" : "\n    ]");
        out << ",\n    \"renormalized_systems\": [";
        for (std::size_t i = 0; i < parsed->adjustments.size(); ++i)
            out << (i ? ",\n" : "\n") << "      {\"system\": \""
                << detail::escape_json(parsed->adjustments[i].system_id)
                << "\", \"original_sum\": " << detail::format_double(parsed->adjustments[i].original_sum)
                << "}";
        out << (parsed->adjustments.empty() ? "]" : "\n    ]") << "\n  }";
    } catch (const Error& e) {
        out << "\n    \"ok\": false,\n    \"error\": \"" << detail::escape_json(e.what())
            << "\"\n  }";
    }

    if (!config.data_path.empty()) {
        out << ",\n  \"data\": {";
        if (!parsed || !scheme_ok) {
            data_ok = false;
            out << "\n    \"ok\": false,\n    \"error\": \"skipped: scheme invalid\"\n  }";
        } else {
            try {
                LoadResult loaded =
                    load_panel(detail::read_file(config.data_path), parsed->scheme,
                               config.missing_policy);
                out << "\n    \"ok\": true,\n    \"row_count\": " << loaded.report.row_count
                    << ",\n    \"filled_count\": " << loaded.report.filled.size()
                    << ",\n    \"dropped_entities\": [";
                for (std::size_t i = 0; i < loaded.report.dropped_entities.size(); ++i)
                    out << (i ? ", " : "") << '"'
                        << detail::escape_json(loaded.report.dropped_entities[i]) << '"';
                out << "]\n  }";
            } catch (const Error& e) {
                data_ok = false;
                out << "\n    \"ok\": false,\n    \"error\": \"" << detail::escape_json(e.what())
                    << "\"\n  }";
            }
        }
    }

    ValidateOutcome outcome;
    outcome.ok = scheme_ok && data_ok;
    out << ",\n  \"ok\": " << (outcome.ok ? "true" : "false") << "\n}\n";
    outcome.json = out.str();
    return outcome;
}

/// Full in-memory result of a batch run, self-contained by value.
struct RunOutputs {
    EvaluationScheme scheme;
    std::vector<WeightAdjustment> scheme_adjustments;  // rescaled at parse time
    PanelDataset dataset;
    LoadReport load_report;
    std::vector<IndicatorStats> stats;
    NormalizedPanel normalized;
    WeightingResult weighting;
    SystemScoreSeries scores;    // loaded entities only
    SystemScoreSeries combined;  // entities plus aggregate groups
    std::vector<CouplingRecord> records;
    StageThresholds thresholds_used;
    std::vector<std::string> files_written;  // relative to output_dir, write order
};

namespace detail {

// Appends aggregate groups to a base series as extra synthetic entities.
inline SystemScoreSeries combine_with_aggregates(const SystemScoreSeries& base,
                                                 const std::vector<AggregateGroup>& groups) {
    if (groups.empty()) return base;

    std::unordered_set<std::string> taken(base.entities.begin(), base.entities.end());
    for (const auto& g : groups) {
        if (g.name.empty()) throw DataError("aggregate group with empty name");
        if (!taken.insert(g.name).second)
            throw DataError("aggregate name '" + g.name +
                            "' collides with an entity or another aggregate");
        if (g.members.empty()) throw DataError("aggregate '" + g.name + "' has no members");
        for (const auto& m : g.members)
            if (!base.entity_index(m))
                throw DataError("aggregate '" + g.name + "' references unknown entity '" + m +
                                "'");
    }

    SystemScoreSeries out = base;
    for (const auto& g : groups) {
        SystemScoreSeries agg = aggregate_scores(base, g.members, g.name);
        out.entities.push_back(g.name);
        out.scores.insert(out.scores.end(), agg.scores.begin(), agg.scores.end());
    }
    return out;
}

inline std::string manifest_json(const RunConfig& config, std::string_view scheme_text,
                                 std::string_view data_text, const RunOutputs& outputs,
                                 const std::vector<std::string>& output_files) {
    std::ostringstream out;
    out << "{\n  \"manifest_version\": 1,\n  \"inputs\": {\n";
    out << "    \"scheme\": {\"path\": \"" << escape_json(config.scheme_path)
        << "\", \"digest_fnv1a64\": \"" << fnv1a64_hex(scheme_text) << "\"},\n";
    out << "    \"data\": {\"path\": \"" << escape_json(config.data_path)
        << "\", \"digest_fnv1a64\": \"" << fnv1a64_hex(data_text) << "\"}\n  },\n";
    out << "  \"options\": {\n";
    out << "    \"weights\": {\"method\": \"" << weight_method_name(config.weight_method)
        << "\", \"adjusted_systems\": [";
    for (std::size_t i = 0; i < outputs.scheme_adjustments.size(); ++i)
        out << (i ? ", " : "") << "{\"system\": \""
            << escape_json(outputs.scheme_adjustments[i].system_id) << "\", \"original_sum\": "
            << format_double(outputs.scheme_adjustments[i].original_sum) << "}";
    out << "]},\n";
    out << "    \"missing\": \"" << missing_policy_name(config.missing_policy) << "\",\n";
    out << "    \"constant_fill\": " << format_double(config.constant_fill) << ",\n";
    out << "    \"precision\": \"" << precision_mode_name(config.precision) << "\",\n";
    const auto& t = outputs.thresholds_used;
    out << "    \"stages\": [" << format_double(t.t1) << ", " << format_double(t.t2) << ", "
        << format_double(t.t3) << "],\n";
    out << "    \"aggregates\": [";
    for (std::size_t i = 0; i < config.aggregate_groups.size(); ++i) {
        const auto& g = config.aggregate_groups[i];
        out << (i ? ",\n" : "\n") << "      {\"name\": \"" << escape_json(g.name)
            << "\", \"members\": [";
        for (std::size_t m = 0; m < g.members.size(); ++m)
            out << (m ? ", " : "") << '"' << escape_json(g.members[m]) << '"';
        out << "]}";
    }
    out << (config.aggregate_groups.empty() ? "]" : "\n    ]") << "\n  },\n";
    out << "  \"outputs\": [";
    for (std::size_t i = 0; i < output_files.size(); ++i)
        out << (i ? ", " : "") << '"' << escape_json(output_files[i]) << '"';
    out << "]\n}\n";
    return out.str();
}

} // namespace detail

/// Executes the whole pipeline and writes every artifact into
/// config.output_dir: load_report.json, stats.csv, normalized.csv,
/// weights.csv, scores.csv, trajectories.json, coupling.csv, manifest.json.
/// Any failure after output begins leaves an INCOMPLETE marker file behind.
/// Reruns with identical inputs produce byte-identical files.
inline RunOutputs run_pipeline(const RunConfig& config) {
    if (config.output_dir.empty()) throw DataError("run: output directory not set");
    if (config.constant_fill < 0.0 || config.constant_fill > 1.0)
        throw DataError("run: constant-fill " + detail::format_double(config.constant_fill) +
                        " outside [0, 1]");
    if (config.stage_override) {
        const auto& t = *config.stage_override;
        if (!(0.0 < t.t1 && t.t1 < t.t2 && t.t2 < t.t3 && t.t3 < 1.0))
            throw DataError("run: stage thresholds must be strictly increasing within (0, 1)");
    }

    std::string scheme_text = detail::read_file(config.scheme_path);
    std::string data_text = detail::read_file(config.data_path);

    RunOutputs outputs;
    SchemeParseResult parsed = parse_scheme(scheme_text);
    outputs.scheme = std::move(parsed.scheme);
    outputs.scheme_adjustments = std::move(parsed.adjustments);

    LoadResult loaded = load_panel(data_text, outputs.scheme, config.missing_policy);
    outputs.dataset = std::move(loaded.dataset);
    outputs.load_report = std::move(loaded.report);

    outputs.stats = dataset_stats(outputs.dataset);
    outputs.normalized = normalize(outputs.dataset, outputs.stats, config.constant_fill);

    switch (config.weight_method) {
        case WeightMethod::Msd:
            outputs.weighting = msd_weights(outputs.normalized, outputs.scheme);
            break;
        case WeightMethod::Fixed:
            outputs.weighting = fixed_weights(outputs.scheme);
            break;
        case WeightMethod::Equal:
            outputs.weighting = equal_weights(outputs.scheme);
            break;
    }

    outputs.scores = cdi(outputs.normalized, outputs.weighting, outputs.scheme);
    outputs.combined = detail::combine_with_aggregates(outputs.scores, config.aggregate_groups);
    outputs.thresholds_used = config.stage_override
                                  ? *config.stage_override
                                  : outputs.scheme.stage_thresholds.value_or(StageThresholds{});
    outputs.records = evaluate(outputs.combined, outputs.scheme, outputs.thresholds_used);

    namespace fs = std::filesystem;
    fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ComputeError("cannot create output directory '" + config.output_dir + "'");
    fs::remove(dir / "INCOMPLETE", ec);  // stale marker from an aborted run

    try {
        auto emit = [&](const char* name, std::string_view content) {
            detail::write_file(dir / name, content);
            outputs.files_written.push_back(name);
        };
        emit("load_report.json", load_report_json(outputs.load_report));
        emit("stats.csv", stats_csv(outputs.stats));
        emit("normalized.csv", normalized_csv(outputs.normalized));
        emit("weights.csv", weights_csv(outputs.weighting));
        emit("scores.csv", scores_csv(outputs.combined, config.precision));
        emit("trajectories.json", trajectories_json(outputs.combined, config.precision));
        emit("coupling.csv",
             coupling_csv(outputs.records, outputs.combined.system_ids, config.precision));
        detail::write_file(dir / "manifest.json",
                           detail::manifest_json(config, scheme_text, data_text, outputs,
                                                 outputs.files_written));
        outputs.files_written.push_back("manifest.json");
    } catch (...) {
        std::ofstream marker(dir / "INCOMPLETE", std::ios::trunc);
        marker << "run aborted before all outputs were written\n";
        throw;
    }

    return outputs;
}

/// Step-by-step derivation for one (entity, period): raw and normalized
/// indicator values with weights, each system's composite score, then the
/// coupling metrics with the formulas spelled out. The final line restates
/// D = sqrt(C * T) numerically.
struct ExplainResult {
    CouplingRecord record;
    std::string text;
};

inline ExplainResult explain(const RunConfig& config, const std::string& entity, int period) {
    std::string scheme_text = detail::read_file(config.scheme_path);
    std::string data_text = detail::read_file(config.data_path);

    SchemeParseResult parsed = parse_scheme(scheme_text);
    const EvaluationScheme& scheme = parsed.scheme;
    LoadResult loaded = load_panel(data_text, scheme, config.missing_policy);
    const PanelDataset& ds = loaded.dataset;

    auto e = ds.axes.entity_index(entity);
    if (!e) {
        std::string available;
        for (const auto& id : ds.axes.entities)
            available += (available.empty() ? "" : ", ") + id;
        throw DataError("explain: unknown entity '" + entity + "' (available: " + available + ")");
    }
    auto t = ds.axes.period_index(period);
    if (!t)
        throw DataError("explain: period " + std::to_string(period) + " not in the data");

    std::vector<IndicatorStats> stats = dataset_stats(ds);
    NormalizedPanel normalized = normalize(ds, stats, config.constant_fill);
    WeightingResult weighting;
    switch (config.weight_method) {
        case WeightMethod::Msd: weighting = msd_weights(normalized, scheme); break;
        case WeightMethod::Fixed: weighting = fixed_weights(scheme); break;
        case WeightMethod::Equal: weighting = equal_weights(scheme); break;
    }
    SystemScoreSeries series = cdi(normalized, weighting, scheme);
    StageThresholds thresholds = config.stage_override
                                     ? *config.stage_override
                                     : scheme.stage_thresholds.value_or(StageThresholds{});
    std::vector<CouplingRecord> records = evaluate(series, scheme, thresholds);

    const std::size_t k = scheme.systems.size();
    const CouplingRecord* rec = nullptr;
    for (const auto& r : records)
        if (r.entity == entity && r.period == period) { rec = &r; break; }
    if (!rec) throw ComputeError("explain: no record for the requested cell");

    std::ostringstream out;
    out << entity << " @ " << period << "\n";
    out << "weights: " << weight_method_name(config.weight_method) << "\n\n";
    for (std::size_t s = 0; s < k; ++s) {
        const SystemSpec& sys = scheme.systems[s];
        out << "system " << sys.id << " (" << sys.label << ")\n";
        for (const auto& ind : sys.indicators) {
            std::size_t j = *ds.axes.indicator_index(ind.id);
            out << "  " << ind.id << ": raw=" << detail::format_double(ds.value(*e, *t, j))
                << "  normalized=" << detail::format_general(normalized.value(*e, *t, j), 12)
                << "  weight=" << detail::format_fixed(weighting.systems[s].weight_of(ind.id), 6)
                << "\n";
        }
        out << "  score (weighted sum of normalized values) = "
            << detail::format_general(rec->system_scores[s], 12) << "\n\n";
    }

    out << "C  = [(s1*...*sk) / (s1+...+sk)^k]^(1/k) = " << detail::format_general(rec->C, 12)
        << "  (max 1/" << k << " at equal scores)\n";
    out << "C* = k*C = " << detail::format_general(rec->C_rescaled, 12) << "\n";
    out << "T  = alpha-weighted mean of system scores = " << detail::format_general(rec->T, 12)
        << "\n";
    out << "stage(C*) = " << stage_name(rec->stage_C) << ", stage(D) = " << stage_name(rec->stage_D)
        << "\n";
    out << "lag = " << scheme.systems[rec->lag.system_index].id
        << (rec->lag.tied ? " (tied)" : "") << "\n";
    out << "D = sqrt(C * T) = sqrt(" << detail::format_general(rec->C, 12) << " * "
        << detail::format_general(rec->T, 12) << ") = " << detail::format_general(rec->D, 12)
        << "\n";

    ExplainResult result;
    result.record = *rec;
    result.text = out.str();
    return result;
}

} // namespace ccdm
