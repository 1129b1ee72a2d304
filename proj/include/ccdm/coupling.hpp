#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccdm/errors.hpp"
#include "ccdm/scheme.hpp"
#include "ccdm/scoring.hpp"

namespace ccdm {

enum class Stage { Unbalanced, SlightlyUnbalanced, BarelyBalanced, SuperiorBalanced };

inline const char* stage_name(Stage s) {
    switch (s) {
        case Stage::Unbalanced: return "unbalanced";
        case Stage::SlightlyUnbalanced: return "slightly-unbalanced";
        case Stage::BarelyBalanced: return "barely-balanced";
        case Stage::SuperiorBalanced: return "superior-balanced";
    }
    return "?";
}

/// Which system trails the others at one (entity, period).
struct LagResult {
    std::size_t system_index = 0;  // position in the scheme's system order
    bool tied = false;             // another system sits within epsilon of the minimum

    bool operator==(const LagResult&) const = default;
};

/// Full evaluation of one (entity, period) cell.
struct CouplingRecord {
    std::string entity;
    int period = 0;
    std::vector<double> system_scores;  // scheme system order
    double C = 0.0;                     // raw coupling degree, in [0, 1/k]
    double C_rescaled = 0.0;            // k * C, conventional [0, 1] scale
    double T = 0.0;                     // synergy index, alpha-weighted score mean
    double D = 0.0;                     // coordination degree, sqrt(C * T)
    Stage stage_C = Stage::Unbalanced;  // classification of C_rescaled
    Stage stage_D = Stage::Unbalanced;  // classification of D
    LagResult lag;
};

/// Coupling degree of k >= 2 subsystem scores:
///   C = [ (s1 * s2 * ... * sk) / (s1 + s2 + ... + sk)^k ]^(1/k)
/// Peaks at 1/k when all scores are equal and positive; any zero score gives
/// C = 0, and an all-zero vector is defined as C = 0. The result is clamped
/// into [0, 1/k] against last-bit overshoot.
inline double coupling_degree(std::span<const double> scores) {
    const std::size_t k = scores.size();
    if (k < 2)
        throw ComputeError("coupling_degree: needs at least 2 scores, got " + std::to_string(k));
    double prod = 1.0;
    double sum = 0.0;
    for (double s : scores) {
        if (s < 0.0)
            throw ComputeError("coupling_degree: negative score " + detail::format_double(s));
        prod *= s;
        sum += s;
    }
    if (sum == 0.0) return 0.0;
    double ratio = prod / std::pow(sum, static_cast<double>(k));
    double c = std::pow(ratio, 1.0 / static_cast<double>(k));
    return std::clamp(c, 0.0, 1.0 / static_cast<double>(k));
}

/// Alpha-weighted mean of the subsystem scores. Alphas must be nonnegative,
/// match the score count, and sum to 1 within 1e-9.
inline double synergy_index(std::span<const double> scores, std::span<const double> alphas) {
    if (scores.size() != alphas.size())
        throw ComputeError("synergy_index: " + std::to_string(alphas.size()) + " alphas for " +
                           std::to_string(scores.size()) + " scores");
    if (scores.empty()) throw ComputeError("synergy_index: empty score vector");
    double alpha_sum = 0.0;
    for (double a : alphas) {
        if (a < 0.0)
            throw ComputeError("synergy_index: negative alpha " + detail::format_double(a));
        alpha_sum += a;
    }
    if (std::abs(alpha_sum - 1.0) > 1e-9)
        throw ComputeError("synergy_index: alphas sum " + detail::format_double(alpha_sum) +
                           " != 1");
    double t = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) t += alphas[i] * scores[i];
    return t;
}

/// D = sqrt(C * T). Both factors must be nonnegative.
inline double coordination_degree(double c, double t) {
    if (c < 0.0 || t < 0.0)
        throw ComputeError("coordination_degree: negative input (C=" + detail::format_double(c) +
                           ", T=" + detail::format_double(t) + ")");
    return std::sqrt(c * t);
}

/// Places a value on the right-closed ladder
///   (0, t1] -> Unbalanced, (t1, t2] -> SlightlyUnbalanced,
///   (t2, t3] -> BarelyBalanced, (t3, 1] -> SuperiorBalanced.
/// Zero lands in the lowest stage. Values outside [0, 1] are an error.
inline Stage classify_stage(double value, const StageThresholds& thresholds = {}) {
    if (value < 0.0 || value > 1.0)
        throw ComputeError("classify_stage: value " + detail::format_double(value) +
                           " outside [0, 1]");
    if (value <= thresholds.t1) return Stage::Unbalanced;
    if (value <= thresholds.t2) return Stage::SlightlyUnbalanced;
    if (value <= thresholds.t3) return Stage::BarelyBalanced;
    return Stage::SuperiorBalanced;
}

/// Index of the smallest score; scores within `epsilon` of the minimum tie,
/// and ties resolve to the earliest declared system with `tied` set.
inline LagResult lag_type(std::span<const double> scores, double epsilon = 1e-9) {
    if (scores.empty()) throw ComputeError("lag_type: empty score vector");
    std::size_t min_idx = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] < scores[min_idx]) min_idx = i;
    LagResult r;
    double min_val = scores[min_idx];
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] - min_val > epsilon) continue;
        r.system_index = i;
        r.tied = false;
        for (std::size_t m = i + 1; m < scores.size(); ++m)
            if (scores[m] - min_val <= epsilon) { r.tied = true; break; }
        break;
    }
    return r;
}

/// Runs the complete coupling evaluation over every (entity, period) cell of
/// a score series. `thresholds` overrides the scheme's stage ladder; without
/// either, the default ladder (0.2, 0.5, 0.8) applies.
inline std::vector<CouplingRecord> evaluate(const SystemScoreSeries& series,
                                            const EvaluationScheme& scheme,
                                            std::optional<StageThresholds> thresholds = {}) {
    const std::size_t k = series.system_ids.size();
    if (k != scheme.systems.size())
        throw ComputeError("evaluate: score series has " + std::to_string(k) +
                           " systems, scheme has " + std::to_string(scheme.systems.size()));
    for (std::size_t s = 0; s < k; ++s)
        if (series.system_ids[s] != scheme.systems[s].id)
            throw ComputeError("evaluate: system order mismatch at '" + series.system_ids[s] +
                               "', expected '" + scheme.systems[s].id + "'");

    StageThresholds ladder = thresholds ? *thresholds
                                        : scheme.stage_thresholds.value_or(StageThresholds{});
    std::vector<double> alphas = scheme.effective_alphas();
    if (alphas.size() != k)
        throw ComputeError("evaluate: " + std::to_string(alphas.size()) + " alphas for " +
                           std::to_string(k) + " systems");

    std::vector<CouplingRecord> records;
    records.reserve(series.entities.size() * series.periods.size());
    std::vector<double> scores(k);
    for (std::size_t e = 0; e < series.entities.size(); ++e)
        for (std::size_t t = 0; t < series.periods.size(); ++t) {
            CouplingRecord rec;
            rec.entity = series.entities[e];
            rec.period = series.periods[t];
            for (std::size_t s = 0; s < k; ++s) scores[s] = series.score(e, t, s);
            rec.system_scores = scores;
            rec.C = coupling_degree(scores);
            rec.C_rescaled = std::min(static_cast<double>(k) * rec.C, 1.0);
            rec.T = synergy_index(scores, alphas);
            rec.D = coordination_degree(rec.C, rec.T);
            rec.stage_C = classify_stage(rec.C_rescaled, ladder);
            rec.stage_D = classify_stage(rec.D, ladder);
            rec.lag = lag_type(scores);
            records.push_back(std::move(rec));
        }
    return records;
}

} // namespace ccdm
