#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ccdm/errors.hpp"
#include "ccdm/normalize.hpp"
#include "ccdm/scheme.hpp"

namespace ccdm {

enum class WeightMethod { Msd, Fixed, Equal };

inline const char* weight_method_name(WeightMethod m) {
    switch (m) {
        case WeightMethod::Msd: return "msd";
        case WeightMethod::Fixed: return "fixed";
        case WeightMethod::Equal: return "equal";
    }
    return "?";
}

/// Indicator weights for one system, in scheme declaration order. Each
/// vector sums to 1 within 1e-9.
struct WeightVector {
    std::string system_id;
    std::vector<std::pair<std::string, double>> weights;  // (indicator_id, weight)
    WeightMethod method = WeightMethod::Msd;

    bool operator==(const WeightVector&) const = default;

    double weight_of(std::string_view indicator_id) const {
        for (const auto& [id, w] : weights)
            if (id == indicator_id) return w;
        throw ComputeError("weight_of: no weight for indicator '" + std::string(indicator_id) + "'");
    }
};

struct WeightingResult {
    std::vector<WeightVector> systems;            // scheme system order
    std::vector<WeightAdjustment> adjustments;    // fixed columns rescaled to sum 1
};

/// Mean-square-deviation weights: each indicator's share of its system's total
/// pooled dispersion. The dispersion of column j is the population standard
/// deviation of its normalized values over every entity and period.
inline WeightingResult msd_weights(const NormalizedPanel& panel, const EvaluationScheme& scheme) {
    const auto& axes = panel.axes;
    const std::size_t cells = axes.entities.size() * axes.periods.size();
    if (cells == 0) throw ComputeError("msd_weights: empty panel");

    // dispersion per indicator column, indexed like axes.indicator_ids
    std::vector<double> dispersion(axes.indicator_ids.size());
    for (std::size_t j = 0; j < axes.indicator_ids.size(); ++j) {
        double sum = 0.0;
        for (std::size_t e = 0; e < axes.entities.size(); ++e)
            for (std::size_t t = 0; t < axes.periods.size(); ++t) sum += panel.value(e, t, j);
        double mean = sum / static_cast<double>(cells);
        double sq = 0.0;
        for (std::size_t e = 0; e < axes.entities.size(); ++e)
            for (std::size_t t = 0; t < axes.periods.size(); ++t) {
                double d = panel.value(e, t, j) - mean;
                sq += d * d;
            }
        dispersion[j] = std::sqrt(sq / static_cast<double>(cells));
    }

    WeightingResult result;
    for (const auto& sys : scheme.systems) {
        WeightVector wv;
        wv.system_id = sys.id;
        wv.method = WeightMethod::Msd;
        double total = 0.0;
        std::vector<double> sys_dispersion;
        sys_dispersion.reserve(sys.indicators.size());
        for (const auto& ind : sys.indicators) {
            auto j = axes.indicator_index(ind.id);
            if (!j)
                throw ComputeError("msd_weights: indicator '" + ind.id + "' not in the panel");
            sys_dispersion.push_back(dispersion[*j]);
            total += dispersion[*j];
        }
        if (total == 0.0)
            throw ComputeError("msd_weights: system '" + sys.id +
                               "' has zero dispersion in every indicator, weights are undefined");
        for (std::size_t i = 0; i < sys.indicators.size(); ++i)
            wv.weights.emplace_back(sys.indicators[i].id, sys_dispersion[i] / total);
        result.systems.push_back(std::move(wv));
    }
    return result;
}

/// Weights declared in the scheme. Requires every indicator to carry one.
/// Columns off sum 1 beyond 1e-6 are rescaled when `renormalize` is set
/// (recorded in the result) and rejected otherwise; the division by the exact
/// column sum runs unconditionally so each output column sums to 1 within 1e-9.
inline WeightingResult fixed_weights(const EvaluationScheme& scheme, bool renormalize = true) {
    WeightingResult result;
    for (const auto& sys : scheme.systems) {
        WeightVector wv;
        wv.system_id = sys.id;
        wv.method = WeightMethod::Fixed;
        double sum = 0.0;
        for (const auto& ind : sys.indicators) {
            if (!ind.fixed_weight)
                throw ComputeError("fixed_weights: indicator '" + ind.id + "' has no declared weight");
            sum += *ind.fixed_weight;
        }
        if (sum <= 0.0)
            throw ComputeError("fixed_weights: system '" + sys.id + "' weights sum to 0");
        if (std::abs(sum - 1.0) > 1e-6) {
            if (!renormalize)
                throw ComputeError("fixed_weights: system '" + sys.id + "' weights sum " +
                                   detail::format_fixed(sum, 3) + " != 1");
            result.adjustments.push_back(WeightAdjustment{sys.id, sum});
        }
        for (const auto& ind : sys.indicators)
            wv.weights.emplace_back(ind.id, *ind.fixed_weight / sum);
        result.systems.push_back(std::move(wv));
    }
    return result;
}

/// Uniform 1/m within each system.
inline WeightingResult equal_weights(const EvaluationScheme& scheme) {
    WeightingResult result;
    for (const auto& sys : scheme.systems) {
        WeightVector wv;
        wv.system_id = sys.id;
        wv.method = WeightMethod::Equal;
        double w = 1.0 / static_cast<double>(sys.indicators.size());
        for (const auto& ind : sys.indicators) wv.weights.emplace_back(ind.id, w);
        result.systems.push_back(std::move(wv));
    }
    return result;
}

} // namespace ccdm
