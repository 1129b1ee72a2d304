#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ccdm/errors.hpp"

namespace ccdm {

/// Whether larger raw values are better (Positive) or worse (Negative).
enum class EffectDirection { Positive, Negative };

struct IndicatorSpec {
    std::string id;               // machine key, unique within the scheme
    std::string label;            // display string
    std::string system_id;
    std::string subsystem_label;  // annotation only, no computational role
    EffectDirection direction = EffectDirection::Positive;
    std::optional<double> fixed_weight;

    bool operator==(const IndicatorSpec&) const = default;
};

struct SystemSpec {
    std::string id;
    std::string label;
    std::vector<IndicatorSpec> indicators;

    bool operator==(const SystemSpec&) const = default;
};

/// Stage boundaries for the coupling classification, right-closed intervals
/// (0, t1], (t1, t2], (t2, t3], (t3, 1].
struct StageThresholds {
    double t1 = 0.2;
    double t2 = 0.5;
    double t3 = 0.8;

    bool operator==(const StageThresholds&) const = default;
};

/// Hierarchical indicator system: k >= 2 systems, each with ordered indicators.
struct EvaluationScheme {
    std::vector<SystemSpec> systems;
    std::optional<std::vector<double>> alphas;            // synergy weights, default 1/k
    std::optional<StageThresholds> stage_thresholds;      // classification override

    bool operator==(const EvaluationScheme&) const = default;

    std::size_t system_count() const { return systems.size(); }

    std::size_t indicator_count() const {
        std::size_t n = 0;
        for (const auto& s : systems) n += s.indicators.size();
        return n;
    }

    /// Synergy weights actually in effect: the declared alphas, or 1/k each.
    std::vector<double> effective_alphas() const {
        if (alphas) return *alphas;
        return std::vector<double>(systems.size(), 1.0 / static_cast<double>(systems.size()));
    }

    /// All indicators flattened in declaration order (system order, then indicator order).
    std::vector<const IndicatorSpec*> all_indicators() const {
        std::vector<const IndicatorSpec*> out;
        out.reserve(indicator_count());
        for (const auto& s : systems)
            for (const auto& ind : s.indicators) out.push_back(&ind);
        return out;
    }

    const SystemSpec* find_system(std::string_view id) const {
        for (const auto& s : systems)
            if (s.id == id) return &s;
        return nullptr;
    }

    const IndicatorSpec* find_indicator(std::string_view id) const {
        for (const auto& s : systems)
            for (const auto& ind : s.indicators)
                if (ind.id == id) return &ind;
        return nullptr;
    }
};

/// One fixed-weight column rescaled to sum 1 at parse time.
struct WeightAdjustment {
    std::string system_id;
    double original_sum = 0.0;

    bool operator==(const WeightAdjustment&) const = default;
};

struct SchemeParseOptions {
    /// When true, fixed-weight columns whose sum is off 1 by more than 1e-6
    /// are a semantic error instead of being renormalized.
    bool strict_weights = false;
};

struct SchemeParseResult {
    EvaluationScheme scheme;
    std::vector<WeightAdjustment> adjustments;  // columns renormalized during parse
};

/// One invariant violation found by validate_scheme.
struct Violation {
    std::string element;  // offending system/indicator id, or "scheme"
    std::string message;

    bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_fixed(double v, int precision) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
    return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view tok, double& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last && std::isfinite(out);
}

inline bool parse_int(std::string_view tok, int& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

// One field of a config directive: either positional or key=value, with the
// value possibly quoted.
struct ConfigField {
    std::string key;    // empty for positional fields
    std::string value;
    bool quoted = false;
};

class ConfigLineCursor {
public:
    ConfigLineCursor(std::string_view line, std::size_t line_no)
        : line_(line), line_no_(line_no) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw SchemeError("scheme config line " + std::to_string(line_no_) + ": " + msg);
    }

    void skip_ws() {
        while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
    }

    bool at_end() {
        skip_ws();
        return pos_ >= line_.size();
    }

    // Reads a bare word, a quoted string, or key=value with either value form.
    ConfigField next_field() {
        skip_ws();
        ConfigField f;
        if (line_[pos_] == '"') {
            f.value = read_quoted();
            f.quoted = true;
            return f;
        }
        std::size_t start = pos_;
        while (pos_ < line_.size() && line_[pos_] != ' ' && line_[pos_] != '\t' &&
               line_[pos_] != '=' && line_[pos_] != '"')
            ++pos_;
        std::string word(line_.substr(start, pos_ - start));
        if (pos_ < line_.size() && line_[pos_] == '=') {
            ++pos_;
            if (word.empty()) fail("'=' without a key");
            f.key = std::move(word);
            if (pos_ < line_.size() && line_[pos_] == '"') {
                f.value = read_quoted();
                f.quoted = true;
            } else {
                std::size_t vstart = pos_;
                while (pos_ < line_.size() && line_[pos_] != ' ' && line_[pos_] != '\t') ++pos_;
                f.value = std::string(line_.substr(vstart, pos_ - vstart));
                if (f.value.empty()) fail("empty value for '" + f.key + "'");
            }
            return f;
        }
        if (pos_ < line_.size() && line_[pos_] == '"') fail("unexpected '\"' inside a token");
        if (word.empty()) fail("malformed token");
        f.value = std::move(word);
        return f;
    }

private:
    std::string read_quoted() {
        ++pos_;  // opening quote
        std::size_t start = pos_;
        while (pos_ < line_.size() && line_[pos_] != '"') ++pos_;
        if (pos_ >= line_.size()) fail("unterminated quoted string");
        std::string s(line_.substr(start, pos_ - start));
        ++pos_;  // closing quote
        return s;
    }

    std::string_view line_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

// Strips a trailing comment, honoring quotes.
inline std::string_view strip_comment(std::string_view line) {
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_quotes = !in_quotes;
        else if (line[i] == '#' && !in_quotes) return line.substr(0, i);
    }
    return line;
}

} // namespace detail

/// Parses the line-oriented scheme config format:
///   system <id> "<label>"
///   indicator <id> "<label>" system=<system_id> subsystem="<label>" direction=+|- [weight=<decimal>]
///   alphas <a1> ... <ak>
///   stages <t1> <t2> <t3>
/// Fixed-weight columns not summing to 1 within 1e-6 are renormalized by the
/// column sum and flagged in the result (error in strict mode).
inline SchemeParseResult parse_scheme(std::string_view text, SchemeParseOptions opts = {}) {
    using detail::ConfigField;
    using detail::ConfigLineCursor;

    SchemeParseResult result;
    EvaluationScheme& scheme = result.scheme;
    std::unordered_set<std::string> system_ids;
    std::unordered_set<std::string> indicator_ids;
    std::optional<std::size_t> alphas_line;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        std::string_view line = detail::strip_comment(raw);

        ConfigLineCursor cur(line, line_no);
        if (cur.at_end()) continue;

        ConfigField directive = cur.next_field();
        if (directive.quoted || !directive.key.empty()) cur.fail("expected a directive name");

        if (directive.value == "system") {
            if (cur.at_end()) cur.fail("system: missing id");
            ConfigField id = cur.next_field();
            if (id.quoted || !id.key.empty()) cur.fail("system: id must be a bare token");
            if (cur.at_end()) cur.fail("system: missing quoted label");
            ConfigField label = cur.next_field();
            if (!label.quoted || !label.key.empty()) cur.fail("system: label must be quoted");
            if (!cur.at_end()) cur.fail("system: trailing tokens");
            if (!system_ids.insert(id.value).second)
                cur.fail("duplicate system id '" + id.value + "'");
            scheme.systems.push_back(SystemSpec{id.value, label.value, {}});
        } else if (directive.value == "indicator") {
            if (cur.at_end()) cur.fail("indicator: missing id");
            ConfigField id = cur.next_field();
            if (id.quoted || !id.key.empty()) cur.fail("indicator: id must be a bare token");
            if (cur.at_end()) cur.fail("indicator: missing quoted label");
            ConfigField label = cur.next_field();
            if (!label.quoted || !label.key.empty()) cur.fail("indicator: label must be quoted");

            IndicatorSpec ind;
            ind.id = id.value;
            ind.label = label.value;

            if (cur.at_end()) cur.fail("indicator: missing system=");
            ConfigField sys = cur.next_field();
            if (sys.key != "system" || sys.quoted) cur.fail("indicator: expected system=<system_id>");
            ind.system_id = sys.value;

            if (cur.at_end()) cur.fail("indicator: missing subsystem=");
            ConfigField sub = cur.next_field();
            if (sub.key != "subsystem" || !sub.quoted) cur.fail("indicator: expected subsystem=\"<label>\"");
            ind.subsystem_label = sub.value;

            if (cur.at_end()) cur.fail("indicator: missing direction=");
            ConfigField dir = cur.next_field();
            if (dir.key != "direction" || dir.quoted) cur.fail("indicator: expected direction=+|-");
            if (dir.value == "+") ind.direction = EffectDirection::Positive;
            else if (dir.value == "-") ind.direction = EffectDirection::Negative;
            else cur.fail("indicator: bad direction token '" + dir.value + "' (expected + or -)");

            if (!cur.at_end()) {
                ConfigField w = cur.next_field();
                if (w.key != "weight" || w.quoted) cur.fail("indicator: expected weight=<decimal>");
                double wv = 0.0;
                if (!detail::parse_double(w.value, wv)) cur.fail("indicator: bad weight '" + w.value + "'");
                if (wv < 0.0) cur.fail("indicator: weight must be nonnegative");
                ind.fixed_weight = wv;
                if (!cur.at_end()) cur.fail("indicator: trailing tokens");
            }

            if (!indicator_ids.insert(ind.id).second)
                cur.fail("duplicate indicator id '" + ind.id + "'");
            if (system_ids.find(ind.system_id) == system_ids.end())
                cur.fail("indicator '" + ind.id + "' references unknown system '" + ind.system_id + "'");
            for (auto& s : scheme.systems)
                if (s.id == ind.system_id) s.indicators.push_back(std::move(ind));
        } else if (directive.value == "alphas") {
            if (scheme.alphas) cur.fail("duplicate alphas directive");
            std::vector<double> alphas;
            while (!cur.at_end()) {
                ConfigField a = cur.next_field();
                if (a.quoted || !a.key.empty()) cur.fail("alphas: expected bare decimals");
                double av = 0.0;
                if (!detail::parse_double(a.value, av)) cur.fail("alphas: bad value '" + a.value + "'");
                if (av < 0.0) cur.fail("alphas: values must be nonnegative");
                alphas.push_back(av);
            }
            if (alphas.empty()) cur.fail("alphas: at least one value required");
            scheme.alphas = std::move(alphas);
            alphas_line = line_no;
        } else if (directive.value == "stages") {
            if (scheme.stage_thresholds) cur.fail("duplicate stages directive");
            std::array<double, 3> t{};
            for (double& ti : t) {
                if (cur.at_end()) cur.fail("stages: expected three thresholds");
                ConfigField f = cur.next_field();
                if (f.quoted || !f.key.empty()) cur.fail("stages: expected bare decimals");
                if (!detail::parse_double(f.value, ti)) cur.fail("stages: bad value '" + f.value + "'");
            }
            if (!cur.at_end()) cur.fail("stages: trailing tokens");
            if (!(0.0 < t[0] && t[0] < t[1] && t[1] < t[2] && t[2] < 1.0))
                cur.fail("stages: thresholds must be strictly increasing within (0, 1)");
            scheme.stage_thresholds = StageThresholds{t[0], t[1], t[2]};
        } else {
            cur.fail("unknown directive '" + directive.value + "'");
        }
    }

    if (scheme.systems.size() < 2)
        throw SchemeError("scheme config: k >= 2 required, got " +
                          std::to_string(scheme.systems.size()) + " system(s)");
    for (const auto& s : scheme.systems)
        if (s.indicators.empty())
            throw SchemeError("scheme config: system '" + s.id + "' has no indicators");
    if (scheme.alphas && scheme.alphas->size() != scheme.systems.size())
        throw SchemeError("scheme config line " + std::to_string(*alphas_line) + ": alphas has " +
                          std::to_string(scheme.alphas->size()) + " value(s) but the scheme has " +
                          std::to_string(scheme.systems.size()) + " systems");

    // Fixed weights: all-or-none per system; columns off sum 1 are rescaled
    // (or rejected in strict mode).
    for (auto& s : scheme.systems) {
        std::size_t with_weight = 0;
        double sum = 0.0;
        for (const auto& ind : s.indicators)
            if (ind.fixed_weight) {
                ++with_weight;
                sum += *ind.fixed_weight;
            }
        if (with_weight == 0) continue;
        if (with_weight != s.indicators.size())
            throw SchemeError("scheme config: system '" + s.id +
                              "' mixes weighted and unweighted indicators");
        if (std::abs(sum - 1.0) > 1e-6) {
            if (opts.strict_weights)
                throw SchemeError("scheme config: system '" + s.id + "' fixed weights sum " +
                                  detail::format_fixed(sum, 3) + " != 1");
            if (sum <= 0.0)
                throw SchemeError("scheme config: system '" + s.id + "' fixed weights sum to 0");
            for (auto& ind : s.indicators) *ind.fixed_weight /= sum;
            result.adjustments.push_back(WeightAdjustment{s.id, sum});
        }
    }

    return result;
}

/// Emits a scheme back into the config format accepted by parse_scheme.
/// Round-trips exactly on valid schemes (weights use shortest exact decimals).
inline std::string serialize_scheme(const EvaluationScheme& scheme) {
    std::ostringstream out;
    for (const auto& s : scheme.systems) {
        out << "system " << s.id << " \"" << s.label << "\"\n";
        for (const auto& ind : s.indicators) {
            out << "indicator " << ind.id << " \"" << ind.label << "\" system=" << ind.system_id
                << " subsystem=\"" << ind.subsystem_label << "\" direction="
                << (ind.direction == EffectDirection::Positive ? '+' : '-');
            if (ind.fixed_weight) out << " weight=" << detail::format_double(*ind.fixed_weight);
            out << "\n";
        }
    }
    if (scheme.alphas) {
        out << "alphas";
        for (double a : *scheme.alphas) out << ' ' << detail::format_double(a);
        out << "\n";
    }
    if (scheme.stage_thresholds) {
        const auto& t = *scheme.stage_thresholds;
        out << "stages " << detail::format_double(t.t1) << ' ' << detail::format_double(t.t2)
            << ' ' << detail::format_double(t.t3) << "\n";
    }
    return out.str();
}

/// Checks every scheme invariant; returns one entry per violation, empty when
/// the scheme is sound. Violations are data, not failures.
inline ValidationReport validate_scheme(const EvaluationScheme& scheme) {
    ValidationReport report;
    auto add = [&report](std::string element, std::string message) {
        report.push_back(Violation{std::move(element), std::move(message)});
    };

    if (scheme.systems.size() < 2)
        add("scheme", "k >= 2 required, got " + std::to_string(scheme.systems.size()));

    std::unordered_set<std::string> seen_systems;
    std::unordered_set<std::string> seen_indicators;
    for (const auto& s : scheme.systems) {
        if (!seen_systems.insert(s.id).second) add(s.id, "duplicate system id");
        if (s.indicators.empty()) add(s.id, "system has no indicators");

        std::size_t with_weight = 0;
        double sum = 0.0;
        for (const auto& ind : s.indicators) {
            if (!seen_indicators.insert(ind.id).second) add(ind.id, "duplicate indicator id");
            if (ind.system_id != s.id)
                add(ind.id, "indicator declares system '" + ind.system_id +
                                "' but is listed under '" + s.id + "'");
            if (ind.fixed_weight) {
                ++with_weight;
                sum += *ind.fixed_weight;
                if (*ind.fixed_weight < 0.0 || *ind.fixed_weight > 1.0)
                    add(ind.id, "fixed weight " + detail::format_double(*ind.fixed_weight) +
                                    " outside [0, 1]");
            }
        }
        if (with_weight > 0) {
            if (with_weight != s.indicators.size())
                add(s.id, "mixes weighted and unweighted indicators");
            else if (std::abs(sum - 1.0) > 1e-6)
                add(s.id, "fixed weights sum " + detail::format_fixed(sum, 3) + " != 1");
        }
    }

    if (scheme.alphas) {
        const auto& alphas = *scheme.alphas;
        if (alphas.size() != scheme.systems.size())
            add("scheme", "alphas has " + std::to_string(alphas.size()) +
                              " value(s) for " + std::to_string(scheme.systems.size()) + " systems");
        double sum = 0.0;
        for (double a : alphas) {
            if (a < 0.0) add("scheme", "alpha " + detail::format_double(a) + " is negative");
            sum += a;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            add("scheme", "alphas sum " + detail::format_fixed(sum, 3) + " != 1");
    }

    if (scheme.stage_thresholds) {
        const auto& t = *scheme.stage_thresholds;
        if (!(0.0 < t.t1 && t.t1 < t.t2 && t.t2 < t.t3 && t.t3 < 1.0))
            add("scheme", "stage thresholds must be strictly increasing within (0, 1)");
    }

    return report;
}

} // namespace ccdm
