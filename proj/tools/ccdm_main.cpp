// ccdm: batch tool for coupled-system coordination analysis.
//
//   ccdm validate --scheme s.cfg [--data d.csv] [--missing ...]
//   ccdm run      --scheme s.cfg --data d.csv --out dir [options]
//   ccdm explain  --scheme s.cfg --data d.csv --entity e --period p [options]
//
// Exit codes: 0 success, 1 validation or data error, 2 computation error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccdm/ccdm.hpp"

namespace {

struct CliOptions {
    ccdm::RunConfig config;
    std::string weights_name = "msd";
    std::string missing_name = "fail";
    std::string precision_name = "report";
    std::vector<std::string> aggregate_specs;
    std::string stages_spec;
    std::string entity;
    int period = 0;
};

// --aggregate name=e1,e2,...
ccdm::AggregateGroup parse_aggregate_spec(const std::string& spec) {
    std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ccdm::DataError("bad --aggregate '" + spec + "' (expected name=e1,e2,...)");
    ccdm::AggregateGroup group;
    group.name = spec.substr(0, eq);
    std::size_t pos = eq + 1;
    while (pos <= spec.size()) {
        std::size_t comma = spec.find(',', pos);
        std::string member = spec.substr(pos, comma == std::string::npos ? std::string::npos
                                                                         : comma - pos);
        if (member.empty())
            throw ccdm::DataError("bad --aggregate '" + spec + "' (empty member)");
        group.members.push_back(std::move(member));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (group.members.empty())
        throw ccdm::DataError("bad --aggregate '" + spec + "' (no members)");
    return group;
}

// --stages t1,t2,t3
ccdm::StageThresholds parse_stages_spec(const std::string& spec) {
    std::vector<double> vals;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        std::size_t comma = spec.find(',', pos);
        std::string tok = spec.substr(pos, comma == std::string::npos ? std::string::npos
                                                                      : comma - pos);
        double v = 0.0;
        if (!ccdm::detail::parse_double(tok, v))
            throw ccdm::DataError("bad --stages value '" + tok + "'");
        vals.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (vals.size() != 3)
        throw ccdm::DataError("--stages needs exactly three thresholds (t1,t2,t3)");
    if (!(0.0 < vals[0] && vals[0] < vals[1] && vals[1] < vals[2] && vals[2] < 1.0))
        throw ccdm::DataError("--stages thresholds must be strictly increasing within (0, 1)");
    return ccdm::StageThresholds{vals[0], vals[1], vals[2]};
}

void finalize_options(CliOptions& opts) {
    auto method = ccdm::weight_method_from_name(opts.weights_name);
    if (!method) throw ccdm::DataError("bad --weights '" + opts.weights_name + "'");
    opts.config.weight_method = *method;

    auto policy = ccdm::missing_policy_from_name(opts.missing_name);
    if (!policy) throw ccdm::DataError("bad --missing '" + opts.missing_name + "'");
    opts.config.missing_policy = *policy;

    if (opts.precision_name == "report")
        opts.config.precision = ccdm::PrecisionMode::Report3dp;
    else if (opts.precision_name == "full")
        opts.config.precision = ccdm::PrecisionMode::Full;
    else
        throw ccdm::DataError("bad --precision '" + opts.precision_name + "'");

    for (const auto& spec : opts.aggregate_specs)
        opts.config.aggregate_groups.push_back(parse_aggregate_spec(spec));
    if (!opts.stages_spec.empty())
        opts.config.stage_override = parse_stages_spec(opts.stages_spec);
}

void add_common_flags(CLI::App* cmd, CliOptions& opts, bool data_required) {
    cmd->add_option("--scheme", opts.config.scheme_path, "Scheme config file")->required();
    auto* data = cmd->add_option("--data", opts.config.data_path, "Panel CSV file");
    if (data_required) data->required();
    cmd->add_option("--weights", opts.weights_name, "Weighting method: msd|fixed|equal");
    cmd->add_option("--missing", opts.missing_name,
                    "Missing-cell policy: fail|interpolate|drop-entity");
    cmd->add_option("--constant-fill", opts.config.constant_fill,
                    "Normalized value for indicators with max == min");
    cmd->add_option("--stages", opts.stages_spec, "Stage thresholds t1,t2,t3");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupling coordination analysis over multi-system indicator panels"};
    app.require_subcommand(1);

    CliOptions opts;

    CLI::App* validate = app.add_subcommand("validate", "Check a scheme (and optionally data)");
    add_common_flags(validate, opts, false);

    CLI::App* run = app.add_subcommand("run", "Run the pipeline and write every artifact");
    add_common_flags(run, opts, true);
    run->add_option("--out", opts.config.output_dir, "Output directory")->required();
    run->add_option("--aggregate", opts.aggregate_specs,
                    "Aggregate group name=e1,e2,... (repeatable)");
    run->add_option("--precision", opts.precision_name, "Numeric output: report|full");

    CLI::App* explain = app.add_subcommand("explain", "Trace one entity-period derivation");
    add_common_flags(explain, opts, true);
    explain->add_option("--entity", opts.entity, "Entity to trace")->required();
    explain->add_option("--period", opts.period, "Period to trace")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage problems count as validation errors
    }

    try {
        finalize_options(opts);
        if (validate->parsed()) {
            ccdm::ValidateOutcome outcome = ccdm::run_validate(opts.config);
            std::cout << outcome.json;
            return outcome.ok ? 0 : 1;
        }
        if (run->parsed()) {
            ccdm::RunOutputs outputs = ccdm::run_pipeline(opts.config);
            std::cout << "wrote " << outputs.files_written.size() << " files to "
                      << opts.config.output_dir << "\n";
            return 0;
        }
        ccdm::ExplainResult result = ccdm::explain(opts.config, opts.entity, opts.period);
        std::cout << result.text;
        return 0;
    } catch (const ccdm::ComputeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ccdm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
