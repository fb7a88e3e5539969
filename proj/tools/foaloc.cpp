// Command-line front end for the frequency-of-arrival localization library.
//
// Subcommands:
//   locate       run one localization and print the estimate
//   sweep        Monte-Carlo RMSE over a swept parameter, CSV output
//   compare      RMSE for every method/mode combination on shared seeds
//   sensitivity  RMSE under inflated position/velocity error bounds
//   refine       RMSE per round of reference-transmitter refinement

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "foaloc/harness.hpp"

namespace {

using namespace foaloc;

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    double v{};
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw scenario_error(where + ": expected a number, got '" + text + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    std::uint64_t v{};
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw scenario_error(where + ": expected a non-negative integer, got '" + text + "'");
    return v;
}

std::vector<double> parse_value_list(const std::string& text, const std::string& where) {
    std::vector<double> values;
    for (const std::string& part : split(text, ','))
        values.push_back(parse_double(part, where));
    if (values.empty()) throw scenario_error(where + ": no values given");
    return values;
}

/// Equation counts accept either a comma list ("4,6,8") or an inclusive
/// integer range ("2:20").
std::vector<double> parse_equation_values(const std::string& text, const std::string& where) {
    if (text.find(':') != std::string::npos) {
        const std::vector<std::string> ends = split(text, ':');
        if (ends.size() != 2)
            throw scenario_error(where + ": expected 'first:last', got '" + text + "'");
        const std::uint64_t first = parse_uint(ends[0], where);
        const std::uint64_t last = parse_uint(ends[1], where);
        if (first > last)
            throw scenario_error(where + ": range start exceeds range end in '" + text + "'");
        std::vector<double> values;
        for (std::uint64_t n = first; n <= last; ++n) values.push_back(static_cast<double>(n));
        return values;
    }
    return parse_value_list(text, where);
}

std::vector<std::pair<double, double>> parse_error_pairs(const std::string& text,
                                                         const std::string& where) {
    std::vector<std::pair<double, double>> pairs;
    for (const std::string& part : split(text, ',')) {
        const std::vector<std::string> halves = split(part, '/');
        if (halves.size() != 2)
            throw scenario_error(where + ": expected 'position/velocity' pairs, got '" + part +
                                 "'");
        pairs.emplace_back(parse_double(halves[0], where), parse_double(halves[1], where));
    }
    if (pairs.empty()) throw scenario_error(where + ": no values given");
    return pairs;
}

GeodeticPoint parse_point(const std::string& text, const std::string& where) {
    const std::vector<std::string> parts = split(text, ',');
    if (parts.size() != 3)
        throw scenario_error(where + ": expected 'lon_deg,lat_deg,alt_m', got '" + text + "'");
    return {parse_double(parts[0], where), parse_double(parts[1], where),
            parse_double(parts[2], where)};
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Options shared by every subcommand. A scenario file provides the base
/// configuration, generic --set overrides come next, and the dedicated
/// flags win over both.
struct CommonOpts {
    std::string scenario_path;
    std::vector<std::string> sets;
    std::string equations;
    std::string trials;
    std::string seed;
    std::string mode;
    std::string method;
    CLI::Option* scenario_opt = nullptr;
    CLI::Option* equations_opt = nullptr;
    CLI::Option* trials_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* mode_opt = nullptr;
    CLI::Option* method_opt = nullptr;
};

void add_common_options(CLI::App& sub, CommonOpts& opts) {
    opts.scenario_opt =
        sub.add_option("--scenario", opts.scenario_path, "Scenario configuration file");
    sub.add_option("--set", opts.sets,
                   "Override a scenario key, e.g. --set velocity_error_mps=1");
    opts.equations_opt =
        sub.add_option("--equations", opts.equations, "Number of measurement equations");
    opts.trials_opt = sub.add_option("--trials", opts.trials, "Monte-Carlo trials per point");
    opts.seed_opt = sub.add_option("--seed", opts.seed, "Master random seed");
    opts.mode_opt =
        sub.add_option("--mode", opts.mode, "Relay mode: gateway or onboard");
    opts.method_opt =
        sub.add_option("--method", opts.method, "Measurement method: foa or fdoa");
}

Scenario build_scenario(const CommonOpts& opts) {
    ScenarioConfig cfg;
    if (opts.scenario_opt->count() > 0) cfg = ScenarioConfig::from_file(opts.scenario_path);
    for (const std::string& kv : opts.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw scenario_error("--set: expected 'key=value', got '" + kv + "'");
        cfg.assign(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)), "--set");
    }
    if (opts.equations_opt->count() > 0) cfg.assign("equations", opts.equations, "--equations");
    if (opts.trials_opt->count() > 0) cfg.assign("trials", opts.trials, "--trials");
    if (opts.seed_opt->count() > 0) cfg.assign("seed", opts.seed, "--seed");
    if (opts.mode_opt->count() > 0) cfg.assign("mode", opts.mode, "--mode");
    if (opts.method_opt->count() > 0) cfg.assign("method", opts.method, "--method");
    return cfg.finalize();
}

void write_report(const RmseReport& report, const std::string& out_path) {
    if (out_path.empty()) {
        write_report_csv(report, std::cout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    write_report_csv(report, out);
}

int run_locate(const CommonOpts& common) {
    const Scenario sc = build_scenario(common);
    Rng rng(derive_trial_seed(sc.seed, 0, 0));
    const TrialOutcome outcome = run_trial(sc, sc.equations, rng);
    std::cout << "estimated_lon_deg=" << format_number(outcome.estimate_geo.lon_deg) << '\n'
              << "estimated_lat_deg=" << format_number(outcome.estimate_geo.lat_deg) << '\n'
              << "error_m=" << format_number(outcome.error_m) << '\n'
              << "iterations=" << outcome.estimate.iterations << '\n'
              << "converged=" << (outcome.converged ? "true" : "false") << '\n';
    return 0;
}

int run_sweep(const CommonOpts& common, const std::string& param, const std::string& values,
              const std::string& out_path, const std::string& detail_path) {
    ExperimentConfig cfg = ExperimentConfig::from_scenario(build_scenario(common));
    if (param == "equations") {
        cfg.sweep = SweepKind::EquationCount;
        cfg.values = parse_equation_values(values, "--values");
    } else if (param == "velocity_mps") {
        cfg.sweep = SweepKind::Velocity;
        cfg.values = parse_value_list(values, "--values");
    } else if (param == "error_bounds") {
        cfg.sweep = SweepKind::ErrorBounds;
        cfg.error_values = parse_error_pairs(values, "--values");
    } else {
        throw scenario_error("--param: expected equations, velocity_mps or error_bounds, got '" +
                             param + "'");
    }
    std::vector<TrialDetail> details;
    const RmseReport report = run_monte_carlo(cfg, detail_path.empty() ? nullptr : &details);
    write_report(report, out_path);
    if (!detail_path.empty()) {
        std::ofstream out(detail_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + detail_path);
        write_detail_csv(details, out);
    }
    return 0;
}

int run_compare(const CommonOpts& common, const std::string& out_path) {
    const ExperimentConfig cfg = ExperimentConfig::from_scenario(build_scenario(common));
    write_report(compare_methods(cfg), out_path);
    return 0;
}

int run_sensitivity(const CommonOpts& common, const std::string& out_path) {
    const ExperimentConfig cfg = ExperimentConfig::from_scenario(build_scenario(common));
    write_report(sensitivity_study(cfg), out_path);
    return 0;
}

int run_refine(const CommonOpts& common, const std::vector<std::string>& pool_args,
               std::size_t rounds, const std::string& out_path) {
    const ExperimentConfig cfg = ExperimentConfig::from_scenario(build_scenario(common));
    std::vector<GeodeticPoint> pool;
    for (const std::string& arg : pool_args) pool.push_back(parse_point(arg, "--pool"));
    write_report(refinement_report(cfg, pool, rounds), out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Locate a stationary ground emitter from the frequencies a single moving "
                 "satellite relays to the ground"};
    app.require_subcommand(1);

    CommonOpts locate_common;
    CLI::App* locate = app.add_subcommand(
        "locate", "Run one localization trial and print the estimate");
    add_common_options(*locate, locate_common);

    CommonOpts sweep_common;
    std::string sweep_param;
    std::string sweep_values;
    std::string sweep_out;
    std::string sweep_detail;
    CLI::App* sweep =
        app.add_subcommand("sweep", "Monte-Carlo RMSE over a swept parameter (CSV)");
    add_common_options(*sweep, sweep_common);
    sweep->add_option("--param", sweep_param,
                      "Swept parameter: equations, velocity_mps or error_bounds")
        ->required();
    sweep->add_option("--values", sweep_values,
                      "Sweep values: comma list, 'first:last' for equations, "
                      "'position/velocity' pairs for error_bounds")
        ->required();
    sweep->add_option("--out", sweep_out, "Write the report to this file instead of stdout");
    sweep->add_option("--detail", sweep_detail, "Also write one CSV row per trial to this file");

    CommonOpts compare_common;
    std::string compare_out;
    CLI::App* compare = app.add_subcommand(
        "compare", "RMSE for every method/mode combination on identical seeds (CSV)");
    add_common_options(*compare, compare_common);
    compare->add_option("--out", compare_out, "Write the report to this file instead of stdout");

    CommonOpts sensitivity_common;
    std::string sensitivity_out;
    CLI::App* sensitivity = app.add_subcommand(
        "sensitivity", "RMSE with position and velocity error bounds inflated tenfold (CSV)");
    add_common_options(*sensitivity, sensitivity_common);
    sensitivity->add_option("--out", sensitivity_out,
                            "Write the report to this file instead of stdout");

    CommonOpts refine_common;
    std::vector<std::string> refine_pool;
    std::size_t refine_rounds = 3;
    std::string refine_out;
    CLI::App* refine = app.add_subcommand(
        "refine", "RMSE per round when the reference transmitter is re-chosen from a pool (CSV)");
    add_common_options(*refine, refine_common);
    refine->add_option("--pool", refine_pool,
                       "Candidate reference transmitter 'lon_deg,lat_deg,alt_m' (repeatable)")
        ->required();
    refine->add_option("--rounds", refine_rounds, "Number of refinement rounds");
    refine->add_option("--out", refine_out, "Write the report to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(locate)) return run_locate(locate_common);
        if (app.got_subcommand(sweep))
            return run_sweep(sweep_common, sweep_param, sweep_values, sweep_out, sweep_detail);
        if (app.got_subcommand(compare)) return run_compare(compare_common, compare_out);
        if (app.got_subcommand(sensitivity))
            return run_sensitivity(sensitivity_common, sensitivity_out);
        if (app.got_subcommand(refine))
            return run_refine(refine_common, refine_pool, refine_rounds, refine_out);
    } catch (const scenario_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
