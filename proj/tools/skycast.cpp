// skycast: hour-ahead GHI forecasting with a BIC-weighted model committee.
//
// Subcommands:
//   synth     generate seeded synthetic fixtures
//   fit       select and fit the committee members on the training range
//   forecast  one-step-ahead walk over the test range
//   evaluate  error metrics, scatter and time-window plot data

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skycast/config.hpp"
#include "skycast/errors.hpp"
#include "skycast/pipeline.hpp"

namespace {

skycast::RunConfig load_run_config(const std::string& config_path) {
    std::string path = config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("SKYCAST_CONFIG")) path = env;
    }
    if (path.empty()) {
        throw skycast::ConfigError(
            "no configuration given (use --config or set SKYCAST_CONFIG)");
    }
    return skycast::parse_config_file(path);
}

struct ConfigOverrides {
    std::string input;
    std::string output_dir;
    std::string train_begin, train_end, test_begin, test_end;
    double daytime_threshold = -1.0;
    int threads = -1;
    bool night_bridge = false;
    bool night_bridge_set = false;

    void apply(skycast::RunConfig& cfg) const {
        if (!input.empty()) cfg.input = input;
        if (!output_dir.empty()) cfg.output_dir = output_dir;
        if (!train_begin.empty()) cfg.split.train.begin = skycast::parse_iso8601(train_begin);
        if (!train_end.empty()) cfg.split.train.end = skycast::parse_iso8601(train_end);
        if (!test_begin.empty()) cfg.split.test.begin = skycast::parse_iso8601(test_begin);
        if (!test_end.empty()) cfg.split.test.end = skycast::parse_iso8601(test_end);
        if (daytime_threshold > 0.0) cfg.daytime_threshold = daytime_threshold;
        if (threads >= 0) cfg.threads = static_cast<unsigned>(threads);
        if (night_bridge_set) cfg.night_bridge = night_bridge;
        cfg.validate();
    }
};

void add_override_flags(CLI::App* cmd, ConfigOverrides& ov) {
    cmd->add_option("--input", ov.input, "Override the configured input CSV");
    cmd->add_option("--output-dir", ov.output_dir, "Override the configured output directory");
    cmd->add_option("--train-begin", ov.train_begin, "Override training range start");
    cmd->add_option("--train-end", ov.train_end, "Override training range end");
    cmd->add_option("--test-begin", ov.test_begin, "Override test range start");
    cmd->add_option("--test-end", ov.test_end, "Override test range end");
    cmd->add_option("--daytime-threshold", ov.daytime_threshold,
                    "Override the daytime clear-sky threshold [Wh/m2]");
    cmd->add_option("--threads", ov.threads, "Worker threads for grid/candidate fits");
    cmd->add_flag("--night-bridge{true},--no-night-bridge{false}", ov.night_bridge,
                  "Chain lag windows across masked gaps")
        ->each([&](const std::string&) { ov.night_bridge_set = true; });
}

std::vector<double> parse_coeff_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::strtod(item.c_str(), nullptr));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hour-ahead solar irradiance forecasting committee"};
    app.require_subcommand(0, 1);

    bool print_default_config = false;
    app.add_flag("--print-default-config", print_default_config,
                 "Print the annotated default configuration and exit");

    // ---- fit ----
    auto* fit_cmd = app.add_subcommand("fit", "Fit committee members on the training range");
    std::string fit_config;
    ConfigOverrides fit_ov;
    fit_cmd->add_option("--config", fit_config, "Run configuration file");
    add_override_flags(fit_cmd, fit_ov);

    // ---- forecast ----
    auto* fc_cmd = app.add_subcommand("forecast", "One-step-ahead forecasts over the test range");
    std::string fc_config;
    std::vector<std::string> fc_models;
    ConfigOverrides fc_ov;
    fc_cmd->add_option("--config", fc_config, "Run configuration file");
    fc_cmd->add_option("--model", fc_models,
                       "Model document(s); default: <output_dir>/{arma,nn}_model.txt");
    add_override_flags(fc_cmd, fc_ov);

    // ---- evaluate ----
    auto* ev_cmd = app.add_subcommand("evaluate", "Score a forecast record stream");
    skycast::EvaluateArgs ev_args;
    std::string ev_pers = "ghi", ev_denom = "scored", ev_window_start;
    bool ev_no_persistence = false;
    ev_cmd->add_option("--records", ev_args.records_path, "forecast.csv from the forecast step")
        ->required();
    ev_cmd->add_option("--output-dir", ev_args.output_dir, "Output directory");
    ev_cmd->add_option("--persistence-mode", ev_pers, "Baseline mode: ghi|kcls");
    ev_cmd->add_option("--nrmse-denominator", ev_denom, "Normalization mean: scored|all");
    ev_cmd->add_flag("--no-persistence", ev_no_persistence, "Skip the persistence baseline row");
    ev_cmd->add_option("--window-start", ev_window_start,
                       "Emit a time-slice plot starting at this timestamp");
    ev_cmd->add_option("--window-hours", ev_args.window_hours, "Time-slice length in hours");

    // ---- synth ----
    auto* sy_cmd = app.add_subcommand("synth", "Generate a seeded synthetic fixture");
    skycast::SyntheticSpec sy_spec;
    std::string sy_kind = "ar", sy_out = "synthetic.csv", sy_start = "1998-01-01T00:00";
    std::string sy_phi = "0.7", sy_theta;
    std::size_t sy_n = 1000;
    sy_cmd->add_option("--kind", sy_kind, "ar|arma|mlp-teacher|cloudy-clearsky");
    sy_cmd->add_option("--n", sy_n, "Number of hourly samples")->required();
    sy_cmd->add_option("--seed", sy_spec.seed, "Generator seed")->required();
    sy_cmd->add_option("--out", sy_out, "Output CSV path");
    sy_cmd->add_option("--start", sy_start, "First timestamp");
    sy_cmd->add_option("--phi", sy_phi, "AR coefficients, comma separated");
    sy_cmd->add_option("--theta", sy_theta, "MA coefficients, comma separated");
    sy_cmd->add_option("--intercept", sy_spec.intercept, "Process intercept");
    sy_cmd->add_option("--noise", sy_spec.noise_sigma, "Innovation standard deviation");
    sy_cmd->add_option("--clearsky-level", sy_spec.clearsky_level,
                       "Flat clear-sky level for ar/arma/mlp-teacher kinds");
    sy_cmd->add_option("--teacher-p", sy_spec.teacher_p, "Teacher lag count");
    sy_cmd->add_option("--teacher-h", sy_spec.teacher_h, "Teacher hidden units");
    sy_cmd->add_option("--latitude", sy_spec.site.latitude_deg, "Site latitude [deg N]");
    sy_cmd->add_option("--longitude", sy_spec.site.longitude_deg, "Site longitude [deg E]");
    sy_cmd->add_option("--k-mean", sy_spec.k_mean, "Cloud index mean");
    sy_cmd->add_option("--k-phi", sy_spec.k_phi, "Cloud index AR(1) coefficient");
    sy_cmd->add_option("--k-sigma", sy_spec.k_sigma, "Cloud index innovation sd");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (print_default_config) {
            std::cout << skycast::default_config_text();
            return 0;
        }
        if (fit_cmd->parsed()) {
            skycast::RunConfig cfg = load_run_config(fit_config);
            fit_ov.apply(cfg);
            skycast::run_fit(cfg, std::cout);
            return 0;
        }
        if (fc_cmd->parsed()) {
            skycast::RunConfig cfg = load_run_config(fc_config);
            fc_ov.apply(cfg);
            skycast::run_forecast(cfg, fc_models, std::cout);
            return 0;
        }
        if (ev_cmd->parsed()) {
            ev_args.options.persistence_mode = skycast::persistence_mode_from_string(ev_pers);
            ev_args.options.nrmse_denominator =
                skycast::nrmse_denominator_from_string(ev_denom);
            ev_args.options.include_persistence = !ev_no_persistence;
            if (!ev_window_start.empty()) {
                ev_args.window_start = skycast::parse_iso8601(ev_window_start);
            }
            skycast::run_evaluate(ev_args, std::cout);
            return 0;
        }
        if (sy_cmd->parsed()) {
            sy_spec.kind = skycast::synth_kind_from_string(sy_kind);
            sy_spec.n = sy_n;
            sy_spec.start = skycast::parse_iso8601(sy_start);
            sy_spec.phi = parse_coeff_list(sy_phi);
            sy_spec.theta = parse_coeff_list(sy_theta);
            skycast::run_synth(sy_spec, sy_out, std::cout);
            return 0;
        }
        std::cout << app.help();
        return 0;
    } catch (const skycast::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
