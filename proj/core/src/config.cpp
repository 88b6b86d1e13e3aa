#include "skycast/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "skycast/errors.hpp"

namespace skycast {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(std::string s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    return s;
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("config key '" + key + "' expects true|false, got '" + v + "'");
}

double parse_num(const std::string& v, const std::string& key) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') {
        throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
    }
    return x;
}

std::vector<int> parse_int_list(const std::string& v, const std::string& key) {
    std::vector<int> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(static_cast<int>(parse_num(item, key)));
    }
    if (out.empty()) throw ConfigError("config key '" + key + "' expects an integer list");
    return out;
}

std::string join(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out;
}

}  // namespace

const char* to_string(ClearSkySource s) {
    return s == ClearSkySource::Solis ? "solis" : "column";
}

ClearSkySource clear_sky_source_from_string(const std::string& s) {
    if (s == "solis") return ClearSkySource::Solis;
    if (s == "column") return ClearSkySource::Column;
    throw ConfigError("unknown clearsky_source '" + s + "' (solis|column)");
}

void RunConfig::validate() const {
    if (input.empty()) throw ConfigError("config: 'input' is required");
    site.validate();
    solis.validate();
    if (!(daytime_threshold > 0.0)) throw ConfigError("daytime_threshold must be > 0");
    if (max_gap_hours < 1) throw ConfigError("max_gap_hours must be >= 1");
    split.validate();
    if (arma_p_min < 1 || arma_p_min > arma_p_max || arma_q_min < 0 ||
        arma_q_min > arma_q_max) {
        throw ConfigError("invalid arma grid bounds");
    }
    if (nn_lag_candidates.empty() || nn_hidden_candidates.empty()) {
        throw ConfigError("nn candidate lists must not be empty");
    }
    for (int p : nn_lag_candidates) {
        if (p < 1) throw ConfigError("nn lag candidates must be >= 1");
    }
    for (int h : nn_hidden_candidates) {
        if (h < 1) throw ConfigError("nn hidden candidates must be >= 1");
    }
    if (clearsky_source == ClearSkySource::Column && !schema_has_clearsky) {
        throw ConfigError("clearsky_source=column requires schema=timestamp,ghi,clearsky");
    }
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::map<std::string, bool> seen;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (seen[key]) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" +
                              key + "'");
        }
        seen[key] = true;

        if (key == "input") c.input = val;
        else if (key == "output_dir") c.output_dir = val;
        else if (key == "schema") {
            if (val == "timestamp,ghi") c.schema_has_clearsky = false;
            else if (val == "timestamp,ghi,clearsky") c.schema_has_clearsky = true;
            else throw ConfigError(source + ": unknown schema '" + val + "'");
        }
        else if (key == "clearsky_source") c.clearsky_source = clear_sky_source_from_string(val);
        else if (key == "site_latitude") c.site.latitude_deg = parse_num(val, key);
        else if (key == "site_longitude") c.site.longitude_deg = parse_num(val, key);
        else if (key == "solis_i0_prime") c.solis.i0_prime = parse_num(val, key);
        else if (key == "solis_tau_g") c.solis.tau_g = parse_num(val, key);
        else if (key == "solis_g_exponent") c.solis.g_exponent = parse_num(val, key);
        else if (key == "solis_eccentricity") c.solis.eccentricity_correction = parse_bool(val, key);
        else if (key == "daytime_threshold") c.daytime_threshold = parse_num(val, key);
        else if (key == "night_bridge") c.night_bridge = parse_bool(val, key);
        else if (key == "interpolate_gaps") c.interpolate_gaps = parse_bool(val, key);
        else if (key == "max_gap_hours") c.max_gap_hours = static_cast<int>(parse_num(val, key));
        else if (key == "train_begin") c.split.train.begin = parse_iso8601(val);
        else if (key == "train_end") c.split.train.end = parse_iso8601(val);
        else if (key == "test_begin") c.split.test.begin = parse_iso8601(val);
        else if (key == "test_end") c.split.test.end = parse_iso8601(val);
        else if (key == "arma_p_min") c.arma_p_min = static_cast<int>(parse_num(val, key));
        else if (key == "arma_p_max") c.arma_p_max = static_cast<int>(parse_num(val, key));
        else if (key == "arma_q_min") c.arma_q_min = static_cast<int>(parse_num(val, key));
        else if (key == "arma_q_max") c.arma_q_max = static_cast<int>(parse_num(val, key));
        else if (key == "nn_lag_candidates") c.nn_lag_candidates = parse_int_list(val, key);
        else if (key == "nn_hidden_candidates") c.nn_hidden_candidates = parse_int_list(val, key);
        else if (key == "nn_seed") c.nn_seed = static_cast<std::uint64_t>(parse_num(val, key));
        else if (key == "nn_bic_effective_params") c.nn_bic_effective_params = parse_bool(val, key);
        else if (key == "persistence_mode") c.persistence_mode = persistence_mode_from_string(val);
        else if (key == "nrmse_denominator") c.nrmse_denominator = nrmse_denominator_from_string(val);
        else if (key == "threads") c.threads = static_cast<unsigned>(parse_num(val, key));
        else {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": unknown key '" +
                              key + "'");
        }
    }

    c.validate();
    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os << "input = " << c.input << "\n";
    os << "output_dir = " << c.output_dir << "\n";
    os << "schema = " << (c.schema_has_clearsky ? "timestamp,ghi,clearsky" : "timestamp,ghi")
       << "\n";
    os << "clearsky_source = " << to_string(c.clearsky_source) << "\n";
    os << "site_latitude = " << fmt(c.site.latitude_deg) << "\n";
    os << "site_longitude = " << fmt(c.site.longitude_deg) << "\n";
    os << "solis_i0_prime = " << fmt(c.solis.i0_prime) << "\n";
    os << "solis_tau_g = " << fmt(c.solis.tau_g) << "\n";
    os << "solis_g_exponent = " << fmt(c.solis.g_exponent) << "\n";
    os << "solis_eccentricity = " << (c.solis.eccentricity_correction ? "true" : "false")
       << "\n";
    os << "daytime_threshold = " << fmt(c.daytime_threshold) << "\n";
    os << "night_bridge = " << (c.night_bridge ? "true" : "false") << "\n";
    os << "interpolate_gaps = " << (c.interpolate_gaps ? "true" : "false") << "\n";
    os << "max_gap_hours = " << c.max_gap_hours << "\n";
    os << "train_begin = " << format_iso8601(c.split.train.begin) << "\n";
    os << "train_end = " << format_iso8601(c.split.train.end) << "\n";
    os << "test_begin = " << format_iso8601(c.split.test.begin) << "\n";
    os << "test_end = " << format_iso8601(c.split.test.end) << "\n";
    os << "arma_p_min = " << c.arma_p_min << "\n";
    os << "arma_p_max = " << c.arma_p_max << "\n";
    os << "arma_q_min = " << c.arma_q_min << "\n";
    os << "arma_q_max = " << c.arma_q_max << "\n";
    os << "nn_lag_candidates = " << join(c.nn_lag_candidates) << "\n";
    os << "nn_hidden_candidates = " << join(c.nn_hidden_candidates) << "\n";
    os << "nn_seed = " << c.nn_seed << "\n";
    os << "nn_bic_effective_params = " << (c.nn_bic_effective_params ? "true" : "false")
       << "\n";
    os << "persistence_mode = " << to_string(c.persistence_mode) << "\n";
    os << "nrmse_denominator = " << to_string(c.nrmse_denominator) << "\n";
    os << "threads = " << c.threads << "\n";
    return os.str();
}

std::string default_config_text() {
    return
        "# skycast run configuration\n"
        "# Units: GHI in Wh/m2 per hour, timestamps ISO-8601 UTC.\n"
        "\n"
        "input = data.csv\n"
        "output_dir = out\n"
        "# timestamp,ghi  or  timestamp,ghi,clearsky\n"
        "schema = timestamp,ghi\n"
        "\n"
        "# solis: compute clear-sky GHI from the site geometry below.\n"
        "# column: take it from the input file's clearsky column instead.\n"
        "clearsky_source = solis\n"
        "site_latitude = 41.92\n"
        "site_longitude = 8.73\n"
        "# Clear-sky curve parameters; tune them to the site (ledger: clearsky-defaults).\n"
        "solis_i0_prime = 1367\n"
        "solis_tau_g = 0.27\n"
        "solis_g_exponent = 1\n"
        "solis_eccentricity = true\n"
        "\n"
        "# Samples with clear-sky GHI below this are masked out of fitting and\n"
        "# scoring (ledger: night-masking).\n"
        "daytime_threshold = 20\n"
        "# false: lag windows never straddle a night; the first hours of each\n"
        "# morning are skipped. true: the last evening sample feeds the next\n"
        "# morning's lags (ledger: night-gap-handling).\n"
        "night_bridge = false\n"
        "# Missing measurements stay missing unless enabled; linear fill is\n"
        "# capped at max_gap_hours (ledger: gap-interpolation).\n"
        "interpolate_gaps = false\n"
        "max_gap_hours = 2\n"
        "\n"
        "train_begin = 1998-01-01T00:00\n"
        "train_end = 1999-01-01T00:00\n"
        "test_begin = 2006-01-01T00:00\n"
        "test_end = 2007-01-01T00:00\n"
        "\n"
        "arma_p_min = 1\n"
        "arma_p_max = 10\n"
        "arma_q_min = 0\n"
        "arma_q_max = 10\n"
        "\n"
        "nn_lag_candidates = 1,2,3\n"
        "nn_hidden_candidates = 4,8,12\n"
        "nn_seed = 1\n"
        "# false: information criterion uses the raw parameter count (p+2)h+1.\n"
        "# true: uses the effective parameter count instead (ledger: nn-bic-variant).\n"
        "nn_bic_effective_params = false\n"
        "\n"
        "# ghi: carry the last measured GHI forward. kcls: carry the clear-sky\n"
        "# index forward and rescale (ledger: persistence-definition).\n"
        "persistence_mode = ghi\n"
        "# scored: mean measured GHI over the commonly scored samples.\n"
        "# all: mean over the whole test period, nights included\n"
        "# (ledger: nrmse-denominator).\n"
        "nrmse_denominator = scored\n"
        "\n"
        "threads = 1\n";
}

}  // namespace skycast
