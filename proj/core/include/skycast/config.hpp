#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skycast/clearsky.hpp"
#include "skycast/metrics.hpp"
#include "skycast/series.hpp"

namespace skycast {

enum class ClearSkySource { Solis, Column };

const char* to_string(ClearSkySource s);
ClearSkySource clear_sky_source_from_string(const std::string& s);

// Every knob of a full run. Parsed from a flat `key = value` file with '#'
// comments; serialization round-trips losslessly.
struct RunConfig {
    std::string input;
    std::string output_dir = "out";
    bool schema_has_clearsky = false;

    ClearSkySource clearsky_source = ClearSkySource::Solis;
    SiteLocation site{};
    SolisParams solis{};

    double daytime_threshold = 20.0;  // Wh/m2
    bool night_bridge = false;        // chain lag windows across masked gaps
    bool interpolate_gaps = false;    // linear fill of short measurement gaps
    int max_gap_hours = 2;

    SplitConfig split{};

    int arma_p_min = 1;
    int arma_p_max = 10;
    int arma_q_min = 0;
    int arma_q_max = 10;

    std::vector<int> nn_lag_candidates{1, 2, 3};
    std::vector<int> nn_hidden_candidates{4, 8, 12};
    std::uint64_t nn_seed = 1;
    bool nn_bic_effective_params = false;

    PersistenceMode persistence_mode = PersistenceMode::Ghi;
    NrmseDenominator nrmse_denominator = NrmseDenominator::ScoredSamples;

    unsigned threads = 1;

    bool operator==(const RunConfig&) const = default;

    void validate() const;  // throws ConfigError
};

RunConfig parse_config(const std::string& text, const std::string& source);
RunConfig parse_config_file(const std::string& path);

// Lossless: parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);

// The annotated template printed by `skycast --print-default-config`.
std::string default_config_text();

}  // namespace skycast
