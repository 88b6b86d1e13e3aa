#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "skycast/committee.hpp"
#include "skycast/config.hpp"
#include "skycast/csv.hpp"
#include "skycast/metrics.hpp"
#include "skycast/synth.hpp"

namespace skycast {

// Ingested input with the derived clear-sky and index series, all aligned.
struct DataBundle {
    IrradianceSeries ghi;
    ClearSkySeries clearsky;
    ClearSkyIndexSeries index;
};

DataBundle load_data(const RunConfig& cfg);

// Restriction of the bundle to a half-open time range.
DataBundle slice_range(const DataBundle& data, const TimeRange& range);

struct FitOutcome {
    std::string arma_model_path;
    std::string nn_model_path;
    std::string arma_selection_path;
    std::string nn_selection_path;
    arma::ArmaSpec arma_spec;
    nn::MlpSpec nn_spec;
    double arma_bic = 0.0;
    double nn_bic = 0.0;
    std::size_t arma_cells_attempted = 0;
};

// Ingest -> clear sky -> index -> split -> grid search + candidate training;
// writes model documents and ranked selection tables under cfg.output_dir.
FitOutcome run_fit(const RunConfig& cfg, std::ostream& log);

struct ForecastOutcome {
    std::string records_path;
    std::vector<double> pmps;
    std::size_t n_scored = 0;
    std::size_t n_skipped = 0;
};

// Builds the committee from model documents (default: the two written by
// run_fit), walks the test range and writes the per-sample record stream.
ForecastOutcome run_forecast(const RunConfig& cfg,
                             std::vector<std::string> model_paths, std::ostream& log);

void write_records_csv(std::ostream& out, const CommitteeRun& run);
void write_records_csv(const std::string& path, const CommitteeRun& run);
CommitteeRun read_records_csv(const std::string& path);

struct EvaluateArgs {
    std::string records_path;
    std::string output_dir = "out";
    EvaluationOptions options{};
    std::optional<Timestamp> window_start;
    int window_hours = 96;
};

struct EvaluateOutcome {
    EvaluationTable table;
    std::string metrics_text_path;
    std::string metrics_csv_path;
    std::string scored_records_path;
    std::string scatter_csv_path;
    std::string scatter_svg_path;
    std::string window_csv_path;  // empty unless a window was requested
    std::string window_svg_path;
    std::size_t window_rows = 0;
};

EvaluateOutcome run_evaluate(const EvaluateArgs& args, std::ostream& log);

struct SynthOutcome {
    std::string csv_path;
    std::string sidecar_path;
    std::size_t rows = 0;
};

SynthOutcome run_synth(const SyntheticSpec& spec, const std::string& csv_path,
                       std::ostream& log);

}  // namespace skycast
