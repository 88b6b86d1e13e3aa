#pragma once

#include <span>
#include <string>
#include <vector>

#include "skycast/committee.hpp"

namespace skycast {

double rmse(std::span<const double> forecast, std::span<const double> measured);

// Mean signed error, forecast - measured (positive = over-forecast).
double mbe(std::span<const double> forecast, std::span<const double> measured);

// 100 * rmse / normalization_mean, in percent.
double nrmse(std::span<const double> forecast, std::span<const double> measured,
             double normalization_mean);

enum class PersistenceMode { Ghi, Kcls };

const char* to_string(PersistenceMode m);
PersistenceMode persistence_mode_from_string(const std::string& s);

// Last-value carry-forward. history is ordered oldest first and is on the
// mode's scale: GHI values for Ghi, clear-sky index for Kcls (the index
// forecast is then pushed through the clear-sky value at the target).
double persistence_forecast(std::span<const double> history, PersistenceMode mode,
                            double clearsky_at_target = 0.0);

enum class NrmseDenominator { ScoredSamples, TestPeriodAll };

const char* to_string(NrmseDenominator d);
NrmseDenominator nrmse_denominator_from_string(const std::string& s);

struct ForecastEvaluation {
    std::size_t n_scored = 0;
    double rmse = 0.0;       // Wh/m^2
    double nrmse_pct = 0.0;  // percent
    double mbe = 0.0;        // Wh/m^2
    double normalization_mean = 0.0;
};

struct ModelScores {
    std::string name;
    ForecastEvaluation eval;
};

struct EvaluationOptions {
    PersistenceMode persistence_mode = PersistenceMode::Ghi;
    NrmseDenominator nrmse_denominator = NrmseDenominator::ScoredSamples;
    bool include_persistence = true;
};

struct EvaluationTable {
    std::vector<ModelScores> rows;
    std::size_t n_scored = 0;
    std::size_t n_excluded = 0;  // records present but not commonly scorable
    double normalization_mean = 0.0;

    std::string to_text() const;
    std::string to_csv() const;
};

// Scores every member, the committee and (by default) the persistence
// baseline on the GHI scale over one common sample set: records skipped by
// any model, or whose preceding hour is not a valid sample, are excluded
// for all models and counted.
EvaluationTable evaluate_run(const CommitteeRun& run,
                             const EvaluationOptions& opts = {});

}  // namespace skycast
