#include "skycast/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "skycast/errors.hpp"

namespace skycast {

namespace {

void check_pair(std::span<const double> f, std::span<const double> m) {
    if (f.empty() || m.empty()) throw EmptyInput("metric over empty sample set");
    if (f.size() != m.size()) throw LengthMismatch("forecast/measured length mismatch");
}

}  // namespace

double rmse(std::span<const double> forecast, std::span<const double> measured) {
    check_pair(forecast, measured);
    double acc = 0.0;
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        const double d = forecast[i] - measured[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(forecast.size()));
}

double mbe(std::span<const double> forecast, std::span<const double> measured) {
    check_pair(forecast, measured);
    double acc = 0.0;
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        acc += forecast[i] - measured[i];
    }
    return acc / static_cast<double>(forecast.size());
}

double nrmse(std::span<const double> forecast, std::span<const double> measured,
             double normalization_mean) {
    if (!(normalization_mean > 0.0)) {
        throw ZeroNormalization("nrmse normalization mean must be positive");
    }
    return 100.0 * rmse(forecast, measured) / normalization_mean;
}

const char* to_string(PersistenceMode m) {
    return m == PersistenceMode::Ghi ? "ghi" : "kcls";
}

PersistenceMode persistence_mode_from_string(const std::string& s) {
    if (s == "ghi") return PersistenceMode::Ghi;
    if (s == "kcls") return PersistenceMode::Kcls;
    throw ConfigError("unknown persistence mode '" + s + "' (ghi|kcls)");
}

const char* to_string(NrmseDenominator d) {
    return d == NrmseDenominator::ScoredSamples ? "scored" : "all";
}

NrmseDenominator nrmse_denominator_from_string(const std::string& s) {
    if (s == "scored") return NrmseDenominator::ScoredSamples;
    if (s == "all") return NrmseDenominator::TestPeriodAll;
    throw ConfigError("unknown nrmse denominator '" + s + "' (scored|all)");
}

double persistence_forecast(std::span<const double> history, PersistenceMode mode,
                            double clearsky_at_target) {
    if (history.empty()) throw InsufficientHistory("persistence needs one prior sample");
    const double last = history.back();
    if (mode == PersistenceMode::Ghi) return last;
    return reconstruct_ghi(last, clearsky_at_target);
}

std::string EvaluationTable::to_text() const {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-14s %12s %10s %10s %8s\n", "Model",
                  "RMSE[Wh/m2]", "nRMSE[%]", "MBE[Wh/m2]", "n");
    os << buf;
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%-14s %12.2f %10.2f %10.2f %8zu\n",
                      row.name.c_str(), row.eval.rmse, row.eval.nrmse_pct, row.eval.mbe,
                      row.eval.n_scored);
        os << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "scored=%zu excluded=%zu normalization_mean=%.2f (MBE = forecast - measured)\n",
                  n_scored, n_excluded, normalization_mean);
    os << buf;
    return os.str();
}

std::string EvaluationTable::to_csv() const {
    std::ostringstream os;
    os << "model,rmse_whm2,nrmse_pct,mbe_whm2,n_scored,normalization_mean\n";
    char buf[160];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%zu,%.6f\n", row.name.c_str(),
                      row.eval.rmse, row.eval.nrmse_pct, row.eval.mbe, row.eval.n_scored,
                      row.eval.normalization_mean);
        os << buf;
    }
    return os.str();
}

EvaluationTable evaluate_run(const CommitteeRun& run, const EvaluationOptions& opts) {
    if (run.records.empty()) throw EmptyInput("evaluate_run: empty record stream");

    const std::size_t k_members = run.member_names.size();

    // Common sample set: the committee scored the record AND the preceding
    // hour is itself a valid record (so the persistence baseline is defined
    // on exactly the same timestamps).
    std::vector<std::size_t> scored;
    for (std::size_t i = 0; i < run.records.size(); ++i) {
        const auto& rec = run.records[i];
        if (rec.status != RecordStatus::Scored) continue;
        if (i == 0 || run.records[i - 1].timestamp != rec.timestamp - kHourStep) continue;
        scored.push_back(i);
    }
    if (scored.empty()) throw EmptyInput("no commonly scorable samples in the stream");

    std::vector<double> measured;
    measured.reserve(scored.size());
    for (std::size_t i : scored) measured.push_back(run.records[i].ghi_measured);

    double norm_mean = 0.0;
    if (opts.nrmse_denominator == NrmseDenominator::ScoredSamples) {
        for (double g : measured) norm_mean += g;
        norm_mean /= static_cast<double>(measured.size());
    } else {
        norm_mean = run.mean_ghi_all;
    }
    if (!(norm_mean > 0.0)) throw ZeroNormalization("nrmse normalization mean is zero");

    EvaluationTable table;
    table.n_scored = scored.size();
    table.n_excluded = run.records.size() - scored.size();
    table.normalization_mean = norm_mean;

    const auto score = [&](const std::string& name, const std::vector<double>& forecast) {
        ModelScores row;
        row.name = name;
        row.eval.n_scored = scored.size();
        row.eval.rmse = rmse(forecast, measured);
        row.eval.nrmse_pct = nrmse(forecast, measured, norm_mean);
        row.eval.mbe = mbe(forecast, measured);
        row.eval.normalization_mean = norm_mean;
        table.rows.push_back(std::move(row));
    };

    std::vector<double> forecast(scored.size());
    for (std::size_t k = 0; k < k_members; ++k) {
        for (std::size_t j = 0; j < scored.size(); ++j) {
            const auto& rec = run.records[scored[j]];
            forecast[j] = reconstruct_ghi(rec.member_kcls[k], rec.ghi_clearsky);
        }
        score(run.member_names[k], forecast);
    }

    for (std::size_t j = 0; j < scored.size(); ++j) {
        forecast[j] = run.records[scored[j]].committee_ghi;
    }
    score("committee", forecast);

    if (opts.include_persistence) {
        for (std::size_t j = 0; j < scored.size(); ++j) {
            const auto& prev = run.records[scored[j] - 1];
            const auto& rec = run.records[scored[j]];
            if (opts.persistence_mode == PersistenceMode::Ghi) {
                const double h[1] = {prev.ghi_measured};
                forecast[j] = persistence_forecast(h, PersistenceMode::Ghi);
            } else {
                const double h[1] = {prev.kcls_measured};
                forecast[j] = persistence_forecast(h, PersistenceMode::Kcls, rec.ghi_clearsky);
            }
        }
        score("persistence", forecast);
    }
    return table;
}

}  // namespace skycast
