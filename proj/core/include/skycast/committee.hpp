#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skycast/arma.hpp"
#include "skycast/mlp.hpp"
#include "skycast/series.hpp"

namespace skycast {

// Converts information-criterion values into posterior model probabilities:
// weight_k proportional to prior_k * exp(-bic_k / 2), normalized. The best
// (smallest) BIC is shifted to zero before exponentiating; the ratios are
// invariant under that shift. Empty priors mean uniform.
std::vector<double> pmp_from_bics(std::span<const double> bics,
                                  std::span<const double> priors = {});

// Convex combination sum_k pmp_k * forecast_k. Throws MemberCountMismatch.
double committee_forecast(std::span<const double> pmps,
                          std::span<const double> forecasts);

// A committee member walks the test series chronologically: it observes
// every measured sample and, once enough history is available, produces the
// one-step-ahead forecast for the next sample. State resets at run
// boundaries.
class ForecastMember {
public:
    virtual ~ForecastMember() = default;

    const std::string& name() const { return name_; }
    double bic() const { return bic_; }

    virtual void reset() = 0;
    virtual void observe(double kcls) = 0;
    virtual std::optional<double> forecast_next() = 0;

protected:
    ForecastMember(std::string name, double bic_value)
        : name_(std::move(name)), bic_(bic_value) {}

private:
    std::string name_;
    double bic_;
};

class ArmaMember final : public ForecastMember {
public:
    ArmaMember(std::string name, arma::ArmaModel model);

    void reset() override;
    void observe(double kcls) override;
    std::optional<double> forecast_next() override;

    const arma::ArmaModel& model() const { return model_; }

private:
    arma::ArmaModel model_;
    arma::ArmaFilter filter_;
};

class NnMember final : public ForecastMember {
public:
    NnMember(std::string name, nn::MlpModel model, double bic_value);

    void reset() override;
    void observe(double kcls) override;
    std::optional<double> forecast_next() override;

    const nn::MlpModel& model() const { return model_; }

private:
    nn::MlpModel model_;
    std::vector<double> lags_;  // most recent first
    std::size_t seen_ = 0;
};

struct Committee {
    std::vector<std::unique_ptr<ForecastMember>> members;
    std::vector<double> priors;
    std::vector<double> pmps;

    static Committee build(std::vector<std::unique_ptr<ForecastMember>> members,
                           std::vector<double> priors = {});
};

enum class RecordStatus { Scored, InsufficientHistory, MemberError };

const char* to_string(RecordStatus s);
RecordStatus record_status_from_string(const std::string& s);

struct ForecastRecord {
    Timestamp timestamp = 0;
    double ghi_measured = 0.0;
    double ghi_clearsky = 0.0;
    double kcls_measured = 0.0;
    std::vector<double> member_kcls;  // NaN where a member had no forecast
    double committee_kcls = 0.0;      // NaN when not scored
    double committee_ghi = 0.0;       // NaN when not scored
    RecordStatus status = RecordStatus::Scored;
};

struct CommitteeRun {
    std::vector<std::string> member_names;
    std::vector<double> member_bics;
    std::vector<double> pmps;
    std::vector<ForecastRecord> records;  // one per valid test sample
    std::size_t n_scored = 0;
    std::size_t n_skipped = 0;
    double mean_ghi_all = 0.0;  // test-period measured mean, nights included
};

// Chronological one-step-ahead walk over the valid test samples. Members
// always forecast from measured history (no recursion on model output).
// Targets whose lag window is unavailable are emitted with a skip status,
// never dropped.
CommitteeRun run_committee(Committee& committee, const ClearSkyIndexSeries& kcls,
                           const ClearSkySeries& clearsky,
                           const IrradianceSeries& ghi,
                           bool bridge_gaps = false);

}  // namespace skycast
