#include "skycast/committee.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skycast/errors.hpp"

namespace skycast {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> pmp_from_bics(std::span<const double> bics,
                                  std::span<const double> priors) {
    if (bics.empty()) throw EmptyInput("pmp_from_bics: no BIC values");
    if (!priors.empty() && priors.size() != bics.size()) {
        throw MemberCountMismatch("priors/bics length mismatch");
    }
    for (double b : bics) {
        if (!std::isfinite(b)) throw NumericalFailure("non-finite BIC");
    }

    const double shift = *std::min_element(bics.begin(), bics.end());
    std::vector<double> w(bics.size());
    double total = 0.0;
    for (std::size_t k = 0; k < bics.size(); ++k) {
        const double prior = priors.empty() ? 1.0 : priors[k];
        if (!(prior > 0.0)) throw ConfigError("model priors must be positive");
        w[k] = prior * std::exp(-(bics[k] - shift) / 2.0);
        total += w[k];
    }
    for (double& x : w) x /= total;
    return w;
}

double committee_forecast(std::span<const double> pmps,
                          std::span<const double> forecasts) {
    if (pmps.size() != forecasts.size() || pmps.empty()) {
        throw MemberCountMismatch("one forecast per member required");
    }
    double out = 0.0;
    for (std::size_t k = 0; k < pmps.size(); ++k) {
        if (!std::isfinite(forecasts[k])) {
            throw NumericalFailure("non-finite member forecast");
        }
        out += pmps[k] * forecasts[k];
    }
    return out;
}

ArmaMember::ArmaMember(std::string name, arma::ArmaModel model)
    : ForecastMember(std::move(name), arma::bic(model)),
      model_(std::move(model)),
      filter_(model_) {}

void ArmaMember::reset() { filter_.reset(); }

void ArmaMember::observe(double kcls) { filter_.observe(kcls); }

std::optional<double> ArmaMember::forecast_next() {
    if (!filter_.ready()) return std::nullopt;
    return filter_.forecast_next();
}

NnMember::NnMember(std::string name, nn::MlpModel model, double bic_value)
    : ForecastMember(std::move(name), bic_value), model_(std::move(model)) {
    reset();
}

void NnMember::reset() {
    lags_.assign(model_.spec.p, 0.0);
    seen_ = 0;
}

void NnMember::observe(double kcls) {
    lags_.insert(lags_.begin(), kcls);
    lags_.pop_back();
    ++seen_;
}

std::optional<double> NnMember::forecast_next() {
    if (seen_ < static_cast<std::size_t>(model_.spec.p)) return std::nullopt;
    return model_.forward(lags_);
}

Committee Committee::build(std::vector<std::unique_ptr<ForecastMember>> members,
                           std::vector<double> priors) {
    if (members.size() < 2) {
        throw MemberCountMismatch("a committee needs at least two members");
    }
    if (priors.empty()) {
        priors.assign(members.size(), 1.0 / static_cast<double>(members.size()));
    }
    if (priors.size() != members.size()) {
        throw MemberCountMismatch("one prior per member required");
    }
    double psum = 0.0;
    for (double p : priors) {
        if (!(p > 0.0 && p <= 1.0)) throw ConfigError("priors must lie in (0, 1]");
        psum += p;
    }
    if (std::abs(psum - 1.0) > 1e-9) throw ConfigError("priors must sum to 1");

    std::vector<double> bics;
    bics.reserve(members.size());
    for (const auto& m : members) bics.push_back(m->bic());

    Committee c;
    c.members = std::move(members);
    c.priors = std::move(priors);
    c.pmps = pmp_from_bics(bics, c.priors);
    return c;
}

const char* to_string(RecordStatus s) {
    switch (s) {
        case RecordStatus::Scored: return "scored";
        case RecordStatus::InsufficientHistory: return "insufficient_history";
        case RecordStatus::MemberError: return "member_error";
    }
    return "unknown";
}

RecordStatus record_status_from_string(const std::string& s) {
    if (s == "scored") return RecordStatus::Scored;
    if (s == "insufficient_history") return RecordStatus::InsufficientHistory;
    if (s == "member_error") return RecordStatus::MemberError;
    throw DataError("unknown record status '" + s + "'");
}

CommitteeRun run_committee(Committee& committee, const ClearSkyIndexSeries& kcls,
                           const ClearSkySeries& clearsky,
                           const IrradianceSeries& ghi, bool bridge_gaps) {
    if (kcls.size() != clearsky.size() || kcls.timestamps != clearsky.timestamps ||
        kcls.size() != ghi.size() || kcls.timestamps != ghi.timestamps) {
        throw MisalignedSeries("test inputs are not aligned");
    }

    CommitteeRun out;
    for (const auto& m : committee.members) {
        out.member_names.push_back(m->name());
        out.member_bics.push_back(m->bic());
    }
    out.pmps = committee.pmps;

    double sum_all = 0.0;
    std::size_t n_all = 0;
    for (double g : ghi.values) {
        if (!std::isnan(g)) {
            sum_all += g;
            ++n_all;
        }
    }
    out.mean_ghi_all = n_all ? sum_all / static_cast<double>(n_all) : 0.0;

    const auto runs = contiguous_runs(kcls, bridge_gaps);
    const std::size_t k_members = committee.members.size();

    for (const auto& run : runs) {
        for (auto& m : committee.members) m->reset();

        for (std::size_t i = 0; i < run.size(); ++i) {
            const std::size_t idx = run.index[i];
            ForecastRecord rec;
            rec.timestamp = kcls.timestamps[idx];
            rec.ghi_measured = ghi.values[idx];
            rec.ghi_clearsky = clearsky.values[idx];
            rec.kcls_measured = kcls.values[idx];
            rec.member_kcls.assign(k_members, kNaN);
            rec.committee_kcls = kNaN;
            rec.committee_ghi = kNaN;

            bool all_present = true;
            bool member_error = false;
            for (std::size_t k = 0; k < k_members; ++k) {
                try {
                    const auto f = committee.members[k]->forecast_next();
                    if (f) {
                        rec.member_kcls[k] = *f;
                    } else {
                        all_present = false;
                    }
                } catch (const Error&) {
                    member_error = true;
                    all_present = false;
                }
            }

            if (all_present) {
                rec.committee_kcls = committee_forecast(committee.pmps, rec.member_kcls);
                rec.committee_ghi = reconstruct_ghi(rec.committee_kcls, rec.ghi_clearsky);
                rec.status = RecordStatus::Scored;
                ++out.n_scored;
            } else {
                rec.status = member_error ? RecordStatus::MemberError
                                          : RecordStatus::InsufficientHistory;
                ++out.n_skipped;
            }
            out.records.push_back(std::move(rec));

            for (auto& m : committee.members) m->observe(kcls.values[idx]);
        }
    }
    return out;
}

}  // namespace skycast
