#include "skycast/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skycast/errors.hpp"

namespace skycast {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

void IrradianceSeries::validate() const {
    if (timestamps.size() != values.size()) {
        throw MisalignedSeries("irradiance series: timestamp/value length mismatch");
    }
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        if (timestamps[i] <= timestamps[i - 1]) {
            throw NonMonotonicTimestamps("timestamps not strictly increasing at index " +
                                         std::to_string(i));
        }
        if (timestamps[i] - timestamps[i - 1] != kHourStep) {
            throw DataError("timestamp step is not one hour at index " + std::to_string(i) +
                            "; encode gaps as missing values");
        }
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isnan(values[i]) && values[i] < 0.0) {
            throw DataError("negative GHI at index " + std::to_string(i));
        }
    }
}

std::size_t ClearSkyIndexSeries::valid_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 1));
}

void SplitConfig::validate() const {
    if (train.begin >= train.end) throw ConfigError("train range is empty or reversed");
    if (test.begin >= test.end) throw ConfigError("test range is empty or reversed");
    if (test.begin < train.end) {
        throw ConfigError("test range must start after the training range ends");
    }
}

ClearSkyIndexSeries compute_clear_sky_index(const IrradianceSeries& ghi,
                                            const ClearSkySeries& clearsky,
                                            double threshold) {
    if (ghi.size() != clearsky.size() || ghi.timestamps != clearsky.timestamps) {
        throw MisalignedSeries("measured and clear-sky series are not aligned");
    }
    if (!(threshold > 0.0)) {
        throw ConfigError("daytime threshold must be positive");
    }

    ClearSkyIndexSeries out;
    out.timestamps = ghi.timestamps;
    out.values.resize(ghi.size(), kNaN);
    out.valid.resize(ghi.size(), 0);

    for (std::size_t i = 0; i < ghi.size(); ++i) {
        const double g = ghi.values[i];
        const double c = clearsky.values[i];
        if (c >= threshold && !std::isnan(g)) {
            out.values[i] = g / c;
            out.valid[i] = 1;
        }
    }
    return out;
}

double reconstruct_ghi(double kcls_forecast, double clearsky_at_target) {
    const double v = kcls_forecast * clearsky_at_target;
    return v > 0.0 ? v : 0.0;
}

std::pair<ClearSkyIndexSeries, ClearSkyIndexSeries> split(
    const ClearSkyIndexSeries& series, const SplitConfig& cfg) {
    cfg.validate();

    const auto take = [&](const TimeRange& r) {
        ClearSkyIndexSeries part;
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (r.contains(series.timestamps[i])) {
                part.timestamps.push_back(series.timestamps[i]);
                part.values.push_back(series.values[i]);
                part.valid.push_back(series.valid[i]);
            }
        }
        return part;
    };

    auto train = take(cfg.train);
    auto test = take(cfg.test);
    if (train.valid_count() == 0) throw EmptyPartition("training range has no valid samples");
    if (test.valid_count() == 0) throw EmptyPartition("test range has no valid samples");
    return {std::move(train), std::move(test)};
}

std::vector<SampleRun> contiguous_runs(const ClearSkyIndexSeries& series,
                                       bool bridge_gaps) {
    std::vector<SampleRun> runs;
    SampleRun current;

    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!series.valid[i]) {
            if (!bridge_gaps && !current.values.empty()) {
                runs.push_back(std::move(current));
                current = {};
            }
            continue;
        }
        current.index.push_back(i);
        current.values.push_back(series.values[i]);
    }
    if (!current.values.empty()) runs.push_back(std::move(current));
    return runs;
}

IrradianceSeries interpolate_short_gaps(const IrradianceSeries& series,
                                        int max_gap_hours) {
    IrradianceSeries out = series;
    const std::size_t n = out.size();
    std::size_t i = 0;
    while (i < n) {
        if (!std::isnan(out.values[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && std::isnan(out.values[j])) ++j;
        const std::size_t gap = j - i;
        // interior gaps only, and only up to the cap
        if (i > 0 && j < n && gap <= static_cast<std::size_t>(max_gap_hours)) {
            const double left = out.values[i - 1];
            const double right = out.values[j];
            for (std::size_t k = i; k < j; ++k) {
                const double f = static_cast<double>(k - i + 1) / static_cast<double>(gap + 1);
                out.values[k] = std::max(0.0, left + f * (right - left));
            }
        }
        i = j;
    }
    return out;
}

}  // namespace skycast
