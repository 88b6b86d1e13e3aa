#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "skycast/time.hpp"

namespace skycast {

// Hourly GHI measurements in Wh/m^2. Timestamps are strictly increasing with
// a constant one-hour step; gaps in the record appear as NaN values, never as
// missing rows.
struct IrradianceSeries {
    std::vector<Timestamp> timestamps;
    std::vector<double> values;  // NaN = missing

    std::size_t size() const { return timestamps.size(); }
    void validate() const;  // throws NonMonotonicTimestamps / DataError
};

// Clear-sky GHI aligned with a measured series.
struct ClearSkySeries {
    std::vector<Timestamp> timestamps;
    std::vector<double> values;

    std::size_t size() const { return timestamps.size(); }
};

// Dimensionless clear-sky index. valid marks daytime samples usable for
// modeling; invalid entries hold NaN and are excluded from fitting,
// forecasting and scoring.
struct ClearSkyIndexSeries {
    std::vector<Timestamp> timestamps;
    std::vector<double> values;
    std::vector<unsigned char> valid;

    std::size_t size() const { return timestamps.size(); }
    std::size_t valid_count() const;
};

// Half-open interval [begin, end).
struct TimeRange {
    Timestamp begin = 0;
    Timestamp end = 0;

    bool contains(Timestamp t) const { return t >= begin && t < end; }
    bool operator==(const TimeRange&) const = default;
};

struct SplitConfig {
    TimeRange train;
    TimeRange test;

    bool operator==(const SplitConfig&) const = default;
    void validate() const;  // non-overlapping, train precedes test
};

// k_cls = ghi / clearsky wherever clearsky >= threshold and ghi is present.
// Everything else is masked out (NaN, valid = false); in particular no
// division is attempted at night.
ClearSkyIndexSeries compute_clear_sky_index(const IrradianceSeries& ghi,
                                            const ClearSkySeries& clearsky,
                                            double threshold);

// Inverse transform, clamped below at zero.
double reconstruct_ghi(double kcls_forecast, double clearsky_at_target);

// Restricts the series to the two configured ranges. Throws EmptyPartition
// if either side ends up without a single valid sample.
std::pair<ClearSkyIndexSeries, ClearSkyIndexSeries> split(
    const ClearSkyIndexSeries& series, const SplitConfig& cfg);

// A maximal stretch of valid samples usable as one autoregressive history.
// In the default mode a run breaks at every masked sample (nights, gaps), so
// lag windows never straddle a night. With bridge_gaps the valid samples are
// chained into a single run: the last evening sample acts as the lag
// preceding the next morning.
struct SampleRun {
    std::vector<std::size_t> index;  // positions in the source series
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

std::vector<SampleRun> contiguous_runs(const ClearSkyIndexSeries& series,
                                       bool bridge_gaps = false);

// Fills interior gaps of at most max_gap_hours consecutive missing values by
// linear interpolation; longer gaps are left missing.
IrradianceSeries interpolate_short_gaps(const IrradianceSeries& series,
                                        int max_gap_hours = 2);

}  // namespace skycast
