#pragma once

#include <vector>

#include "skycast/series.hpp"
#include "skycast/time.hpp"

namespace skycast {

struct SiteLocation {
    double latitude_deg = 0.0;   // north positive, [-90, 90]
    double longitude_deg = 0.0;  // east positive, [-180, 180]

    bool operator==(const SiteLocation&) const = default;
    void validate() const;
};

// Parameters of the one-expression clear-sky form
//   ghi(h) = i0_prime * exp(-tau_g / sin(h)^g_exponent) * sin(h)
// with h the solar elevation. i0_prime may additionally be modulated by the
// annual sun-earth distance cycle when eccentricity_correction is set (the
// series builder applies it; the pointwise evaluator below takes i0_prime
// as given).
struct SolisParams {
    double i0_prime = 1367.0;
    double tau_g = 0.27;
    double g_exponent = 1.0;
    bool eccentricity_correction = true;

    bool operator==(const SolisParams&) const = default;
    void validate() const;
};

// Low-cost solar geometry: Spencer declination + equation of time + hour
// angle. Accuracy around +/-0.5 degrees, enough for a normalizer.
double solar_declination(Timestamp t);        // radians
double equation_of_time_minutes(Timestamp t);
double eccentricity_factor(Timestamp t);      // sun-earth distance correction

// Elevation above the horizon in radians; negative at night.
double solar_elevation(const SiteLocation& site, Timestamp t);

// Clear-sky GHI at the given elevation. Zero when the sun is at or below
// the horizon, non-decreasing and positive above it (the attenuation term
// underflows to zero at grazing elevations below roughly 0.01 rad).
double solis_ghi(const SolisParams& params, double elevation_rad);

// One value per timestamp. Timestamps must be strictly increasing (throws
// NonMonotonicTimestamps otherwise).
ClearSkySeries clear_sky_series(const SiteLocation& site, const SolisParams& params,
                                const std::vector<Timestamp>& timestamps);

}  // namespace skycast
