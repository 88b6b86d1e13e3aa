#include "skycast/clearsky.hpp"

#include <cmath>

#include "skycast/errors.hpp"

namespace skycast {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }

// Fractional-year angle in radians (Spencer).
double year_angle(Timestamp t) {
    const int doy = day_of_year(t);
    const double frac = (hour_of_day(t) - 12.0) / 24.0;
    return 2.0 * kPi * (static_cast<double>(doy - 1) + frac) / 365.0;
}

}  // namespace

void SiteLocation::validate() const {
    if (!(latitude_deg >= -90.0 && latitude_deg <= 90.0)) {
        throw ConfigError("latitude out of range [-90, 90]");
    }
    if (!(longitude_deg >= -180.0 && longitude_deg <= 180.0)) {
        throw ConfigError("longitude out of range [-180, 180]");
    }
}

void SolisParams::validate() const {
    if (!(i0_prime > 0.0)) throw ConfigError("i0_prime must be positive");
    if (!(tau_g > 0.0)) throw ConfigError("tau_g must be positive");
    if (!(g_exponent > 0.0)) throw ConfigError("g_exponent must be positive");
}

double solar_declination(Timestamp t) {
    const double g = year_angle(t);
    return 0.006918 - 0.399912 * std::cos(g) + 0.070257 * std::sin(g) -
           0.006758 * std::cos(2 * g) + 0.000907 * std::sin(2 * g) -
           0.002697 * std::cos(3 * g) + 0.00148 * std::sin(3 * g);
}

double equation_of_time_minutes(Timestamp t) {
    const double g = year_angle(t);
    return 229.18 * (0.000075 + 0.001868 * std::cos(g) - 0.032077 * std::sin(g) -
                     0.014615 * std::cos(2 * g) - 0.040849 * std::sin(2 * g));
}

double eccentricity_factor(Timestamp t) {
    const double g = year_angle(t);
    return 1.00011 + 0.034221 * std::cos(g) + 0.00128 * std::sin(g) +
           0.000719 * std::cos(2 * g) + 0.000077 * std::sin(2 * g);
}

double solar_elevation(const SiteLocation& site, Timestamp t) {
    const double decl = solar_declination(t);
    const double solar_hours =
        hour_of_day(t) + site.longitude_deg / 15.0 + equation_of_time_minutes(t) / 60.0;
    const double hour_angle = deg2rad(15.0 * (solar_hours - 12.0));
    const double lat = deg2rad(site.latitude_deg);

    double s = std::sin(lat) * std::sin(decl) +
               std::cos(lat) * std::cos(decl) * std::cos(hour_angle);
    if (s > 1.0) s = 1.0;
    if (s < -1.0) s = -1.0;
    return std::asin(s);
}

double solis_ghi(const SolisParams& params, double elevation_rad) {
    if (elevation_rad <= 0.0) return 0.0;
    const double sin_h = std::sin(elevation_rad);
    return params.i0_prime * std::exp(-params.tau_g / std::pow(sin_h, params.g_exponent)) * sin_h;
}

ClearSkySeries clear_sky_series(const SiteLocation& site, const SolisParams& params,
                                const std::vector<Timestamp>& timestamps) {
    site.validate();
    params.validate();
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        if (timestamps[i] <= timestamps[i - 1]) {
            throw NonMonotonicTimestamps("clear-sky timestamps not strictly increasing at index " +
                                         std::to_string(i));
        }
    }

    ClearSkySeries out;
    out.timestamps = timestamps;
    out.values.reserve(timestamps.size());
    for (const Timestamp t : timestamps) {
        SolisParams p = params;
        if (params.eccentricity_correction) p.i0_prime *= eccentricity_factor(t);
        out.values.push_back(solis_ghi(p, solar_elevation(site, t)));
    }
    return out;
}

}  // namespace skycast
