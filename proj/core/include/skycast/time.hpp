#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace skycast {

// Seconds since the Unix epoch, interpreted as UTC throughout.
using Timestamp = std::int64_t;

inline constexpr Timestamp kHourStep = 3600;

struct CivilTime {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;
    int minute = 0;
    int second = 0;
};

Timestamp to_timestamp(const CivilTime& c);
CivilTime to_civil(Timestamp t);

// 1 on January 1st.
int day_of_year(Timestamp t);

// Fractional UTC hours in [0, 24).
double hour_of_day(Timestamp t);

// Accepts "YYYY-MM-DD", "YYYY-MM-DD HH:MM[:SS]" and the ISO 'T' variant,
// with an optional trailing 'Z'. Throws DataError on anything else.
Timestamp parse_iso8601(std::string_view text);

// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_iso8601(Timestamp t);

}  // namespace skycast
