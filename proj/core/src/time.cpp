#include "skycast/time.hpp"

#include <cctype>
#include <cstdio>

#include "skycast/errors.hpp"

namespace skycast {

namespace {

// Proleptic Gregorian day count (days since 1970-01-01).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

bool parse_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

}  // namespace

Timestamp to_timestamp(const CivilTime& c) {
    return days_from_civil(c.year, c.month, c.day) * 86400 +
           c.hour * 3600 + c.minute * 60 + c.second;
}

CivilTime to_civil(Timestamp t) {
    std::int64_t days = t / 86400;
    std::int64_t sod = t % 86400;
    if (sod < 0) {
        sod += 86400;
        days -= 1;
    }
    CivilTime c;
    civil_from_days(days, c.year, c.month, c.day);
    c.hour = static_cast<int>(sod / 3600);
    c.minute = static_cast<int>((sod % 3600) / 60);
    c.second = static_cast<int>(sod % 60);
    return c;
}

int day_of_year(Timestamp t) {
    const CivilTime c = to_civil(t);
    return static_cast<int>(days_from_civil(c.year, c.month, c.day) -
                            days_from_civil(c.year, 1, 1)) + 1;
}

double hour_of_day(Timestamp t) {
    std::int64_t sod = t % 86400;
    if (sod < 0) sod += 86400;
    return static_cast<double>(sod) / 3600.0;
}

Timestamp parse_iso8601(std::string_view text) {
    // Strip surrounding whitespace.
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);

    const auto fail = [&]() -> Timestamp {
        throw DataError("invalid timestamp '" + std::string(text) +
                        "' (expected YYYY-MM-DD[THH:MM[:SS]][Z])");
    };

    CivilTime c;
    if (!parse_int(text, 0, 4, c.year) || text.size() < 10 ||
        text[4] != '-' || text[7] != '-' ||
        !parse_int(text, 5, 2, c.month) || !parse_int(text, 8, 2, c.day)) {
        return fail();
    }
    if (c.month < 1 || c.month > 12 || c.day < 1 || c.day > 31) return fail();

    std::size_t pos = 10;
    if (pos < text.size()) {
        if (text[pos] != 'T' && text[pos] != ' ') return fail();
        ++pos;
        if (!parse_int(text, pos, 2, c.hour) || pos + 5 > text.size() ||
            text[pos + 2] != ':' || !parse_int(text, pos + 3, 2, c.minute)) {
            return fail();
        }
        pos += 5;
        if (pos < text.size() && text[pos] == ':') {
            if (!parse_int(text, pos + 1, 2, c.second)) return fail();
            pos += 3;
        }
        if (pos < text.size() && text[pos] == 'Z') ++pos;
        if (pos != text.size()) return fail();
        if (c.hour > 23 || c.minute > 59 || c.second > 60) return fail();
    }
    return to_timestamp(c);
}

std::string format_iso8601(Timestamp t) {
    const CivilTime c = to_civil(t);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                  c.year, c.month, c.day, c.hour, c.minute, c.second);
    return buf;
}

}  // namespace skycast
