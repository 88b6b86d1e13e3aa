#include <doctest.h>

#include "skycast/errors.hpp"
#include "skycast/time.hpp"

using namespace skycast;

TEST_CASE("civil round trip across leap years") {
    for (int year : {1998, 2000, 2004, 2006}) {
        const Timestamp t0 = to_timestamp({year, 1, 1, 0, 0, 0});
        const Timestamp t1 = to_timestamp({year + 1, 1, 1, 0, 0, 0});
        const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        CHECK((t1 - t0) / 86400 == (leap ? 8784 / 24 : 8760 / 24));
    }
    const CivilTime c{2006, 6, 21, 12, 34, 56};
    const CivilTime back = to_civil(to_timestamp(c));
    CHECK(back.year == 2006);
    CHECK(back.month == 6);
    CHECK(back.day == 21);
    CHECK(back.hour == 12);
    CHECK(back.minute == 34);
    CHECK(back.second == 56);
}

TEST_CASE("day of year and hour of day") {
    CHECK(day_of_year(to_timestamp({2006, 1, 1, 5, 0, 0})) == 1);
    CHECK(day_of_year(to_timestamp({2006, 12, 31, 0, 0, 0})) == 365);
    CHECK(day_of_year(to_timestamp({2004, 12, 31, 0, 0, 0})) == 366);
    CHECK(hour_of_day(to_timestamp({2006, 3, 4, 18, 30, 0})) == doctest::Approx(18.5));
}

TEST_CASE("iso8601 parsing accepts the documented shapes") {
    const Timestamp expected = to_timestamp({2006, 6, 21, 12, 0, 0});
    CHECK(parse_iso8601("2006-06-21T12:00") == expected);
    CHECK(parse_iso8601("2006-06-21 12:00") == expected);
    CHECK(parse_iso8601("2006-06-21T12:00:00") == expected);
    CHECK(parse_iso8601("2006-06-21T12:00:00Z") == expected);
    CHECK(parse_iso8601("2006-06-21") == to_timestamp({2006, 6, 21, 0, 0, 0}));
    CHECK(format_iso8601(expected) == "2006-06-21T12:00:00Z");
}

TEST_CASE("iso8601 parsing rejects junk") {
    CHECK_THROWS_AS(parse_iso8601("not a date"), DataError);
    CHECK_THROWS_AS(parse_iso8601("2006-13-01"), DataError);
    CHECK_THROWS_AS(parse_iso8601("2006-06-21T25:00"), DataError);
    CHECK_THROWS_AS(parse_iso8601("2006-06-21T12:00X"), DataError);
}

TEST_CASE("format/parse round trip") {
    const Timestamp t = to_timestamp({1998, 2, 28, 23, 0, 0});
    CHECK(parse_iso8601(format_iso8601(t)) == t);
}
