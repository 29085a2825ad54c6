// Calendar dates as integral day counts with ISO-8601 text conversion.
#pragma once

#include "genrisk/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace genrisk {

// Days since 1970-01-01 (can be negative).
using Date = std::int32_t;

// Civil-calendar mapping, valid across the proleptic Gregorian calendar.
constexpr Date days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int>(doe) - 719468;
}

struct Civil {
    int year;
    unsigned month;
    unsigned day;
};

constexpr Civil civil_from_days(Date z) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int y = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {y + (m <= 2), m, d};
}

// 0 = Monday ... 6 = Sunday.
constexpr int weekday(Date z) { return static_cast<int>((z + 3) % 7 + 7) % 7; }

constexpr bool is_weekend(Date z) { return weekday(z) >= 5; }

std::string format_iso(Date d);

// Parses YYYY-MM-DD (also accepts YYYY/MM/DD). Throws CsvError on malformed input.
Date parse_iso(const std::string& s);

// Consecutive weekdays starting at `start` (moved forward to a weekday if needed).
std::vector<Date> business_dates(Date start, int count);

}  // namespace genrisk
