#include "genrisk/dates.hpp"

#include <cstdio>

namespace genrisk {

std::string format_iso(Date d) {
    const Civil c = civil_from_days(d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", c.year, c.month, c.day);
    return buf;
}

Date parse_iso(const std::string& s) {
    int y = 0;
    unsigned m = 0, d = 0;
    char sep1 = 0, sep2 = 0;
    if (std::sscanf(s.c_str(), "%d%c%u%c%u", &y, &sep1, &m, &sep2, &d) != 5 ||
        (sep1 != '-' && sep1 != '/') || sep2 != sep1 || m < 1 || m > 12 || d < 1 || d > 31) {
        throw CsvError("bad date: '" + s + "'");
    }
    return days_from_civil(y, m, d);
}

std::vector<Date> business_dates(Date start, int count) {
    std::vector<Date> out;
    out.reserve(count);
    Date d = start;
    while (is_weekend(d)) ++d;
    while (static_cast<int>(out.size()) < count) {
        if (!is_weekend(d)) out.push_back(d);
        ++d;
    }
    return out;
}

}  // namespace genrisk
