#include "dataops/timeutil.hpp"

#include <chrono>
#include <cstdio>

namespace dataops {

std::optional<CivilTime> parse_civil_time(const std::string& text) {
    CivilTime t;
    char zone = 0;
    int n = std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d%c", &t.year, &t.month, &t.day,
                        &t.hour, &t.minute, &t.second, &zone);
    if (n != 3 && n < 6) return std::nullopt;
    if (n == 3 && text.size() != 10) return std::nullopt;
    if (n == 7 && zone != 'Z') return std::nullopt;
    if (t.month < 1 || t.month > 12 || t.day < 1 || t.day > 31) return std::nullopt;
    if (t.hour < 0 || t.hour > 23 || t.minute < 0 || t.minute > 59 || t.second < 0 ||
        t.second > 60)
        return std::nullopt;
    using namespace std::chrono;
    if (!year_month_day(year(t.year), month(static_cast<unsigned>(t.month)),
                        day(static_cast<unsigned>(t.day)))
             .ok())
        return std::nullopt;
    return t;
}

std::string weekday_name(const CivilTime& t) {
    using namespace std::chrono;
    year_month_day ymd(year(t.year), month(static_cast<unsigned>(t.month)),
                       day(static_cast<unsigned>(t.day)));
    weekday wd{sys_days(ymd)};
    static const char* names[] = {"sunday", "monday",   "tuesday", "wednesday",
                                  "thursday", "friday", "saturday"};
    return names[wd.c_encoding()];
}

std::string iso_date(const CivilTime& t) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", t.year, t.month, t.day);
    return buf;
}

CivilTime current_utc_time() {
    using namespace std::chrono;
    auto now = system_clock::now();
    auto days = floor<std::chrono::days>(now);
    year_month_day ymd(days);
    hh_mm_ss tod(now - days);
    CivilTime t;
    t.year = static_cast<int>(ymd.year());
    t.month = static_cast<int>(static_cast<unsigned>(ymd.month()));
    t.day = static_cast<int>(static_cast<unsigned>(ymd.day()));
    t.hour = static_cast<int>(tod.hours().count());
    t.minute = static_cast<int>(tod.minutes().count());
    t.second = static_cast<int>(tod.seconds().count());
    return t;
}

}  // namespace dataops
