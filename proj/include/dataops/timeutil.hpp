#pragma once

#include <optional>
#include <string>

namespace dataops {

// A civil (wall-clock) timestamp; checks never read a hidden clock, the
// caller injects it.
struct CivilTime {
    int year = 1970;
    int month = 1;
    int day = 1;
    int hour = 0;
    int minute = 0;
    int second = 0;
};

// Accepts "yyyy-mm-dd" or "yyyy-mm-ddThh:mm:ss[Z]".
std::optional<CivilTime> parse_civil_time(const std::string& text);

// Lowercase English weekday name ("monday" ... "sunday").
std::string weekday_name(const CivilTime& t);

// "yyyy-mm-dd"
std::string iso_date(const CivilTime& t);

CivilTime current_utc_time();

}  // namespace dataops
