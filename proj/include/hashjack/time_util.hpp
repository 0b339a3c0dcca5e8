#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace hashjack {

// Epoch seconds; everything is stored in UTC, offsets are applied once
// at parse time.

// Accepts "YYYY-MM-DDTHH:MM:SS" followed by 'Z', "+HH:MM", "+HHMM" or
// "+HH" (same with '-'). Fractional seconds are truncated.
// Throws InputError on malformed input.
std::int64_t parse_iso8601(std::string_view s);

// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_utc(std::int64_t epoch_seconds);

std::int64_t days_from_civil(int y, unsigned m, unsigned d);
void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d);

}  // namespace hashjack
