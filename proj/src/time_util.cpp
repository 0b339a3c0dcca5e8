#include "hashjack/time_util.hpp"

#include <cstdio>

#include "hashjack/errors.hpp"

namespace hashjack {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yr + (m <= 2));
}

std::int64_t parse_iso8601(std::string_view s) {
  // minimal shape: 2018-05-28T00:00:00 + zone designator
  if (s.size() < 20) throw InputError("timestamp too short: '" + std::string(s) + "'");
  if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' ||
      s[16] != ':')
    throw InputError("malformed timestamp: '" + std::string(s) + "'");
  auto year_s = s.substr(0, 4), mon_s = s.substr(5, 2), day_s = s.substr(8, 2);
  auto hh_s = s.substr(11, 2), mi_s = s.substr(14, 2), ss_s = s.substr(17, 2);
  if (!all_digits(year_s) || !all_digits(mon_s) || !all_digits(day_s) ||
      !all_digits(hh_s) || !all_digits(mi_s) || !all_digits(ss_s))
    throw InputError("malformed timestamp: '" + std::string(s) + "'");

  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::size_t frac_start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == frac_start) throw InputError("malformed timestamp: '" + std::string(s) + "'");
  }
  if (pos >= s.size()) throw InputError("timestamp missing zone offset: '" + std::string(s) + "'");

  std::int64_t offset_sec = 0;
  char z = s[pos];
  if (z == 'Z' || z == 'z') {
    if (pos + 1 != s.size()) throw InputError("trailing junk in timestamp: '" + std::string(s) + "'");
  } else if (z == '+' || z == '-') {
    auto rest = s.substr(pos + 1);
    int oh = 0, om = 0;
    if (rest.size() == 5 && rest[2] == ':' && all_digits(rest.substr(0, 2)) &&
        all_digits(rest.substr(3, 2))) {
      oh = to_int(rest.substr(0, 2));
      om = to_int(rest.substr(3, 2));
    } else if (rest.size() == 4 && all_digits(rest)) {
      oh = to_int(rest.substr(0, 2));
      om = to_int(rest.substr(2, 2));
    } else if (rest.size() == 2 && all_digits(rest)) {
      oh = to_int(rest);
    } else {
      throw InputError("malformed zone offset: '" + std::string(s) + "'");
    }
    offset_sec = static_cast<std::int64_t>(oh) * 3600 + om * 60;
    if (z == '-') offset_sec = -offset_sec;
  } else {
    throw InputError("malformed zone offset: '" + std::string(s) + "'");
  }

  int year = to_int(year_s);
  unsigned mon = static_cast<unsigned>(to_int(mon_s));
  unsigned day = static_cast<unsigned>(to_int(day_s));
  int hh = to_int(hh_s), mi = to_int(mi_s), ss = to_int(ss_s);
  if (mon < 1 || mon > 12 || day < 1 || day > 31 || hh > 23 || mi > 59 || ss > 60)
    throw InputError("timestamp field out of range: '" + std::string(s) + "'");

  std::int64_t days = days_from_civil(year, mon, day);
  return days * 86400 + hh * 3600 + mi * 60 + ss - offset_sec;
}

std::string format_utc(std::int64_t t) {
  std::int64_t days = t / 86400;
  std::int64_t rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  int y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, m, d,
                static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return std::string(buf);
}

}  // namespace hashjack
