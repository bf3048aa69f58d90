#pragma once

// Shared basics: error types, calendar dates, small string helpers,
// and the FNV-1a hash used for config and seed derivation.

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tmg {

inline constexpr const char* kVersion = "0.1.0";

// Exit-code mapping: ConfigError -> 1, DataError -> 2, NumericError -> 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- strings

inline std::string trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

// ------------------------------------------------------------------ dates

// Calendar date backed by std::chrono; day_number() is days since the
// civil epoch (1970-01-01), so consecutive dates differ by exactly 1.
class Date {
 public:
  Date() = default;
  Date(int year, unsigned month, unsigned day)
      : ymd_(std::chrono::year{year}, std::chrono::month{month},
             std::chrono::day{day}) {}

  static std::optional<Date> make(int year, unsigned month, unsigned day) {
    Date d(year, month, day);
    if (!d.ymd_.ok()) return std::nullopt;
    return d;
  }

  // Strict ISO-8601 "YYYY-MM-DD".
  static std::optional<Date> parse_iso(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto num = [&](std::size_t off, std::size_t len) -> std::optional<int> {
      int v = 0;
      for (std::size_t i = off; i < off + len; ++i) {
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
        v = v * 10 + (s[i] - '0');
      }
      return v;
    };
    auto y = num(0, 4), m = num(5, 2), d = num(8, 2);
    if (!y || !m || !d) return std::nullopt;
    return make(*y, static_cast<unsigned>(*m), static_cast<unsigned>(*d));
  }

  std::string to_iso() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year(), month(), day());
    return buf;
  }

  int year() const { return static_cast<int>(ymd_.year()); }
  unsigned month() const { return static_cast<unsigned>(ymd_.month()); }
  unsigned day() const { return static_cast<unsigned>(ymd_.day()); }

  long day_number() const {
    return std::chrono::sys_days(ymd_).time_since_epoch().count();
  }

  Date plus_days(long n) const {
    auto sd = std::chrono::sys_days(ymd_) + std::chrono::days{n};
    Date out;
    out.ymd_ = std::chrono::year_month_day(sd);
    return out;
  }

  friend bool operator==(const Date& a, const Date& b) {
    return a.ymd_ == b.ymd_;
  }
  friend auto operator<=>(const Date& a, const Date& b) {
    return std::chrono::sys_days(a.ymd_) <=> std::chrono::sys_days(b.ymd_);
  }

 private:
  std::chrono::year_month_day ymd_{};
};

// Inclusive day count of [a, b].
inline long days_inclusive(const Date& a, const Date& b) {
  return b.day_number() - a.day_number() + 1;
}

// ------------------------------------------------------------------- hash

inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t h = 14695981039346656037ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

// Canonical 6-decimal formatting used by series files; parsing the printed
// text back gives the canonical double for that value.
inline std::string format6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline double canonical6(double v) { return std::strtod(format6(v).c_str(), nullptr); }

// Full-precision float formatting (round-trips exactly).
inline std::string format_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace tmg
