#pragma once

// Event ingest: canonical CSV -> EventRecord list, plus country/date/doubt
// filtering. The canonical layout is
//   event_id,date,country,doubt,tactics,weapons,targets
// where the last three columns hold zero or more names joined by '|'.

#include <algorithm>
#include <istream>
#include <string>
#include <vector>

#include "tmg/core.hpp"
#include "tmg/csv.hpp"

namespace tmg {

struct EventRecord {
  std::string event_id;
  Date date;
  std::string country;
  bool doubt = false;
  std::vector<std::string> tactics;
  std::vector<std::string> weapons;
  std::vector<std::string> targets;
};

struct IngestConfig {
  std::string country;      // empty = keep all countries
  Date start;               // inclusive window
  Date end;
  bool drop_doubt = true;   // drop rows flagged as doubtful
};

enum class UnknownDatePolicy { Drop, ClampToFirstOfMonth };

// Column-name mapping for raw GTD-style extracts. Multi-slot categories use
// numbered columns (attacktype1_txt..attacktype3_txt, etc.).
struct GtdSchemaMap {
  std::string event_id = "eventid";
  std::string year = "iyear";
  std::string month = "imonth";
  std::string day = "iday";
  std::string country = "country_txt";
  std::string doubt = "doubtterr";
  std::vector<std::string> tactics = {"attacktype1_txt", "attacktype2_txt",
                                      "attacktype3_txt"};
  std::vector<std::string> weapons = {"weaptype1_txt", "weaptype2_txt",
                                      "weaptype3_txt", "weaptype4_txt"};
  std::vector<std::string> targets = {"targtype1_txt", "targtype2_txt",
                                      "targtype3_txt"};
};

struct GtdParseResult {
  std::vector<EventRecord> events;
  std::vector<std::string> warnings;  // one entry per dropped/modified row
  std::size_t rows_read = 0;
};

namespace detail {

inline std::vector<std::string> split_multi(const std::string& field) {
  std::vector<std::string> out;
  for (auto& tok : split(field, '|')) {
    auto t = trim(tok);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace detail

// Parses a raw GTD-style extract by column name. Rows with an unknown month
// or day (value 0) follow `policy`; rows whose date still fails to parse are
// skipped with a warning. Missing optional category slots are fine; missing
// required columns are a schema error.
inline GtdParseResult parse_events(std::istream& in, const GtdSchemaMap& schema,
                                   UnknownDatePolicy policy = UnknownDatePolicy::Drop) {
  std::vector<std::string> header;
  if (!csv::read_record(in, header))
    throw DataError("gtd csv: empty input");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[trim(header[i])] = i;

  auto require = [&](const std::string& name) -> std::size_t {
    auto it = col.find(name);
    if (it == col.end())
      throw DataError("gtd csv: missing required column '" + name + "'");
    return it->second;
  };
  std::size_t c_id = require(schema.event_id), c_year = require(schema.year),
              c_month = require(schema.month), c_day = require(schema.day),
              c_country = require(schema.country), c_doubt = require(schema.doubt);
  // Category slot 1 is required per dimension; higher slots are optional.
  auto slots = [&](const std::vector<std::string>& names) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < names.size(); ++i) {
      auto it = col.find(names[i]);
      if (it != col.end()) idx.push_back(it->second);
      else if (i == 0)
        throw DataError("gtd csv: missing required column '" + names[i] + "'");
    }
    return idx;
  };
  auto s_tac = slots(schema.tactics), s_wep = slots(schema.weapons),
       s_tar = slots(schema.targets);

  GtdParseResult out;
  std::vector<std::string> fields;
  std::size_t row = 1;
  auto cell = [&](std::size_t i) -> std::string {
    return i < fields.size() ? trim(fields[i]) : std::string{};
  };
  while (csv::read_record(in, fields)) {
    ++row;
    if (fields.size() == 1 && fields[0].empty()) continue;
    ++out.rows_read;
    long year = std::atol(cell(c_year).c_str());
    long month = std::atol(cell(c_month).c_str());
    long day = std::atol(cell(c_day).c_str());
    if (month == 0 || day == 0) {
      if (policy == UnknownDatePolicy::Drop) {
        out.warnings.push_back("row " + std::to_string(row) +
                               ": unknown month/day, dropped");
        continue;
      }
      if (month == 0) month = 1;
      if (day == 0) day = 1;
      out.warnings.push_back("row " + std::to_string(row) +
                             ": unknown month/day, clamped");
    }
    auto d = Date::make(static_cast<int>(year), static_cast<unsigned>(month),
                        static_cast<unsigned>(day));
    if (!d) {
      out.warnings.push_back("row " + std::to_string(row) + ": invalid date " +
                             std::to_string(year) + "-" + std::to_string(month) +
                             "-" + std::to_string(day) + ", skipped");
      continue;
    }
    EventRecord ev;
    ev.event_id = cell(c_id);
    if (ev.event_id.empty()) ev.event_id = "row" + std::to_string(row);
    ev.date = *d;
    ev.country = cell(c_country);
    ev.doubt = cell(c_doubt) == "1";
    auto collect = [&](const std::vector<std::size_t>& idx) {
      std::vector<std::string> vals;
      for (std::size_t i : idx) {
        auto v = cell(i);
        if (!v.empty() && v != ".") vals.push_back(std::move(v));
      }
      return vals;
    };
    ev.tactics = collect(s_tac);
    ev.weapons = collect(s_wep);
    ev.targets = collect(s_tar);
    out.events.push_back(std::move(ev));
  }
  return out;
}

inline const std::vector<std::string> kEventHeader = {
    "event_id", "date", "country", "doubt", "tactics", "weapons", "targets"};

// Reads the canonical event CSV. Throws DataError naming the offending
// row (1-based, counting the header as row 1) on any malformed input.
inline std::vector<EventRecord> read_events(std::istream& in) {
  std::vector<std::string> fields;
  if (!csv::read_record(in, fields)) throw DataError("event csv: empty input");
  if (fields != kEventHeader)
    throw DataError("event csv: bad header, expected "
                    "event_id,date,country,doubt,tactics,weapons,targets");

  std::vector<EventRecord> events;
  std::size_t row = 1;
  while (csv::read_record(in, fields)) {
    ++row;
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank
    if (fields.size() != 7)
      throw DataError("event csv row " + std::to_string(row) + ": expected 7 fields, got " +
                      std::to_string(fields.size()));
    EventRecord ev;
    ev.event_id = trim(fields[0]);
    if (ev.event_id.empty())
      throw DataError("event csv row " + std::to_string(row) + ": empty event_id");
    auto d = Date::parse_iso(trim(fields[1]));
    if (!d)
      throw DataError("event csv row " + std::to_string(row) + ": bad date '" + fields[1] + "'");
    ev.date = *d;
    ev.country = trim(fields[2]);
    auto doubt = trim(fields[3]);
    if (doubt == "0") ev.doubt = false;
    else if (doubt == "1") ev.doubt = true;
    else
      throw DataError("event csv row " + std::to_string(row) + ": doubt must be 0 or 1, got '" +
                      fields[3] + "'");
    ev.tactics = detail::split_multi(fields[4]);
    ev.weapons = detail::split_multi(fields[5]);
    ev.targets = detail::split_multi(fields[6]);
    events.push_back(std::move(ev));
  }
  return events;
}

// Applies the config filters and returns the survivors sorted ascending by
// date, ties broken by event_id, so the order is total and reproducible.
inline std::vector<EventRecord> filter_events(const std::vector<EventRecord>& events,
                                              const IngestConfig& cfg) {
  if (cfg.end < cfg.start)
    throw ConfigError("ingest: end date precedes start date");
  std::vector<EventRecord> out;
  for (const auto& ev : events) {
    if (!cfg.country.empty() && ev.country != cfg.country) continue;
    if (ev.date < cfg.start || cfg.end < ev.date) continue;
    if (cfg.drop_doubt && ev.doubt) continue;
    out.push_back(ev);
  }
  std::sort(out.begin(), out.end(),
            [](const EventRecord& a, const EventRecord& b) {
              if (a.date != b.date) return a.date < b.date;
              return a.event_id < b.event_id;
            });
  return out;
}

inline void write_events(std::ostream& out, const std::vector<EventRecord>& events) {
  csv::write_record(out, kEventHeader);
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += '|';
      s += v[i];
    }
    return s;
  };
  for (const auto& ev : events) {
    csv::write_record(out, {ev.event_id, ev.date.to_iso(), ev.country,
                            ev.doubt ? "1" : "0", join(ev.tactics),
                            join(ev.weapons), join(ev.targets)});
  }
}

}  // namespace tmg
