#pragma once

// Feature catalog + temporal meta-graph pipeline.
//
// Each time unit (default two consecutive days) yields, per dimension
// (tactics, weapons, targets), a day-by-feature count matrix D. The unit's
// meta-graph is G = D^T D, i.e. features co-occur through shared days and
// edge weights are products of daily counts summed over the unit's days.
// Weighted degree centrality sums each row of G without the diagonal, and
// is max-normalized within its (unit, dimension) block. Concatenating the
// per-dimension centralities over all units gives the multivariate series
// the forecasting models consume. "Shallow" mode replaces centralities
// with per-unit raw counts (same normalization) for the ablation.

#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmg/core.hpp"
#include "tmg/csv.hpp"
#include "tmg/events.hpp"

namespace tmg {

enum class Dim : int { Tactics = 0, Weapons = 1, Targets = 2 };
inline constexpr std::array<const char*, 3> kDimNames = {"tactics", "weapons",
                                                         "targets"};
inline constexpr int kNumDims = 3;

// ---------------------------------------------------------------- catalog

// Ordered feature vocabulary. Display names carry ".1"/".2"-style suffixes
// when the same raw name shows up in more than one dimension; suffix
// numbering happens over every observed feature (dimension-major,
// first-appearance order) before any presence filtering, so a dropped
// duplicate still advances the counter of later ones.
struct FeatureCatalog {
  std::array<std::vector<std::string>, 3> names;      // display names
  std::array<std::vector<std::string>, 3> raw_names;  // pre-suffix names

  const std::vector<std::string>& dim(Dim d) const {
    return names[static_cast<int>(d)];
  }
  std::size_t dim_size(Dim d) const { return dim(d).size(); }
  std::size_t dim_offset(Dim d) const {
    std::size_t off = 0;
    for (int i = 0; i < static_cast<int>(d); ++i) off += names[i].size();
    return off;
  }
  std::size_t total() const {
    return names[0].size() + names[1].size() + names[2].size();
  }

  // Flat display-name list in dimension-major order.
  std::vector<std::string> flat_names() const {
    std::vector<std::string> out;
    out.reserve(total());
    for (const auto& dim_names : names)
      out.insert(out.end(), dim_names.begin(), dim_names.end());
    return out;
  }

  std::uint64_t hash() const {
    std::uint64_t h = fnv1a64("catalog");
    for (int d = 0; d < kNumDims; ++d) {
      h = fnv1a64(kDimNames[d], h);
      for (const auto& n : names[d]) {
        h = fnv1a64("\x1f", h);
        h = fnv1a64(n, h);
      }
    }
    return h;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    for (int d = 0; d < kNumDims; ++d) j[kDimNames[d]] = names[d];
    return j;
  }

  static FeatureCatalog from_json(const nlohmann::json& j) {
    FeatureCatalog cat;
    for (int d = 0; d < kNumDims; ++d) {
      if (!j.contains(kDimNames[d]) || !j[kDimNames[d]].is_array())
        throw DataError(std::string("catalog json: missing array '") +
                        kDimNames[d] + "'");
      for (const auto& v : j[kDimNames[d]]) {
        if (!v.is_string())
          throw DataError("catalog json: feature names must be strings");
        cat.names[d].push_back(v.get<std::string>());
      }
      cat.raw_names[d] = cat.names[d];  // raw names are not persisted
    }
    return cat;
  }
};

struct CatalogConfig {
  Date start;
  Date end;
  int unit_days = 2;
  int min_presence = 10;  // feature kept if active in >= this many units
};

namespace detail {

struct UnitIndexer {
  Date start;
  long units = 0;
  int unit_days = 2;

  // -1 when the date falls outside the covered full units.
  long unit_of(const Date& d) const {
    long off = d.day_number() - start.day_number();
    if (off < 0) return -1;
    long u = off / unit_days;
    return u < units ? u : -1;
  }
  int day_in_unit(const Date& d) const {
    return static_cast<int>((d.day_number() - start.day_number()) % unit_days);
  }
};

// Units cover the window in consecutive day blocks anchored at `start`; a
// partial trailing block still forms a unit (its missing days stay zero).
inline UnitIndexer make_indexer(const Date& start, const Date& end,
                                int unit_days) {
  if (unit_days < 1) throw ConfigError("unit_days must be >= 1");
  if (end < start) throw ConfigError("window end precedes start");
  UnitIndexer ix;
  ix.start = start;
  ix.unit_days = unit_days;
  long days = days_inclusive(start, end);
  ix.units = (days + unit_days - 1) / unit_days;
  return ix;
}

inline const std::vector<std::string>& event_dim(const EventRecord& ev,
                                                 int d) {
  switch (d) {
    case 0: return ev.tactics;
    case 1: return ev.weapons;
    default: return ev.targets;
  }
}

}  // namespace detail

// Scans events once to find every feature (first-appearance order inside
// each dimension), counts per-feature active units, then applies suffix
// dedup followed by the presence filter.
inline FeatureCatalog build_catalog(const std::vector<EventRecord>& events,
                                    const CatalogConfig& cfg) {
  auto ix = detail::make_indexer(cfg.start, cfg.end, cfg.unit_days);

  std::array<std::vector<std::string>, 3> observed;   // first-appearance
  std::array<std::map<std::string, std::vector<bool>>, 3> active;

  for (const auto& ev : events) {
    long u = ix.unit_of(ev.date);
    if (u < 0) continue;
    for (int d = 0; d < kNumDims; ++d) {
      for (const auto& name : detail::event_dim(ev, d)) {
        auto [it, inserted] = active[d].try_emplace(
            name, std::vector<bool>(static_cast<std::size_t>(ix.units)));
        if (inserted) observed[d].push_back(name);
        it->second[static_cast<std::size_t>(u)] = true;
      }
    }
  }

  // Suffix pass over all observed features, dimension-major.
  std::map<std::string, int> seen;
  std::array<std::vector<std::string>, 3> display;
  for (int d = 0; d < kNumDims; ++d) {
    display[d].reserve(observed[d].size());
    for (const auto& name : observed[d]) {
      int k = seen[name]++;
      display[d].push_back(k == 0 ? name : name + "." + std::to_string(k));
    }
  }

  FeatureCatalog cat;
  for (int d = 0; d < kNumDims; ++d) {
    for (std::size_t i = 0; i < observed[d].size(); ++i) {
      const auto& units_active = active[d][observed[d][i]];
      int presence = 0;
      for (bool b : units_active) presence += b ? 1 : 0;
      if (presence >= cfg.min_presence) {
        cat.names[d].push_back(display[d][i]);
        cat.raw_names[d].push_back(observed[d][i]);
      }
    }
  }
  return cat;
}

// ------------------------------------------------------------ count tensor

// Daily feature counts, unit-major: counts[(u * unit_days + day) * F + f].
struct CountTensor {
  Date start;
  int unit_days = 2;
  long units = 0;
  std::size_t features = 0;             // catalog.total()
  std::array<std::size_t, 3> dim_off{}; // flat offset per dimension
  std::array<std::size_t, 3> dim_len{};
  std::vector<int> counts;
  std::vector<int> attacks;             // events per unit

  int at(long u, int day, std::size_t f) const {
    return counts[(static_cast<std::size_t>(u) * unit_days + day) * features +
                  f];
  }
};

inline CountTensor build_count_tensor(const std::vector<EventRecord>& events,
                                      const FeatureCatalog& catalog,
                                      const CatalogConfig& cfg) {
  auto ix = detail::make_indexer(cfg.start, cfg.end, cfg.unit_days);

  CountTensor t;
  t.start = cfg.start;
  t.unit_days = cfg.unit_days;
  t.units = ix.units;
  t.features = catalog.total();
  for (int d = 0; d < kNumDims; ++d) {
    t.dim_off[d] = catalog.dim_offset(static_cast<Dim>(d));
    t.dim_len[d] = catalog.dim_size(static_cast<Dim>(d));
  }
  t.counts.assign(static_cast<std::size_t>(t.units) * cfg.unit_days *
                      t.features,
                  0);
  t.attacks.assign(static_cast<std::size_t>(t.units), 0);

  std::array<std::map<std::string, std::size_t>, 3> lookup;  // raw -> flat
  for (int d = 0; d < kNumDims; ++d)
    for (std::size_t i = 0; i < catalog.raw_names[d].size(); ++i)
      lookup[d][catalog.raw_names[d][i]] = t.dim_off[d] + i;

  for (const auto& ev : events) {
    long u = ix.unit_of(ev.date);
    if (u < 0)
      throw DataError("count tensor: event " + ev.event_id + " on " +
                      ev.date.to_iso() + " falls outside the window");
    t.attacks[static_cast<std::size_t>(u)] += 1;
    int day = ix.day_in_unit(ev.date);
    std::size_t base =
        (static_cast<std::size_t>(u) * cfg.unit_days + day) * t.features;
    for (int d = 0; d < kNumDims; ++d) {
      for (const auto& name : detail::event_dim(ev, d)) {
        auto it = lookup[d].find(name);
        if (it != lookup[d].end()) t.counts[base + it->second] += 1;
      }
    }
  }
  return t;
}

// --------------------------------------------------------------- meta-graph

struct MetaGraph {
  std::size_t n = 0;
  std::vector<double> g;  // n x n, symmetric
  double at(std::size_t i, std::size_t j) const { return g[i * n + j]; }
};

// G = D^T D for a rows-by-cols day/feature count matrix.
inline MetaGraph meta_graph(const double* d, std::size_t rows,
                            std::size_t cols) {
  MetaGraph m;
  m.n = cols;
  m.g.assign(cols * cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = d + r * cols;
    for (std::size_t i = 0; i < cols; ++i) {
      if (row[i] == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j)
        m.g[i * cols + j] += row[i] * row[j];
    }
  }
  return m;
}

inline MetaGraph meta_graph(const std::vector<double>& d, std::size_t rows,
                            std::size_t cols) {
  if (d.size() != rows * cols)
    throw ConfigError("meta_graph: matrix size mismatch");
  return meta_graph(d.data(), rows, cols);
}

// psi_i = sum_{j != i} G[i][j]; self-loops do not contribute.
inline std::vector<double> degree_centrality(const MetaGraph& g) {
  std::vector<double> psi(g.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < g.n; ++j)
      if (j != i) s += g.at(i, j);
    psi[i] = s;
  }
  return psi;
}

// Max-normalization within one (unit, dimension) block; an all-zero block
// stays all-zero.
inline std::vector<double> normalize_centrality(std::vector<double> psi) {
  double mx = 0.0;
  for (double v : psi) mx = std::max(mx, v);
  if (mx > 0.0)
    for (double& v : psi) v /= mx;
  return psi;
}

// ------------------------------------------------------------------ series

enum class SeriesMode { Meta, Shallow };

inline const char* series_mode_name(SeriesMode m) {
  return m == SeriesMode::Meta ? "meta" : "shallow";
}

inline SeriesMode parse_series_mode(const std::string& s) {
  if (s == "meta") return SeriesMode::Meta;
  if (s == "shallow") return SeriesMode::Shallow;
  throw ConfigError("unknown mode '" + s + "' (expected meta or shallow)");
}

// Multivariate series: one row per unit, one column per catalog feature,
// values already max-normalized per (unit, dimension) and rounded to the
// 6-decimal file precision so in-memory and round-tripped values agree.
struct CentralitySeries {
  Date start;
  int unit_days = 2;
  SeriesMode mode = SeriesMode::Meta;
  std::vector<std::string> feature_names;     // catalog order
  std::array<std::size_t, 3> dim_off{};
  std::array<std::size_t, 3> dim_len{};
  long units = 0;
  std::vector<double> values;                 // units x features
  std::vector<int> attacks;

  std::size_t features() const { return feature_names.size(); }
  double at(long u, std::size_t f) const {
    return values[static_cast<std::size_t>(u) * features() + f];
  }
  Date unit_start(long u) const { return start.plus_days(u * unit_days); }

  // Column range of the targets dimension (the label block).
  std::size_t targets_offset() const { return dim_off[2]; }
  std::size_t targets_count() const { return dim_len[2]; }
};

inline CentralitySeries build_series(const CountTensor& t,
                                     const FeatureCatalog& catalog,
                                     SeriesMode mode) {
  CentralitySeries s;
  s.start = t.start;
  s.unit_days = t.unit_days;
  s.mode = mode;
  s.feature_names = catalog.flat_names();
  s.dim_off = t.dim_off;
  s.dim_len = t.dim_len;
  s.units = t.units;
  s.attacks = t.attacks;
  s.values.assign(static_cast<std::size_t>(t.units) * t.features, 0.0);

  std::vector<double> block;
  for (long u = 0; u < t.units; ++u) {
    for (int d = 0; d < kNumDims; ++d) {
      std::size_t off = t.dim_off[d], len = t.dim_len[d];
      if (len == 0) continue;
      std::vector<double> vals;
      if (mode == SeriesMode::Meta) {
        block.assign(static_cast<std::size_t>(t.unit_days) * len, 0.0);
        for (int day = 0; day < t.unit_days; ++day)
          for (std::size_t f = 0; f < len; ++f)
            block[static_cast<std::size_t>(day) * len + f] =
                static_cast<double>(t.at(u, day, off + f));
        vals = normalize_centrality(
            degree_centrality(meta_graph(block, t.unit_days, len)));
      } else {
        vals.assign(len, 0.0);
        for (int day = 0; day < t.unit_days; ++day)
          for (std::size_t f = 0; f < len; ++f)
            vals[f] += static_cast<double>(t.at(u, day, off + f));
        vals = normalize_centrality(std::move(vals));
      }
      for (std::size_t f = 0; f < len; ++f)
        s.values[static_cast<std::size_t>(u) * t.features + off + f] =
            canonical6(vals[f]);
    }
  }
  return s;
}

// Series CSV: unit_start_date, one column per feature (6 decimals),
// attacks_per_unit.
inline void write_series(std::ostream& out, const CentralitySeries& s) {
  std::vector<std::string> header;
  header.reserve(s.features() + 2);
  header.push_back("unit_start_date");
  for (const auto& n : s.feature_names) header.push_back(n);
  header.push_back("attacks_per_unit");
  csv::write_record(out, header);

  std::vector<std::string> row;
  for (long u = 0; u < s.units; ++u) {
    row.clear();
    row.push_back(s.unit_start(u).to_iso());
    for (std::size_t f = 0; f < s.features(); ++f)
      row.push_back(format6(s.at(u, f)));
    row.push_back(std::to_string(s.attacks[static_cast<std::size_t>(u)]));
    csv::write_record(out, row);
  }
}

// Reads a series CSV back. Dimension boundaries cannot be recovered from
// the file alone, so the caller passes the catalog that produced it.
inline CentralitySeries read_series(std::istream& in,
                                    const FeatureCatalog& catalog,
                                    SeriesMode mode, int unit_days = 2) {
  std::vector<std::string> fields;
  if (!csv::read_record(in, fields)) throw DataError("series csv: empty input");
  auto expected = catalog.flat_names();
  if (fields.size() != expected.size() + 2 || fields.front() != "unit_start_date" ||
      fields.back() != "attacks_per_unit")
    throw DataError("series csv: header does not match catalog");
  for (std::size_t f = 0; f < expected.size(); ++f)
    if (fields[f + 1] != expected[f])
      throw DataError("series csv: column '" + fields[f + 1] +
                      "' does not match catalog feature '" + expected[f] + "'");

  CentralitySeries s;
  s.unit_days = unit_days;
  s.mode = mode;
  s.feature_names = expected;
  for (int d = 0; d < kNumDims; ++d) {
    s.dim_off[d] = catalog.dim_offset(static_cast<Dim>(d));
    s.dim_len[d] = catalog.dim_size(static_cast<Dim>(d));
  }
  std::size_t row_no = 1;
  while (csv::read_record(in, fields)) {
    ++row_no;
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != expected.size() + 2)
      throw DataError("series csv row " + std::to_string(row_no) +
                      ": wrong field count");
    auto d = Date::parse_iso(fields[0]);
    if (!d)
      throw DataError("series csv row " + std::to_string(row_no) +
                      ": bad date '" + fields[0] + "'");
    if (s.units == 0) s.start = *d;
    else if (!(*d == s.start.plus_days(s.units * unit_days)))
      throw DataError("series csv row " + std::to_string(row_no) +
                      ": units are not consecutive");
    for (std::size_t f = 0; f < expected.size(); ++f) {
      char* endp = nullptr;
      double v = std::strtod(fields[f + 1].c_str(), &endp);
      if (endp == fields[f + 1].c_str() || *endp != '\0')
        throw DataError("series csv row " + std::to_string(row_no) +
                        ": bad value '" + fields[f + 1] + "'");
      s.values.push_back(canonical6(v));
    }
    s.attacks.push_back(std::atoi(fields.back().c_str()));
    ++s.units;
  }
  if (s.units == 0) throw DataError("series csv: no data rows");
  return s;
}

// ------------------------------------------------------------- correlation

struct FeatureCorrelation {
  std::size_t features = 0;
  std::vector<double> matrix;        // F×F, row-major
  std::vector<bool> column_defined;  // false for constant columns

  double at(std::size_t i, std::size_t j) const {
    return matrix[i * features + j];
  }
};

// Pairwise Pearson correlation of the series' feature columns across
// units. Pairs involving a constant column are 0 by convention and the
// column is flagged.
inline FeatureCorrelation feature_correlation(const CentralitySeries& s) {
  if (s.units < 2)
    throw ConfigError("feature_correlation: need >= 2 units");
  const std::size_t F = s.features();
  const long U = s.units;
  FeatureCorrelation out;
  out.features = F;
  out.matrix.assign(F * F, 0.0);
  out.column_defined.assign(F, false);

  std::vector<double> mean(F, 0.0), sd(F, 0.0);
  for (std::size_t f = 0; f < F; ++f) {
    // Decide constancy on the raw values; deviations from a rounded mean can
    // be nonzero even when every entry of the column is identical.
    bool constant = true;
    for (long u = 1; u < U; ++u) constant = constant && s.at(u, f) == s.at(0, f);
    for (long u = 0; u < U; ++u) mean[f] += s.at(u, f);
    mean[f] /= static_cast<double>(U);
    double var = 0.0;
    for (long u = 0; u < U; ++u) {
      const double d = s.at(u, f) - mean[f];
      var += d * d;
    }
    sd[f] = std::sqrt(var);
    out.column_defined[f] = !constant && sd[f] > 0.0;
  }
  for (std::size_t i = 0; i < F; ++i) {
    if (!out.column_defined[i]) continue;
    out.matrix[i * F + i] = 1.0;
    for (std::size_t j = i + 1; j < F; ++j) {
      if (!out.column_defined[j]) continue;
      double cov = 0.0;
      for (long u = 0; u < U; ++u)
        cov += (s.at(u, i) - mean[i]) * (s.at(u, j) - mean[j]);
      const double r = std::clamp(cov / (sd[i] * sd[j]), -1.0, 1.0);
      out.matrix[i * F + j] = r;
      out.matrix[j * F + i] = r;
    }
  }
  return out;
}

inline void write_feature_correlation(std::ostream& out,
                                      const FeatureCorrelation& fc,
                                      const std::vector<std::string>& names) {
  std::vector<std::string> header = {"feature"};
  for (const auto& n : names) header.push_back(n);
  csv::write_record(out, header);
  std::vector<std::string> row;
  for (std::size_t i = 0; i < fc.features; ++i) {
    row.clear();
    row.push_back(names[i]);
    for (std::size_t j = 0; j < fc.features; ++j)
      row.push_back(format6(fc.at(i, j)));
    csv::write_record(out, row);
  }
}

}  // namespace tmg
