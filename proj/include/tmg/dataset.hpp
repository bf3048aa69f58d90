#pragma once

// Chronological splitting and sliding-window example construction.
// Inputs come from a series in either mode; labels always come from the
// meta-graph series' target columns (one unit ahead).

#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "tmg/core.hpp"
#include "tmg/csv.hpp"
#include "tmg/features.hpp"

namespace tmg {

enum class Split : int { Train = 0, Val = 1, Test = 2 };
inline constexpr std::array<const char*, 3> kSplitNames = {"train", "val",
                                                           "test"};

struct SplitSpec {
  double train_frac = 0.70;
  double val_frac = 0.20;
  double test_frac = 0.10;
};

// Contiguous chronological unit ranges [begin, end) per split.
struct SplitRanges {
  long train_end = 0;  // train = [0, train_end)
  long val_end = 0;    // val   = [train_end, val_end)
  long units = 0;      // test  = [val_end, units)

  long begin(Split s) const {
    switch (s) {
      case Split::Train: return 0;
      case Split::Val: return train_end;
      default: return val_end;
    }
  }
  long end(Split s) const {
    switch (s) {
      case Split::Train: return train_end;
      case Split::Val: return val_end;
      default: return units;
    }
  }
  long length(Split s) const { return end(s) - begin(s); }
};

// Boundaries by flooring the cumulative fractions: train = [0, floor(0.7U)),
// val = [floor(0.7U), floor(0.9U)), test = the remainder.
inline SplitRanges split_series(long units, const SplitSpec& spec = {}) {
  if (spec.train_frac <= 0 || spec.val_frac <= 0 || spec.test_frac <= 0)
    throw ConfigError("split fractions must be positive");
  double sum = spec.train_frac + spec.val_frac + spec.test_frac;
  if (sum < 0.999999 || sum > 1.000001)
    throw ConfigError("split fractions must sum to 1");
  if (units < 10)
    throw ConfigError("series too short to split: " + std::to_string(units) +
                      " units (need >= 10)");
  SplitRanges r;
  r.units = units;
  // Nudge before flooring so mathematically-integral products (120 * 0.9)
  // are not truncated by representation error in the fractions.
  auto cut = [units](double frac) {
    return static_cast<long>(std::floor(static_cast<double>(units) * frac + 1e-9));
  };
  r.train_end = cut(spec.train_frac);
  r.val_end = cut(spec.train_frac + spec.val_frac);
  return r;
}

inline SplitRanges split_series(const CentralitySeries& s,
                                const SplitSpec& spec = {}) {
  return split_series(s.units, spec);
}

// One split's worth of supervised examples. Inputs are stored row-major as
// (count, width, features); labels as (count, targets). label_unit is the
// global unit index the label row came from.
struct WindowedDataset {
  Split split = Split::Train;
  int width = 1;
  std::size_t features = 0;
  std::size_t targets = 0;
  long count = 0;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<long> label_unit;
  std::string warning;  // set when the segment was too short to window

  const double* input(long i) const {
    return x.data() + static_cast<std::size_t>(i) * width * features;
  }
  const double* label(long i) const {
    return y.data() + static_cast<std::size_t>(i) * targets;
  }
};

// Sliding windows of `width` units with stride 1 inside one split segment;
// the label is the next unit's target sub-row of `label_source`. A segment
// of length <= width yields an empty dataset carrying a warning.
inline WindowedDataset make_windows(const CentralitySeries& inputs,
                                    const CentralitySeries& label_source,
                                    int width, const SplitRanges& ranges,
                                    Split split) {
  if (width < 1) throw ConfigError("window width must be >= 1");
  if (inputs.units != label_source.units)
    throw ConfigError("make_windows: input and label series lengths differ");
  if (label_source.targets_count() == 0)
    throw ConfigError("make_windows: label series has no target features");

  WindowedDataset ds;
  ds.split = split;
  ds.width = width;
  ds.features = inputs.features();
  ds.targets = label_source.targets_count();

  const long b = ranges.begin(split), e = ranges.end(split);
  const long L = e - b;
  if (L <= width) {
    ds.warning = std::string(kSplitNames[static_cast<int>(split)]) +
                 " segment of length " + std::to_string(L) +
                 " yields no windows at width " + std::to_string(width);
    return ds;
  }
  ds.count = L - width;
  ds.x.reserve(static_cast<std::size_t>(ds.count) * width * ds.features);
  ds.y.reserve(static_cast<std::size_t>(ds.count) * ds.targets);
  ds.label_unit.reserve(static_cast<std::size_t>(ds.count));

  const std::size_t toff = label_source.targets_offset();
  for (long i = b; i + width < e; ++i) {
    for (long t = 0; t < width; ++t)
      for (std::size_t f = 0; f < ds.features; ++f)
        ds.x.push_back(inputs.at(i + t, f));
    const long lu = i + width;
    for (std::size_t f = 0; f < ds.targets; ++f)
      ds.y.push_back(label_source.at(lu, toff + f));
    ds.label_unit.push_back(lu);
  }
  return ds;
}

// Dump: one example per row, flattened input then label; column names
// encode the window position/feature index so w and F are recoverable.
inline void write_dataset(std::ostream& out, const WindowedDataset& ds) {
  std::vector<std::string> header;
  header.push_back("split");
  header.push_back("label_unit_index");
  for (int t = 0; t < ds.width; ++t)
    for (std::size_t f = 0; f < ds.features; ++f)
      header.push_back("x_w" + std::to_string(t) + "_f" + std::to_string(f));
  for (std::size_t f = 0; f < ds.targets; ++f)
    header.push_back("y_f" + std::to_string(f));
  csv::write_record(out, header);

  std::vector<std::string> row;
  for (long i = 0; i < ds.count; ++i) {
    row.clear();
    row.push_back(kSplitNames[static_cast<int>(ds.split)]);
    row.push_back(std::to_string(ds.label_unit[static_cast<std::size_t>(i)]));
    const double* xin = ds.input(i);
    for (std::size_t k = 0; k < static_cast<std::size_t>(ds.width) * ds.features; ++k)
      row.push_back(format6(xin[k]));
    const double* yl = ds.label(i);
    for (std::size_t k = 0; k < ds.targets; ++k) row.push_back(format6(yl[k]));
    csv::write_record(out, row);
  }
}

}  // namespace tmg
