#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "tmg/dataset.hpp"

using namespace tmg;

namespace {

// A series whose value at (unit, feature) encodes both indices, so window
// tests can verify exactly which cells were copied. Two fake dimensions of
// one feature each plus a target block.
CentralitySeries coded_series(long units, std::size_t targets,
                              double salt = 0.0) {
  CentralitySeries s;
  s.start = Date(2020, 1, 1);
  s.unit_days = 2;
  s.feature_names = {"t0", "w0"};
  for (std::size_t f = 0; f < targets; ++f)
    s.feature_names.push_back("y" + std::to_string(f));
  s.dim_off = {0, 1, 2};
  s.dim_len = {1, 1, targets};
  s.units = units;
  s.attacks.assign(units, 1);
  const std::size_t F = s.feature_names.size();
  s.values.resize(units * F);
  for (long u = 0; u < units; ++u)
    for (std::size_t f = 0; f < F; ++f)
      s.values[u * F + f] = static_cast<double>(u) + 0.01 * f + salt;
  return s;
}

}  // namespace

TEST_CASE("split boundaries floor the cumulative fractions") {
  SplitRanges r = split_series(3287);
  CHECK(r.train_end == 2300);
  CHECK(r.val_end == 2958);
  CHECK(r.length(Split::Train) == 2300);
  CHECK(r.length(Split::Val) == 658);
  CHECK(r.length(Split::Test) == 329);

  r = split_series(10);
  CHECK(r.length(Split::Train) == 7);
  CHECK(r.length(Split::Val) == 2);
  CHECK(r.length(Split::Test) == 1);

  r = split_series(120);
  CHECK(r.length(Split::Train) == 84);
  CHECK(r.length(Split::Val) == 24);
  CHECK(r.length(Split::Test) == 12);

  // segments always tile [0, U)
  for (long u : {10L, 11L, 37L, 100L, 999L, 3287L}) {
    r = split_series(u);
    CHECK(r.length(Split::Train) + r.length(Split::Val) +
              r.length(Split::Test) ==
          u);
    CHECK(r.length(Split::Train) >= r.length(Split::Val));
    CHECK(r.length(Split::Val) >= r.length(Split::Test));
  }
}

TEST_CASE("split validation") {
  CHECK_THROWS_AS(split_series(9), ConfigError);
  CHECK_NOTHROW(split_series(10));

  SplitSpec bad;
  bad.train_frac = 0.8;  // sums to 1.1
  CHECK_THROWS_AS(split_series(100, bad), ConfigError);
  bad.train_frac = 0.0;
  bad.val_frac = 0.9;
  CHECK_THROWS_AS(split_series(100, bad), ConfigError);

  SplitSpec other{0.5, 0.25, 0.25};
  SplitRanges r = split_series(100, other);
  CHECK(r.train_end == 50);
  CHECK(r.val_end == 75);
}

TEST_CASE("windows reconstruct the exact source cells") {
  const long U = 40;
  CentralitySeries s = coded_series(U, 3);
  SplitRanges r = split_series(U);  // 28 / 8 / 4

  for (int width : {1, 5}) {
    for (Split sp : {Split::Train, Split::Val, Split::Test}) {
      WindowedDataset ds = make_windows(s, s, width, r, sp);
      const long L = r.length(sp);
      if (L <= width) {
        CHECK(ds.count == 0);
        CHECK(!ds.warning.empty());
        continue;
      }
      CHECK(ds.count == L - width);
      CHECK(ds.features == s.features());
      CHECK(ds.targets == 3);
      for (long i = 0; i < ds.count; ++i) {
        const long first_unit = r.begin(sp) + i;
        CHECK(ds.label_unit[i] == first_unit + width);
        // labels never come from inside another split
        CHECK(ds.label_unit[i] < r.end(sp));
        CHECK(ds.label_unit[i] >= r.begin(sp) + width);
        const double* x = ds.input(i);
        for (int t = 0; t < width; ++t)
          for (std::size_t f = 0; f < ds.features; ++f)
            CHECK(x[t * ds.features + f] ==
                  static_cast<double>(first_unit + t) + 0.01 * f);
        const double* y = ds.label(i);
        for (std::size_t f = 0; f < 3; ++f)
          CHECK(y[f] == static_cast<double>(ds.label_unit[i]) +
                            0.01 * (2 + f));
      }
    }
  }
}

TEST_CASE("labels come from the label source, inputs from the input series") {
  const long U = 30;
  CentralitySeries inputs = coded_series(U, 2, 1000.0);  // shallow stand-in
  CentralitySeries labels = coded_series(U, 2);          // meta labels
  SplitRanges r = split_series(U);
  WindowedDataset ds = make_windows(inputs, labels, 5, r, Split::Train);
  REQUIRE(ds.count > 0);
  CHECK(ds.input(0)[0] >= 1000.0);
  CHECK(ds.label(0)[0] < 1000.0);

  CentralitySeries short_series = coded_series(U - 1, 2);
  CHECK_THROWS_AS(make_windows(inputs, short_series, 5, r, Split::Train),
                  ConfigError);
  CHECK_THROWS_AS(make_windows(inputs, labels, 0, r, Split::Train),
                  ConfigError);
}

TEST_CASE("a segment not longer than the width yields an empty dataset") {
  CentralitySeries s = coded_series(20, 2);
  SplitRanges r = split_series(20);  // 14 / 4 / 2
  WindowedDataset ds = make_windows(s, s, 5, r, Split::Val);
  CHECK(ds.count == 0);
  CHECK(ds.x.empty());
  CHECK(ds.warning ==
        "val segment of length 4 yields no windows at width 5");

  // boundary: length == width also yields nothing (the label would be the
  // first unit of the next split)
  ds = make_windows(s, s, 4, r, Split::Val);
  CHECK(ds.count == 0);
  ds = make_windows(s, s, 3, r, Split::Val);
  CHECK(ds.count == 1);
}

TEST_CASE("dataset dump carries split name, label index and all cells") {
  CentralitySeries s = coded_series(40, 2);
  SplitRanges r = split_series(40);
  WindowedDataset ds = make_windows(s, s, 2, r, Split::Test);
  REQUIRE(ds.count > 0);

  std::ostringstream out;
  write_dataset(out, ds);
  std::string text = out.str();
  CHECK(text.find("split,label_unit_index,") == 0);
  CHECK(text.find("x_w0_f0") != std::string::npos);
  CHECK(text.find("x_w1_f3") != std::string::npos);
  CHECK(text.find("y_f0") != std::string::npos);
  CHECK(text.find("\ntest,") != std::string::npos);

  // row count: header + count rows
  long rows = std::count(text.begin(), text.end(), '\n');
  CHECK(rows == ds.count + 1);
}
