#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tmg/features.hpp"
#include "tmg/rng.hpp"

using namespace tmg;

namespace {

EventRecord ev(const char* id, Date d, std::vector<std::string> tactics,
               std::vector<std::string> weapons,
               std::vector<std::string> targets) {
  EventRecord e;
  e.event_id = id;
  e.date = d;
  e.country = "X";
  e.tactics = std::move(tactics);
  e.weapons = std::move(weapons);
  e.targets = std::move(targets);
  return e;
}

// Direct pairwise co-occurrence sum, no Gram matrix: the centrality of
// feature i is the sum over days of its count times every other feature's
// count that day.
std::vector<long> brute_force_psi(const std::vector<long>& d, std::size_t rows,
                                  std::size_t cols) {
  std::vector<long> psi(cols, 0);
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      if (j == i) continue;
      for (std::size_t r = 0; r < rows; ++r)
        psi[i] += d[r * cols + i] * d[r * cols + j];
    }
  return psi;
}

}  // namespace

TEST_CASE("meta-graph centrality matches the brute-force oracle on 1000 random matrices") {
  Rng rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t cols = 1 + rng.below(12);
    std::vector<long> di(2 * cols);
    std::vector<double> dd(2 * cols);
    for (std::size_t k = 0; k < di.size(); ++k) {
      di[k] = static_cast<long>(rng.below(10));
      dd[k] = static_cast<double>(di[k]);
    }
    auto expected = brute_force_psi(di, 2, cols);
    auto psi = degree_centrality(meta_graph(dd, 2, cols));
    REQUIRE(psi.size() == cols);
    long mx = 0;
    for (std::size_t i = 0; i < cols; ++i) {
      CHECK(psi[i] == static_cast<double>(expected[i]));  // integer-exact
      mx = std::max(mx, expected[i]);
    }
    auto norm = normalize_centrality(psi);
    for (std::size_t i = 0; i < cols; ++i) {
      double want = mx > 0 ? static_cast<double>(expected[i]) /
                                 static_cast<double>(mx)
                           : 0.0;
      CHECK(std::abs(norm[i] - want) <= 1e-12);
    }
  }
}

TEST_CASE("worked three-feature slice") {
  std::vector<double> d = {5, 1, 0, 1, 0, 2};
  MetaGraph g = meta_graph(d, 2, 3);
  CHECK(g.at(0, 0) == 26);
  CHECK(g.at(0, 1) == 5);
  CHECK(g.at(0, 2) == 2);
  CHECK(g.at(1, 0) == 5);
  CHECK(g.at(1, 1) == 1);
  CHECK(g.at(1, 2) == 0);
  CHECK(g.at(2, 0) == 2);
  CHECK(g.at(2, 1) == 0);
  CHECK(g.at(2, 2) == 4);

  auto psi = degree_centrality(g);
  CHECK(psi == std::vector<double>{7, 5, 2});
  auto norm = normalize_centrality(psi);
  CHECK(norm[0] == 1.0);
  CHECK(norm[1] == 5.0 / 7.0);
  CHECK(norm[2] == 2.0 / 7.0);
}

TEST_CASE("gram matrix is symmetric; size mismatches are rejected") {
  Rng rng(7);
  std::vector<double> d(2 * 6);
  for (auto& v : d) v = static_cast<double>(rng.below(9));
  MetaGraph g = meta_graph(d, 2, 6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(g.at(i, j) == g.at(j, i));

  CHECK_THROWS_AS(meta_graph(std::vector<double>(5), 2, 3), ConfigError);
}

TEST_CASE("normalization: zero vector stays zero, max maps to one") {
  CHECK(normalize_centrality({0, 0, 0}) == std::vector<double>{0, 0, 0});
  auto n = normalize_centrality({2, 8, 4});
  CHECK(n == std::vector<double>{0.25, 1.0, 0.5});
}

TEST_CASE("unit indexing covers the window with a zero-padded tail") {
  auto ix = detail::make_indexer(Date(2001, 1, 1), Date(2018, 12, 31), 2);
  CHECK(ix.units == 3287);  // 6574 days
  CHECK(ix.unit_of(Date(2001, 1, 1)) == 0);
  CHECK(ix.unit_of(Date(2001, 1, 2)) == 0);
  CHECK(ix.unit_of(Date(2001, 1, 3)) == 1);
  CHECK(ix.day_in_unit(Date(2001, 1, 2)) == 1);
  CHECK(ix.unit_of(Date(2000, 12, 31)) == -1);
  CHECK(ix.unit_of(Date(2019, 1, 1)) == -1);

  // five-day window at two days per unit: three units, last one half empty
  auto odd = detail::make_indexer(Date(2020, 1, 1), Date(2020, 1, 5), 2);
  CHECK(odd.units == 3);
  CHECK(odd.unit_of(Date(2020, 1, 5)) == 2);

  CHECK_THROWS_AS(detail::make_indexer(Date(2020, 1, 2), Date(2020, 1, 1), 2),
                  ConfigError);
}

TEST_CASE("catalog keeps first-appearance order and filters by presence") {
  std::vector<EventRecord> events;
  // "B" shows up in 10 units, "A" in 3: only B survives min_presence 10.
  for (int u = 0; u < 10; ++u)
    events.push_back(ev(("b" + std::to_string(u)).c_str(),
                        Date(2020, 1, 1).plus_days(2 * u), {"T"}, {"W"},
                        {"B"}));
  for (int u = 0; u < 3; ++u)
    events.push_back(ev(("a" + std::to_string(u)).c_str(),
                        Date(2020, 1, 1).plus_days(2 * u), {"T"}, {"W"},
                        {"A", "B"}));

  CatalogConfig cfg;
  cfg.start = Date(2020, 1, 1);
  cfg.end = Date(2020, 2, 28);
  cfg.min_presence = 10;
  FeatureCatalog cat = build_catalog(events, cfg);
  CHECK(cat.dim(Dim::Targets) == std::vector<std::string>{"B"});

  cfg.min_presence = 3;
  cat = build_catalog(events, cfg);
  // B appeared before A in the stream, so it comes first
  CHECK(cat.dim(Dim::Targets) == std::vector<std::string>{"B", "A"});
}

TEST_CASE("duplicate display names get occurrence suffixes before filtering") {
  std::vector<EventRecord> events;
  // "Unknown" appears in all three dimensions; weapons' copy is too rare to
  // survive, but the suffix assignment happens on the observed vocabulary,
  // so the targets' copy keeps its .2.
  for (int u = 0; u < 12; ++u) {
    bool rare = u >= 2;
    events.push_back(ev(("e" + std::to_string(u)).c_str(),
                        Date(2020, 1, 1).plus_days(2 * u), {"Unknown"},
                        rare ? std::vector<std::string>{"W"}
                             : std::vector<std::string>{"Unknown", "W"},
                        {"Unknown", "P"}));
  }
  CatalogConfig cfg;
  cfg.start = Date(2020, 1, 1);
  cfg.end = Date(2020, 2, 28);
  cfg.min_presence = 10;
  FeatureCatalog cat = build_catalog(events, cfg);
  CHECK(cat.dim(Dim::Tactics) == std::vector<std::string>{"Unknown"});
  CHECK(cat.dim(Dim::Weapons) == std::vector<std::string>{"W"});
  CHECK(cat.dim(Dim::Targets) == std::vector<std::string>{"Unknown.2", "P"});

  // with the filter relaxed, the weapons copy appears as Unknown.1
  cfg.min_presence = 2;
  cat = build_catalog(events, cfg);
  CHECK(cat.dim(Dim::Weapons) ==
        std::vector<std::string>{"Unknown.1", "W"});
}

TEST_CASE("count tensor tallies per-day feature mentions and attacks") {
  std::vector<EventRecord> events = {
      ev("e1", Date(2020, 1, 1), {"T"}, {"W"}, {"P", "Q"}),
      ev("e2", Date(2020, 1, 1), {"T"}, {"W"}, {"P"}),
      ev("e3", Date(2020, 1, 2), {"T"}, {"W"}, {"P", "R"}),
      ev("e4", Date(2020, 1, 2), {"T"}, {"W"}, {"R"}),
  };
  CatalogConfig cfg;
  cfg.start = Date(2020, 1, 1);
  cfg.end = Date(2020, 1, 2);
  cfg.min_presence = 1;
  FeatureCatalog cat = build_catalog(events, cfg);
  REQUIRE(cat.dim(Dim::Targets) == std::vector<std::string>{"P", "Q", "R"});
  CountTensor t = build_count_tensor(events, cat, cfg);
  REQUIRE(t.units == 1);
  std::size_t off = t.dim_off[2];
  CHECK(t.at(0, 0, off + 0) == 2);  // P on day one
  CHECK(t.at(0, 0, off + 1) == 1);  // Q on day one
  CHECK(t.at(0, 0, off + 2) == 0);
  CHECK(t.at(0, 1, off + 0) == 1);  // P on day two
  CHECK(t.at(0, 1, off + 2) == 2);  // R on day two
  CHECK(t.attacks == std::vector<int>{4});

  // an event outside the window is a hard error
  auto outside = events;
  outside.push_back(ev("e5", Date(2020, 1, 7), {"T"}, {"W"}, {"P"}));
  CHECK_THROWS_AS(build_count_tensor(outside, cat, cfg), DataError);
}

TEST_CASE("series: meta centralities vs shallow counts on the same unit") {
  // target day-counts form D = [[2,1,0],[1,0,2]]: psi = [4,2,2]
  std::vector<EventRecord> events = {
      ev("e1", Date(2020, 1, 1), {"T"}, {"W"}, {"P", "Q"}),
      ev("e2", Date(2020, 1, 1), {"T"}, {"W"}, {"P"}),
      ev("e3", Date(2020, 1, 2), {"T"}, {"W"}, {"P", "R"}),
      ev("e4", Date(2020, 1, 2), {"T"}, {"W"}, {"R"}),
  };
  CatalogConfig cfg;
  cfg.start = Date(2020, 1, 1);
  cfg.end = Date(2020, 1, 2);
  cfg.min_presence = 1;
  FeatureCatalog cat = build_catalog(events, cfg);
  CountTensor t = build_count_tensor(events, cat, cfg);

  CentralitySeries meta = build_series(t, cat, SeriesMode::Meta);
  std::size_t off = meta.targets_offset();
  CHECK(meta.at(0, off + 0) == 1.0);
  CHECK(meta.at(0, off + 1) == 0.5);
  CHECK(meta.at(0, off + 2) == 0.5);
  // a one-feature dimension has no co-occurrence partner: centrality zero
  CHECK(meta.at(0, 0) == 0.0);

  CentralitySeries shallow = build_series(t, cat, SeriesMode::Shallow);
  CHECK(shallow.at(0, off + 0) == 1.0);               // 3 of max 3
  CHECK(shallow.at(0, off + 1) == canonical6(1.0 / 3.0));
  CHECK(shallow.at(0, off + 2) == canonical6(2.0 / 3.0));
  CHECK(shallow.at(0, 0) == 1.0);  // the lone tactic still has counts

  // a unit with no attacks is all zeros in both modes
  CatalogConfig wide = cfg;
  wide.end = Date(2020, 1, 4);
  CountTensor t2 = build_count_tensor(events, cat, wide);
  CentralitySeries m2 = build_series(t2, cat, SeriesMode::Meta);
  REQUIRE(m2.units == 2);
  for (std::size_t f = 0; f < m2.features(); ++f) CHECK(m2.at(1, f) == 0.0);
  CHECK(m2.attacks[1] == 0);
}

TEST_CASE("series csv round trip is exact; mismatched catalog is rejected") {
  std::vector<EventRecord> events;
  Rng rng(3);
  for (int u = 0; u < 40; ++u) {
    Date d = Date(2020, 1, 1).plus_days(2 * u + static_cast<long>(rng.below(2)));
    std::vector<std::string> targets = {"P"};
    if (rng.below(2)) targets.push_back("Q");
    if (rng.below(3) == 0) targets.push_back("R");
    events.push_back(
        ev(("e" + std::to_string(u)).c_str(), d, {"T"}, {"W"}, targets));
  }
  CatalogConfig cfg;
  cfg.start = Date(2020, 1, 1);
  cfg.end = Date(2020, 3, 20);
  cfg.min_presence = 2;
  FeatureCatalog cat = build_catalog(events, cfg);
  CountTensor t = build_count_tensor(events, cat, cfg);
  CentralitySeries s = build_series(t, cat, SeriesMode::Meta);

  std::ostringstream out;
  write_series(out, s);
  std::istringstream in(out.str());
  CentralitySeries back = read_series(in, cat, SeriesMode::Meta);
  REQUIRE(back.units == s.units);
  CHECK(back.start == s.start);
  CHECK(back.values == s.values);  // canonical 6-decimal values: bit-exact
  CHECK(back.attacks == s.attacks);

  FeatureCatalog other = cat;
  other.names[2].push_back("Extra");
  std::istringstream in2(out.str());
  CHECK_THROWS_AS(read_series(in2, other, SeriesMode::Meta), DataError);
}

TEST_CASE("catalog json round trip preserves names and hash") {
  FeatureCatalog cat;
  cat.names[0] = {"Bombing/Explosion", "Armed Assault"};
  cat.names[1] = {"Explosives"};
  cat.names[2] = {"Police", "Unknown.1"};
  cat.raw_names = cat.names;

  auto j = cat.to_json();
  FeatureCatalog back = FeatureCatalog::from_json(j);
  CHECK(back.names == cat.names);
  CHECK(back.hash() == cat.hash());
  CHECK(back.total() == 5);
  CHECK(back.dim_offset(Dim::Targets) == 3);

  FeatureCatalog changed = back;
  changed.names[2][0] = "Military";
  CHECK(changed.hash() != cat.hash());

  // order matters to the hash (same multiset, different sequence)
  FeatureCatalog swapped = back;
  std::swap(swapped.names[0][0], swapped.names[0][1]);
  CHECK(swapped.hash() != cat.hash());
}

TEST_CASE("feature correlation flags constant columns and is symmetric") {
  CentralitySeries s;
  s.start = Date(2020, 1, 1);
  s.feature_names = {"a", "b", "c"};
  s.dim_off = {0, 1, 2};
  s.dim_len = {1, 1, 1};
  s.units = 4;
  // a rises, b falls in lockstep, c is constant
  s.values = {0.1, 0.9, 0.5, 0.2, 0.8, 0.5, 0.3, 0.7, 0.5, 0.4, 0.6, 0.5};
  s.attacks = {1, 1, 1, 1};

  FeatureCorrelation fc = feature_correlation(s);
  auto at = [&](int i, int j) { return fc.matrix[i * 3 + j]; };
  CHECK(at(0, 0) == 1.0);
  CHECK(at(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(at(1, 0) == at(0, 1));
  CHECK(at(0, 2) == 0.0);  // undefined against a constant column
  CHECK(fc.column_defined == std::vector<bool>{true, true, false});

  std::ostringstream out;
  write_feature_correlation(out, fc, s.feature_names);
  CHECK(out.str().find("a,b,c") != std::string::npos);
}
