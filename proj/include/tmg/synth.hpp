#pragma once

// Synthetic event fixtures. The repo ships no real attack data, so tests
// and demos run on generated streams:
//
//  - alternating: two target pairs trade places as the most central pair
//    on even/odd units. Within a unit the pairs' raw counts are identical,
//    so shallow per-unit counts carry no phase signal while day-level
//    co-occurrence (and hence centrality) does — a planted rule a width-1
//    learner can pick up. Persistence scores exactly 0 by construction.
//  - constant: one single-target event per unit; a lone event has no
//    co-occurrence, so every centrality stays 0.
//  - random: seeded Poisson stream with uniform category picks.

#include <string>
#include <vector>

#include "tmg/core.hpp"
#include "tmg/events.hpp"
#include "tmg/rng.hpp"

namespace tmg {

enum class SynthPattern { Alternating, Constant, Random };

inline const char* synth_pattern_name(SynthPattern p) {
  switch (p) {
    case SynthPattern::Alternating: return "alternating";
    case SynthPattern::Constant: return "constant";
    default: return "random";
  }
}

inline SynthPattern parse_synth_pattern(const std::string& s) {
  for (SynthPattern p : {SynthPattern::Alternating, SynthPattern::Constant,
                         SynthPattern::Random})
    if (s == synth_pattern_name(p)) return p;
  throw ConfigError("unknown synthetic pattern '" + s + "'");
}

struct SynthSpec {
  SynthPattern pattern = SynthPattern::Alternating;
  Date start = Date(2010, 1, 1);
  long units = 600;
  int unit_days = 2;
  std::string country = "Testland";
  std::uint64_t seed = 0;
  double rate = 3.0;  // random pattern: mean events per day
  std::vector<std::string> tactics = {"Bombing/Explosion"};
  std::vector<std::string> weapons = {"Explosives"};
  std::vector<std::string> targets = {"Private Citizens & Property", "Police",
                                      "Military", "Government (General)",
                                      "Business"};

  Date window_end() const {
    return start.plus_days(units * unit_days - 1);
  }
};

namespace detail {

inline int poisson(Rng& rng, double mean) {
  // Knuth's method; fine for the small rates used here.
  const double limit = std::exp(-mean);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.uniform();
  } while (p > limit);
  return k - 1;
}

}  // namespace detail

inline std::vector<EventRecord> generate_synthetic_events(const SynthSpec& spec) {
  if (spec.units < 1) throw ConfigError("synth: units must be >= 1");
  if (spec.tactics.empty() || spec.weapons.empty() || spec.targets.empty())
    throw ConfigError("synth: vocabularies must be non-empty");
  if (spec.pattern == SynthPattern::Alternating && spec.targets.size() < 5)
    throw ConfigError("synth: alternating pattern needs >= 5 targets");
  if (spec.pattern == SynthPattern::Alternating && spec.unit_days < 2)
    throw ConfigError("synth: alternating pattern needs >= 2 days per unit");

  std::vector<EventRecord> events;
  Rng rng(spec.seed);
  long next_id = 1;
  auto push = [&](const Date& date, std::vector<std::string> tactics,
                  std::vector<std::string> weapons,
                  std::vector<std::string> targets) {
    EventRecord ev;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "S%07ld", next_id++);
    ev.event_id = buf;
    ev.date = date;
    ev.country = spec.country;
    ev.doubt = false;
    ev.tactics = std::move(tactics);
    ev.weapons = std::move(weapons);
    ev.targets = std::move(targets);
    events.push_back(std::move(ev));
  };

  switch (spec.pattern) {
    case SynthPattern::Alternating: {
      const auto& T = spec.targets;
      const std::vector<std::string> pair_a = {T[0], T[1]};
      const std::vector<std::string> pair_b = {T[2], T[3]};
      const std::vector<std::string> filler = {T[4]};
      for (long u = 0; u < spec.units; ++u) {
        const Date d0 = spec.start.plus_days(u * spec.unit_days);
        const Date d1 = d0.plus_days(1);
        const auto& hot = (u % 2 == 0) ? pair_a : pair_b;   // dominant pair
        const auto& cold = (u % 2 == 0) ? pair_b : pair_a;
        for (int i = 0; i < 4; ++i)
          push(d0, {spec.tactics[0]}, {spec.weapons[0]}, hot);
        for (int i = 0; i < 2; ++i)
          push(d0, {spec.tactics[0]}, {spec.weapons[0]}, cold);
        for (int i = 0; i < 2; ++i)
          push(d1, {spec.tactics[0]}, {spec.weapons[0]}, cold);
        push(d1, {spec.tactics[0]}, {spec.weapons[0]}, filler);
      }
      break;
    }
    case SynthPattern::Constant:
      for (long u = 0; u < spec.units; ++u)
        push(spec.start.plus_days(u * spec.unit_days), {spec.tactics[0]},
             {spec.weapons[0]}, {spec.targets[0]});
      break;
    case SynthPattern::Random: {
      const long days = spec.units * spec.unit_days;
      for (long d = 0; d < days; ++d) {
        const Date date = spec.start.plus_days(d);
        const int n = spec.rate > 0.0 ? detail::poisson(rng, spec.rate) : 0;
        for (int e = 0; e < n; ++e) {
          std::vector<std::string> targets = {
              spec.targets[rng.below(spec.targets.size())]};
          if (spec.targets.size() > 1 && rng.uniform() < 0.5) {
            std::string second;
            do {
              second = spec.targets[rng.below(spec.targets.size())];
            } while (second == targets[0]);
            targets.push_back(second);
          }
          push(date, {spec.tactics[rng.below(spec.tactics.size())]},
               {spec.weapons[rng.below(spec.weapons.size())]},
               std::move(targets));
        }
      }
      break;
    }
  }
  return events;
}

}  // namespace tmg
