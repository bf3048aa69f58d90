#pragma once

// Evaluation metrics: MSE on clamped predictions, element-wise accuracy
// (top-2 sets intersect), set-wise accuracy (|intersection| / |empirical|),
// the no-attack threshold rule, per-unit prediction correlations and
// per-target top-2 frequency tables.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmg/core.hpp"
#include "tmg/csv.hpp"
#include "tmg/tensor.hpp"

namespace tmg {

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

// Members are catalog target indices, ascending; empty means "no attack
// expected/predicted".
struct TopSet {
  long unit = 0;
  std::vector<int> members;

  bool empty() const { return members.empty(); }
};

namespace detail {

// Index of the largest value (ties -> lowest index), restricted to
// entries admitted by `ok`; -1 when none qualify.
template <typename Ok>
int arg_best(const double* row, std::size_t n, Ok ok, int skip = -1) {
  int best = -1;
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(i) == skip || !ok(row[i])) continue;
    if (best < 0 || row[i] > row[best]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace detail

// The (up to) two most central targets with strictly positive value; ties
// broken by catalog order. All-zero rows give the empty set.
inline TopSet empirical_top_set(const double* row, std::size_t n, long unit = 0) {
  TopSet s;
  s.unit = unit;
  int first = detail::arg_best(row, n, [](double v) { return v > 0.0; });
  if (first < 0) return s;
  s.members.push_back(first);
  int second =
      detail::arg_best(row, n, [](double v) { return v > 0.0; }, first);
  if (second >= 0) s.members.push_back(second);
  std::sort(s.members.begin(), s.members.end());
  return s;
}

inline TopSet empirical_top_set(const std::vector<double>& row, long unit = 0) {
  return empirical_top_set(row.data(), row.size(), unit);
}

// Empty when every clamped value is below xi; otherwise exactly the two
// largest values' targets (catalog order on ties), even if the runner-up
// is below xi.
inline TopSet predicted_top_set(const double* row, std::size_t n, double xi,
                                long unit = 0) {
  TopSet s;
  s.unit = unit;
  std::vector<double> c(n);  // clamp first: ranking happens on [0,1] values
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = clamp01(row[i]);
    if (c[i] >= xi) any = true;
  }
  if (!any) return s;
  int first = detail::arg_best(c.data(), n, [](double) { return true; });
  s.members.push_back(first);
  int second =
      detail::arg_best(c.data(), n, [](double) { return true; }, first);
  if (second >= 0) s.members.push_back(second);
  std::sort(s.members.begin(), s.members.end());
  return s;
}

inline TopSet predicted_top_set(const std::vector<double>& row, double xi,
                                long unit = 0) {
  return predicted_top_set(row.data(), row.size(), xi, unit);
}

// 1 when the sets share a member; no-attack units score 1 only for an
// empty prediction.
inline double element_wise(const TopSet& s, const TopSet& shat) {
  if (s.empty()) return shat.empty() ? 1.0 : 0.0;
  for (int m : shat.members)
    if (std::find(s.members.begin(), s.members.end(), m) != s.members.end())
      return 1.0;
  return 0.0;
}

// |intersection| / |S|, with the same no-attack rule.
inline double set_wise(const TopSet& s, const TopSet& shat) {
  if (s.empty()) return shat.empty() ? 1.0 : 0.0;
  std::size_t inter = 0;
  for (int m : shat.members)
    if (std::find(s.members.begin(), s.members.end(), m) != s.members.end())
      ++inter;
  return static_cast<double>(inter) / static_cast<double>(s.members.size());
}

inline double aggregate(const std::vector<double>& per_unit) {
  if (per_unit.empty())
    throw ConfigError("aggregate: no per-unit values (empty test span)");
  double s = 0.0;
  for (double v : per_unit) s += v;
  return s / static_cast<double>(per_unit.size());
}

// Mean of squared element differences with predictions clamped to [0,1].
inline double mse(const Tensor& pred, const Tensor& truth) {
  require_same_shape(pred, truth, "mse");
  if (pred.numel() == 0) throw ConfigError("mse: empty tensors");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double d = clamp01(pred.data[i]) - truth.data[i];
    s += d * d;
  }
  return s / static_cast<double>(pred.data.size());
}

// ------------------------------------------------------------------ report

struct UnitRecord {
  long unit = 0;        // global unit index of the label
  double phi = 0.0;
  double gamma = 0.0;
  TopSet S, Shat;
  bool no_attack = false;
  double correlation = 0.0;      // flagged 0 when undefined
  bool correlation_defined = false;
};

struct MetricsReport {
  double gamma = 0.0;
  double phi = 0.0;
  double mse_value = 0.0;       // element-mean over all entries
  double mse_per_unit = 0.0;    // summed over targets: mse_value * |Y|
  double xi = 0.1;
  std::size_t units = 0;
  std::size_t no_attack_units = 0;
  std::vector<UnitRecord> per_unit;
  std::vector<long> empirical_count;  // per target: appearances in S
  std::vector<long> predicted_count;  // per target: appearances in Shat
  std::vector<std::string> target_names;
  double corr_mean = 0.0;  // over units with defined correlation
  double corr_sd = 0.0;
  std::size_t corr_defined = 0;
};

// Pearson correlation of one prediction row against its truth row;
// returns false when either side is constant.
inline bool unit_correlation(const double* pred, const double* truth,
                             std::size_t n, double& out) {
  // Constancy must be decided on the raw values: computing deviations from
  // a rounded mean can make a constant vector look very slightly varying.
  bool pred_const = true, truth_const = true;
  for (std::size_t i = 1; i < n; ++i) {
    pred_const = pred_const && clamp01(pred[i]) == clamp01(pred[0]);
    truth_const = truth_const && truth[i] == truth[0];
  }
  if (pred_const || truth_const) {
    out = 0.0;
    return false;
  }
  double mp = 0.0, mt = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mp += clamp01(pred[i]);
    mt += truth[i];
  }
  mp /= static_cast<double>(n);
  mt /= static_cast<double>(n);
  double spt = 0.0, spp = 0.0, stt = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dp = clamp01(pred[i]) - mp, dt = truth[i] - mt;
    spt += dp * dt;
    spp += dp * dp;
    stt += dt * dt;
  }
  if (spp <= 0.0 || stt <= 0.0) {
    out = 0.0;
    return false;
  }
  out = spt / std::sqrt(spp * stt);
  return true;
}

// Full per-unit evaluation of raw predictions against truth rows.
// `label_units` maps each row to its global unit index.
inline MetricsReport compute_metrics(const Tensor& pred, const Tensor& truth,
                                     const std::vector<long>& label_units,
                                     double xi,
                                     const std::vector<std::string>& target_names) {
  require_same_shape(pred, truth, "compute_metrics");
  if (pred.rank() != 2) throw ConfigError("compute_metrics: rank-2 expected");
  const std::size_t n = pred.shape[0], y = pred.shape[1];
  if (n == 0) throw ConfigError("compute_metrics: no prediction rows");
  if (label_units.size() != n)
    throw ConfigError("compute_metrics: label_units length mismatch");
  if (!target_names.empty() && target_names.size() != y)
    throw ConfigError("compute_metrics: target name count mismatch");
  for (double v : pred.data)
    if (!std::isfinite(v))
      throw NumericError("compute_metrics: non-finite prediction");

  MetricsReport r;
  r.xi = xi;
  r.units = n;
  r.target_names = target_names;
  r.empirical_count.assign(y, 0);
  r.predicted_count.assign(y, 0);

  std::vector<double> phis, gammas;
  phis.reserve(n);
  gammas.reserve(n);
  double corr_sum = 0.0;
  std::vector<double> corr_defined_vals;

  for (std::size_t i = 0; i < n; ++i) {
    const double* p = pred.data.data() + i * y;
    const double* t = truth.data.data() + i * y;
    UnitRecord rec;
    rec.unit = label_units[i];
    rec.S = empirical_top_set(t, y, rec.unit);
    rec.Shat = predicted_top_set(p, y, xi, rec.unit);
    rec.no_attack = rec.S.empty();
    if (rec.no_attack) ++r.no_attack_units;
    rec.phi = element_wise(rec.S, rec.Shat);
    rec.gamma = set_wise(rec.S, rec.Shat);
    rec.correlation_defined = unit_correlation(p, t, y, rec.correlation);
    if (rec.correlation_defined) {
      corr_sum += rec.correlation;
      corr_defined_vals.push_back(rec.correlation);
    }
    for (int m : rec.S.members) ++r.empirical_count[m];
    for (int m : rec.Shat.members) ++r.predicted_count[m];
    phis.push_back(rec.phi);
    gammas.push_back(rec.gamma);
    r.per_unit.push_back(std::move(rec));
  }

  r.phi = aggregate(phis);
  r.gamma = aggregate(gammas);
  r.mse_value = mse(pred, truth);
  r.mse_per_unit = r.mse_value * static_cast<double>(y);
  r.corr_defined = corr_defined_vals.size();
  if (r.corr_defined > 0) {
    r.corr_mean = corr_sum / static_cast<double>(r.corr_defined);
    double var = 0.0;
    for (double v : corr_defined_vals)
      var += (v - r.corr_mean) * (v - r.corr_mean);
    r.corr_sd = std::sqrt(var / static_cast<double>(r.corr_defined));
  }
  return r;
}

inline nlohmann::json report_to_json(const MetricsReport& r) {
  nlohmann::json j;
  j["gamma"] = r.gamma;
  j["phi"] = r.phi;
  j["mse"] = r.mse_value;
  j["mse_per_unit"] = r.mse_per_unit;
  j["xi"] = r.xi;
  j["units"] = r.units;
  j["no_attack_units"] = r.no_attack_units;
  j["correlation"] = {{"mean", r.corr_mean},
                      {"sd", r.corr_sd},
                      {"defined_units", r.corr_defined}};
  nlohmann::json freq = nlohmann::json::array();
  for (std::size_t i = 0; i < r.empirical_count.size(); ++i) {
    nlohmann::json row;
    row["target"] =
        i < r.target_names.size() ? r.target_names[i] : std::to_string(i);
    row["empirical"] = r.empirical_count[i];
    row["predicted"] = r.predicted_count[i];
    freq.push_back(std::move(row));
  }
  j["top_target_frequencies"] = std::move(freq);
  return j;
}

namespace detail {

inline std::string join_targets(const TopSet& s,
                                const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < s.members.size(); ++i) {
    if (i) out += '|';
    const int m = s.members[i];
    out += static_cast<std::size_t>(m) < names.size() ? names[m]
                                                      : std::to_string(m);
  }
  return out;
}

}  // namespace detail

// Per-unit diagnostics, one row per test unit, plot-ready.
inline void write_unit_csv(std::ostream& out, const MetricsReport& r,
                           const Date& series_start, int unit_days) {
  csv::write_record(out, {"unit", "unit_start_date", "phi", "gamma",
                          "no_attack", "empirical_top2", "predicted_top2",
                          "correlation", "correlation_defined"});
  for (const auto& rec : r.per_unit) {
    csv::write_record(
        out,
        {std::to_string(rec.unit),
         series_start.plus_days(rec.unit * unit_days).to_iso(),
         format6(rec.phi), format6(rec.gamma), rec.no_attack ? "1" : "0",
         detail::join_targets(rec.S, r.target_names),
         detail::join_targets(rec.Shat, r.target_names),
         format6(rec.correlation), rec.correlation_defined ? "1" : "0"});
  }
}

// Per-target empirical/predicted top-2 appearance counts.
inline void write_frequency_csv(std::ostream& out, const MetricsReport& r) {
  csv::write_record(out, {"target", "empirical_top2_count",
                          "predicted_top2_count"});
  for (std::size_t i = 0; i < r.empirical_count.size(); ++i) {
    csv::write_record(out, {i < r.target_names.size() ? r.target_names[i]
                                                      : std::to_string(i),
                            std::to_string(r.empirical_count[i]),
                            std::to_string(r.predicted_count[i])});
  }
}

}  // namespace tmg
