#pragma once

// Experiment orchestration: the (model × width × mode) grid, per-cell
// artifact writing, the mode-comparison table and the recompute-and-assert
// verification pass. All outputs are deterministic for a fixed config —
// no timestamps, no absolute paths, sorted JSON keys.

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmg/dataset.hpp"
#include "tmg/events.hpp"
#include "tmg/features.hpp"
#include "tmg/metrics.hpp"
#include "tmg/models.hpp"
#include "tmg/synth.hpp"

namespace tmg {

struct ExperimentConfig {
  // data source: either a canonical events CSV or a synthetic pattern
  std::string events_path;
  bool synthetic = false;
  SynthSpec synth;

  std::string country;
  Date window_start = Date(2001, 1, 1);
  Date window_end = Date(2018, 12, 31);
  bool drop_doubt = true;
  int unit_days = 2;
  int min_presence = 10;
  double xi = 0.1;
  std::uint64_t seed = 1;

  std::vector<ModelKind> models = kAllModelKinds;
  std::vector<int> widths = {1, 5, 15, 30};
  std::vector<SeriesMode> modes = {SeriesMode::Meta, SeriesMode::Shallow};

  int epochs = 100;
  int batch = 16;
  int patience = 10;
  SplitSpec split;

  std::string out_dir = "out";  // not part of the semantic config
  int jobs = 0;                 // worker threads for grid cells; 0 = all cores

  // When synthetic, the analysis window is the synthetic span.
  Date effective_start() const { return synthetic ? synth.start : window_start; }
  Date effective_end() const {
    return synthetic ? synth.window_end() : window_end;
  }
};

// Semantic config (everything that can change the numbers; the output
// directory deliberately excluded).
inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["events"] = c.events_path;
  j["synthetic"] = c.synthetic;
  if (c.synthetic) {
    nlohmann::json s;
    s["pattern"] = synth_pattern_name(c.synth.pattern);
    s["start"] = c.synth.start.to_iso();
    s["units"] = c.synth.units;
    s["unit_days"] = c.synth.unit_days;
    s["country"] = c.synth.country;
    s["seed"] = c.synth.seed;
    s["rate"] = c.synth.rate;
    s["tactics"] = c.synth.tactics;
    s["weapons"] = c.synth.weapons;
    s["targets"] = c.synth.targets;
    j["synth"] = std::move(s);
  }
  j["country"] = c.country;
  j["window_start"] = c.effective_start().to_iso();
  j["window_end"] = c.effective_end().to_iso();
  j["drop_doubt"] = c.drop_doubt;
  j["unit_days"] = c.unit_days;
  j["min_presence"] = c.min_presence;
  j["xi"] = c.xi;
  j["seed"] = c.seed;
  nlohmann::json models = nlohmann::json::array();
  for (auto m : c.models) models.push_back(model_kind_name(m));
  j["models"] = std::move(models);
  j["widths"] = c.widths;
  nlohmann::json modes = nlohmann::json::array();
  for (auto m : c.modes) modes.push_back(series_mode_name(m));
  j["modes"] = std::move(modes);
  j["epochs"] = c.epochs;
  j["batch"] = c.batch;
  j["patience"] = c.patience;
  j["split"] = {{"train", c.split.train_frac},
                {"val", c.split.val_frac},
                {"test", c.split.test_frac}};
  return j;
}

inline std::uint64_t config_hash(const ExperimentConfig& c) {
  return fnv1a64(config_to_json(c).dump());
}

// Parses a config file; absent keys keep their defaults.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  auto date_field = [&](const char* key, Date fallback) {
    if (!j.contains(key)) return fallback;
    auto d = Date::parse_iso(j[key].get<std::string>());
    if (!d) throw ConfigError(std::string("config: bad date in '") + key + "'");
    return *d;
  };
  if (j.contains("events")) c.events_path = j["events"].get<std::string>();
  if (j.contains("synthetic")) c.synthetic = j["synthetic"].get<bool>();
  if (j.contains("synth")) {
    const auto& s = j["synth"];
    if (s.contains("pattern"))
      c.synth.pattern = parse_synth_pattern(s["pattern"].get<std::string>());
    if (s.contains("start")) {
      auto d = Date::parse_iso(s["start"].get<std::string>());
      if (!d) throw ConfigError("config: bad date in synth.start");
      c.synth.start = *d;
    }
    if (s.contains("units")) c.synth.units = s["units"].get<long>();
    if (s.contains("unit_days")) c.synth.unit_days = s["unit_days"].get<int>();
    if (s.contains("country")) c.synth.country = s["country"].get<std::string>();
    if (s.contains("seed")) c.synth.seed = s["seed"].get<std::uint64_t>();
    if (s.contains("rate")) c.synth.rate = s["rate"].get<double>();
    if (s.contains("tactics"))
      c.synth.tactics = s["tactics"].get<std::vector<std::string>>();
    if (s.contains("weapons"))
      c.synth.weapons = s["weapons"].get<std::vector<std::string>>();
    if (s.contains("targets"))
      c.synth.targets = s["targets"].get<std::vector<std::string>>();
  }
  if (j.contains("country")) c.country = j["country"].get<std::string>();
  c.window_start = date_field("window_start", c.window_start);
  c.window_end = date_field("window_end", c.window_end);
  if (j.contains("drop_doubt")) c.drop_doubt = j["drop_doubt"].get<bool>();
  if (j.contains("unit_days")) c.unit_days = j["unit_days"].get<int>();
  if (j.contains("min_presence"))
    c.min_presence = j["min_presence"].get<int>();
  if (j.contains("xi")) c.xi = j["xi"].get<double>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("models")) {
    c.models.clear();
    for (const auto& m : j["models"])
      c.models.push_back(parse_model_kind(m.get<std::string>()));
  }
  if (j.contains("widths")) c.widths = j["widths"].get<std::vector<int>>();
  if (j.contains("modes")) {
    c.modes.clear();
    for (const auto& m : j["modes"])
      c.modes.push_back(parse_series_mode(m.get<std::string>()));
  }
  if (j.contains("epochs")) c.epochs = j["epochs"].get<int>();
  if (j.contains("batch")) c.batch = j["batch"].get<int>();
  if (j.contains("patience")) c.patience = j["patience"].get<int>();
  if (j.contains("split")) {
    const auto& s = j["split"];
    if (s.contains("train")) c.split.train_frac = s["train"].get<double>();
    if (s.contains("val")) c.split.val_frac = s["val"].get<double>();
    if (s.contains("test")) c.split.test_frac = s["test"].get<double>();
  }
  if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
  return c;
}

// Root seed expanded per cell: FNV-1a over a cell label, with the hash
// state initialized to the root seed. Reproducible in isolation and
// documented in the README.
inline std::uint64_t cell_seed(std::uint64_t root, ModelKind model, int width,
                               SeriesMode mode) {
  std::string label = std::string("cell:") + model_kind_name(model) + ":" +
                      std::to_string(width) + ":" + series_mode_name(mode);
  return fnv1a64(label, root);
}

struct CellResult {
  ModelKind model = ModelKind::Baseline;
  int width = 1;
  SeriesMode mode = SeriesMode::Meta;
  bool run = false;
  std::string skip_reason;
  std::uint64_t seed = 0;
  std::string dir;  // artifact directory relative to out_dir
  MetricsReport metrics;
  int stopped_epoch = 0;
  int best_epoch = 0;
  double best_val = 0.0;
  std::vector<std::string> adaptations;

  std::string id() const {
    return std::string(model_kind_name(model)) + "_w" + std::to_string(width) +
           "_" + series_mode_name(mode);
  }
};

struct ComparisonRow {
  ModelKind model;
  int width;
  double dgamma, dphi, dmse, dmse_per_unit;  // meta minus shallow
};

struct GridReport {
  std::uint64_t config_hash = 0;
  std::uint64_t root_seed = 0;
  FeatureCatalog catalog;
  long units = 0;
  SplitRanges splits;
  std::size_t events_used = 0;
  double no_attack_fraction = 0.0;
  std::vector<CellResult> cells;
  std::vector<ComparisonRow> comparison;
  std::vector<std::string> comparison_warnings;
};

// Per (model, width): meta-minus-shallow metric deltas, sorted by
// descending set-wise accuracy delta. Pairs missing either mode are
// omitted with a warning.
inline std::vector<ComparisonRow> compare_modes(
    const std::vector<CellResult>& cells, std::vector<std::string>* warnings) {
  std::map<std::pair<std::string, int>, const CellResult*> meta, shallow;
  for (const auto& c : cells) {
    if (!c.run) continue;
    auto key = std::make_pair(std::string(model_kind_name(c.model)), c.width);
    (c.mode == SeriesMode::Meta ? meta : shallow)[key] = &c;
  }
  std::vector<ComparisonRow> rows;
  for (const auto& [key, mc] : meta) {
    auto it = shallow.find(key);
    if (it == shallow.end()) {
      if (warnings)
        warnings->push_back(key.first + " width " + std::to_string(key.second) +
                            ": no shallow counterpart cell; omitted");
      continue;
    }
    const CellResult* sc = it->second;
    ComparisonRow r;
    r.model = mc->model;
    r.width = mc->width;
    r.dgamma = mc->metrics.gamma - sc->metrics.gamma;
    r.dphi = mc->metrics.phi - sc->metrics.phi;
    r.dmse = mc->metrics.mse_value - sc->metrics.mse_value;
    r.dmse_per_unit = mc->metrics.mse_per_unit - sc->metrics.mse_per_unit;
    rows.push_back(r);
  }
  if (warnings)
    for (const auto& [key, sc] : shallow)
      if (!meta.count(key))
        warnings->push_back(key.first + " width " + std::to_string(key.second) +
                            ": no meta counterpart cell; omitted");
  std::sort(rows.begin(), rows.end(),
            [](const ComparisonRow& a, const ComparisonRow& b) {
              if (a.dgamma != b.dgamma) return a.dgamma > b.dgamma;
              int cmp = std::string(model_kind_name(a.model))
                            .compare(model_kind_name(b.model));
              if (cmp != 0) return cmp < 0;
              return a.width < b.width;
            });
  return rows;
}

namespace detail {

inline Tensor labels_tensor(const WindowedDataset& ds) {
  Tensor y({static_cast<std::size_t>(ds.count), ds.targets});
  y.data = ds.y;
  return y;
}

inline void write_file(const std::filesystem::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw DataError("cannot write " + p.string());
  f << s;
}

inline void write_predictions_csv(std::ostream& out, const Tensor& pred,
                                  const WindowedDataset& ds) {
  std::vector<std::string> header = {"label_unit"};
  for (std::size_t i = 0; i < ds.targets; ++i)
    header.push_back("pred_" + std::to_string(i));
  for (std::size_t i = 0; i < ds.targets; ++i)
    header.push_back("truth_" + std::to_string(i));
  csv::write_record(out, header);
  std::vector<std::string> row;
  for (long i = 0; i < ds.count; ++i) {
    row.clear();
    row.push_back(std::to_string(ds.label_unit[static_cast<std::size_t>(i)]));
    for (std::size_t j = 0; j < ds.targets; ++j)
      row.push_back(format_full(pred.at(static_cast<std::size_t>(i), j)));
    const double* t = ds.label(i);
    for (std::size_t j = 0; j < ds.targets; ++j)
      row.push_back(format_full(t[j]));
    csv::write_record(out, row);
  }
}

}  // namespace detail

inline nlohmann::json cell_to_json(const CellResult& c) {
  nlohmann::json j;
  j["model"] = model_kind_name(c.model);
  j["width"] = c.width;
  j["mode"] = series_mode_name(c.mode);
  j["status"] = c.run ? "run" : "skipped";
  if (!c.run) {
    j["reason"] = c.skip_reason;
    return j;
  }
  j["seed"] = c.seed;
  j["dir"] = c.dir;
  j["gamma"] = c.metrics.gamma;
  j["phi"] = c.metrics.phi;
  j["mse"] = c.metrics.mse_value;
  j["mse_per_unit"] = c.metrics.mse_per_unit;
  j["test_units"] = c.metrics.units;
  j["no_attack_units"] = c.metrics.no_attack_units;
  j["correlation"] = {{"mean", c.metrics.corr_mean},
                      {"sd", c.metrics.corr_sd},
                      {"defined_units", c.metrics.corr_defined}};
  j["stopped_epoch"] = c.stopped_epoch;
  j["best_epoch"] = c.best_epoch;
  j["best_val_mse"] = c.best_val;
  j["adaptations"] = c.adaptations;
  return j;
}

inline nlohmann::json grid_report_to_json(const GridReport& r,
                                          const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["format"] = "tmg-grid-report-v1";
  j["version"] = kVersion;
  j["config"] = config_to_json(cfg);
  j["config_hash"] = hex64(r.config_hash);
  j["root_seed"] = r.root_seed;
  j["catalog"] = r.catalog.to_json();
  j["catalog_hash"] = hex64(r.catalog.hash());
  j["units"] = r.units;
  j["events_used"] = r.events_used;
  j["no_attack_fraction"] = r.no_attack_fraction;
  j["splits"] = {{"train", r.splits.length(Split::Train)},
                 {"val", r.splits.length(Split::Val)},
                 {"test", r.splits.length(Split::Test)}};
  nlohmann::json cells = nlohmann::json::array();
  std::size_t run_count = 0;
  for (const auto& c : r.cells) {
    cells.push_back(cell_to_json(c));
    if (c.run) ++run_count;
  }
  j["cells"] = std::move(cells);
  j["cell_accounting"] = {{"total", r.cells.size()},
                          {"run", run_count},
                          {"skipped", r.cells.size() - run_count}};
  nlohmann::json comp = nlohmann::json::array();
  for (const auto& row : r.comparison) {
    comp.push_back({{"model", model_kind_name(row.model)},
                    {"width", row.width},
                    {"delta_gamma", row.dgamma},
                    {"delta_phi", row.dphi},
                    {"delta_mse", row.dmse},
                    {"delta_mse_per_unit", row.dmse_per_unit}});
  }
  j["comparison"] = std::move(comp);
  j["comparison_warnings"] = r.comparison_warnings;

  // Directional observations, reported as booleans rather than asserted.
  bool gamma_up = !r.comparison.empty(), phi_up = !r.comparison.empty();
  for (const auto& row : r.comparison) {
    gamma_up = gamma_up && row.dgamma > 0.0;
    phi_up = phi_up && row.dphi > 0.0;
  }
  nlohmann::json best = nlohmann::json::object();
  for (SeriesMode mode : {SeriesMode::Meta, SeriesMode::Shallow}) {
    const CellResult* best_cell = nullptr;
    for (const auto& c : r.cells)
      if (c.run && c.mode == mode &&
          (!best_cell || c.metrics.gamma > best_cell->metrics.gamma))
        best_cell = &c;
    if (best_cell)
      best[series_mode_name(mode)] = {
          {"model", model_kind_name(best_cell->model)},
          {"width", best_cell->width},
          {"gamma", best_cell->metrics.gamma}};
  }
  j["claims"] = {{"meta_gamma_always_higher", gamma_up},
                 {"meta_phi_always_higher", phi_up},
                 {"best_gamma", std::move(best)}};
  return j;
}

inline void write_comparison_csv(std::ostream& out,
                                 const std::vector<ComparisonRow>& rows) {
  csv::write_record(out, {"model", "width", "delta_gamma", "delta_phi",
                          "delta_mse", "delta_mse_per_unit"});
  for (const auto& r : rows)
    csv::write_record(out, {model_kind_name(r.model), std::to_string(r.width),
                            format6(r.dgamma), format6(r.dphi),
                            format6(r.dmse), format6(r.dmse_per_unit)});
}

// ---------------------------------------------------------------- run_grid

inline GridReport run_grid(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const fs::path out(cfg.out_dir);
  fs::create_directories(out / "cells");

  // events
  std::vector<EventRecord> events;
  if (cfg.synthetic) {
    events = generate_synthetic_events(cfg.synth);
  } else {
    if (cfg.events_path.empty())
      throw ConfigError("grid: no events file configured");
    std::ifstream f(cfg.events_path);
    if (!f) throw DataError("cannot open events file " + cfg.events_path);
    events = read_events(f);
  }
  IngestConfig icfg;
  icfg.country = cfg.country;
  icfg.start = cfg.effective_start();
  icfg.end = cfg.effective_end();
  icfg.drop_doubt = cfg.drop_doubt;
  events = filter_events(events, icfg);
  if (events.empty()) throw DataError("grid: no events after filtering");
  {
    std::ostringstream ss;
    write_events(ss, events);
    detail::write_file(out / "events_used.csv", ss.str());
  }

  // features
  CatalogConfig ccfg;
  ccfg.start = icfg.start;
  ccfg.end = icfg.end;
  ccfg.unit_days = cfg.unit_days;
  ccfg.min_presence = cfg.min_presence;
  FeatureCatalog catalog = build_catalog(events, ccfg);
  if (catalog.dim_size(Dim::Targets) == 0)
    throw DataError("grid: no target features survive the presence filter");
  CountTensor tensor = build_count_tensor(events, catalog, ccfg);
  CentralitySeries meta = build_series(tensor, catalog, SeriesMode::Meta);
  CentralitySeries shallow = build_series(tensor, catalog, SeriesMode::Shallow);
  detail::write_file(out / "catalog.json", catalog.to_json().dump(2) + "\n");
  for (const auto* s : {&meta, &shallow}) {
    std::ostringstream ss;
    write_series(ss, *s);
    detail::write_file(
        out / (std::string("series_") + series_mode_name(s->mode) + ".csv"),
        ss.str());
  }
  {
    std::ostringstream ss;
    write_feature_correlation(ss, feature_correlation(meta),
                              meta.feature_names);
    detail::write_file(out / "feature_correlation_meta.csv", ss.str());
  }

  GridReport report;
  report.config_hash = config_hash(cfg);
  report.root_seed = cfg.seed;
  report.catalog = catalog;
  report.units = meta.units;
  report.events_used = events.size();
  long no_attack = 0;
  for (int a : meta.attacks) no_attack += a == 0 ? 1 : 0;
  report.no_attack_fraction =
      static_cast<double>(no_attack) / static_cast<double>(meta.units);
  report.splits = split_series(meta.units, cfg.split);

  // window cache shared across models: (width, mode) -> train/val/test
  std::map<std::pair<int, int>, std::array<WindowedDataset, 3>> cache;
  auto windows_for = [&](int width, SeriesMode mode)
      -> const std::array<WindowedDataset, 3>& {
    auto key = std::make_pair(width, static_cast<int>(mode));
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const CentralitySeries& in = mode == SeriesMode::Meta ? meta : shallow;
    std::array<WindowedDataset, 3> sets = {
        make_windows(in, meta, width, report.splits, Split::Train),
        make_windows(in, meta, width, report.splits, Split::Val),
        make_windows(in, meta, width, report.splits, Split::Test)};
    return cache.emplace(key, std::move(sets)).first->second;
  };

  const std::vector<std::string> target_names(
      catalog.dim(Dim::Targets).begin(), catalog.dim(Dim::Targets).end());

  // Enumerate cells first and pre-build every window set they share; the
  // cells themselves are independent jobs run on a bounded pool, with
  // results landing at fixed indices so assembly order is deterministic.
  for (ModelKind kind : cfg.models)
    for (int width : cfg.widths)
      for (SeriesMode mode : cfg.modes) {
        CellResult cell;
        cell.model = kind;
        cell.width = width;
        cell.mode = mode;
        cell.seed = cell_seed(cfg.seed, kind, width, mode);
        if (kind == ModelKind::Baseline &&
            !(width == 1 && mode == SeriesMode::Meta))
          cell.skip_reason =
              "baseline uses only the previous unit's centralities; it runs "
              "once, at width 1 in meta mode";
        else
          windows_for(width, mode);
        report.cells.push_back(std::move(cell));
      }

  auto run_cell = [&](CellResult& cell) {
    const auto& sets = windows_for(cell.width, cell.mode);
    const WindowedDataset& train_ds = sets[0];
    const WindowedDataset& val_ds = sets[1];
    const WindowedDataset& test_ds = sets[2];
    if (test_ds.count == 0 ||
        (cell.model != ModelKind::Baseline &&
         (train_ds.count == 0 || val_ds.count == 0))) {
      cell.skip_reason = "a split segment is too short for width " +
                         std::to_string(cell.width);
      return;
    }

    ModelSpec mspec;
    mspec.kind = cell.model;
    mspec.width = cell.width;
    mspec.features = meta.features();
    mspec.targets = meta.targets_count();
    mspec.seed = cell.seed;
    mspec.epochs = cfg.epochs;
    mspec.batch = cfg.batch;
    mspec.patience = cfg.patience;

    TrainedModel tm = train(Model::build(mspec), train_ds, val_ds);
    Tensor preds = predict(tm.model, test_ds);
    cell.metrics = compute_metrics(preds, detail::labels_tensor(test_ds),
                                   test_ds.label_unit, cfg.xi, target_names);
    cell.stopped_epoch = tm.stopped_epoch;
    cell.best_epoch = tm.best_epoch;
    cell.best_val = tm.stopped_epoch > 0 ? tm.best_val : 0.0;
    cell.adaptations = tm.model.adaptations;
    cell.run = true;
    cell.dir = "cells/" + cell.id();

    const fs::path cdir = out / cell.dir;
    fs::create_directories(cdir);
    detail::write_file(
        cdir / "checkpoint.json",
        checkpoint_to_json(tm.model, catalog.hash()).dump(2) + "\n");
    {
      std::ostringstream ss;
      write_history(ss, tm);
      detail::write_file(cdir / "history.csv", ss.str());
    }
    {
      std::ostringstream ss;
      detail::write_predictions_csv(ss, preds, test_ds);
      detail::write_file(cdir / "predictions.csv", ss.str());
    }
    detail::write_file(cdir / "metrics.json",
                       report_to_json(cell.metrics).dump(2) + "\n");
    {
      std::ostringstream ss;
      write_unit_csv(ss, cell.metrics, meta.start, meta.unit_days);
      detail::write_file(cdir / "units.csv", ss.str());
    }
    {
      std::ostringstream ss;
      write_frequency_csv(ss, cell.metrics);
      detail::write_file(cdir / "frequencies.csv", ss.str());
    }
  };

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < report.cells.size(); ++i)
    if (report.cells[i].skip_reason.empty()) pending.push_back(i);
  unsigned jobs = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                               : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<std::size_t>(jobs, std::max<std::size_t>(pending.size(), 1));
  std::vector<std::exception_ptr> errors(report.cells.size());
  if (jobs <= 1) {
    for (std::size_t i : pending) run_cell(report.cells[i]);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        std::size_t k = next.fetch_add(1);
        if (k >= pending.size()) return;
        std::size_t i = pending[k];
        try {
          run_cell(report.cells[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  report.comparison =
      compare_modes(report.cells, &report.comparison_warnings);
  detail::write_file(out / "grid_report.json",
                     grid_report_to_json(report, cfg).dump(2) + "\n");
  {
    std::ostringstream ss;
    write_comparison_csv(ss, report.comparison);
    detail::write_file(out / "comparison.csv", ss.str());
  }
  return report;
}

// ------------------------------------------------------------------ verify

// Re-derives every run cell's metrics from its persisted predictions and
// asserts equality with the grid report within 1e-12.
inline bool verify_grid(const std::string& out_dir,
                        std::vector<std::string>& messages) {
  namespace fs = std::filesystem;
  const fs::path out(out_dir);
  std::ifstream rf(out / "grid_report.json");
  if (!rf) throw DataError("verify: cannot open grid report in " + out_dir);
  nlohmann::json report = nlohmann::json::parse(rf);

  FeatureCatalog catalog = FeatureCatalog::from_json(report["catalog"]);
  const std::vector<std::string> target_names(
      catalog.dim(Dim::Targets).begin(), catalog.dim(Dim::Targets).end());
  const double xi = report["config"]["xi"].get<double>();

  bool ok = true;
  std::size_t checked = 0;
  for (const auto& cell : report["cells"]) {
    if (cell["status"] != "run") continue;
    const std::string dir = cell["dir"].get<std::string>();
    std::ifstream pf(out / dir / "predictions.csv");
    if (!pf) {
      messages.push_back(dir + ": predictions.csv missing");
      ok = false;
      continue;
    }
    std::vector<std::string> fields;
    if (!csv::read_record(pf, fields))
      throw DataError(dir + ": empty predictions file");
    const std::size_t y = (fields.size() - 1) / 2;
    std::vector<double> pred, truth;
    std::vector<long> units;
    while (csv::read_record(pf, fields)) {
      if (fields.size() == 1 && fields[0].empty()) continue;
      if (fields.size() != 1 + 2 * y)
        throw DataError(dir + ": malformed predictions row");
      units.push_back(std::atol(fields[0].c_str()));
      for (std::size_t i = 0; i < y; ++i)
        pred.push_back(std::strtod(fields[1 + i].c_str(), nullptr));
      for (std::size_t i = 0; i < y; ++i)
        truth.push_back(std::strtod(fields[1 + y + i].c_str(), nullptr));
    }
    Tensor pt({units.size(), y}), tt({units.size(), y});
    pt.data = pred;
    tt.data = truth;
    MetricsReport m = compute_metrics(pt, tt, units, xi, target_names);
    auto close = [](double a, double b) { return std::fabs(a - b) <= 1e-12; };
    if (!close(m.gamma, cell["gamma"].get<double>()) ||
        !close(m.phi, cell["phi"].get<double>()) ||
        !close(m.mse_value, cell["mse"].get<double>()) ||
        !close(m.mse_per_unit, cell["mse_per_unit"].get<double>())) {
      messages.push_back(dir + ": recomputed metrics disagree with report");
      ok = false;
    } else {
      ++checked;
    }
  }
  messages.push_back("verified " + std::to_string(checked) + " cell(s)");
  return ok;
}

}  // namespace tmg
