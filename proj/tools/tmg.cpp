// tmg — event streams to meta-graph centrality series to trained
// forecasters. Subcommands mirror the pipeline stages; `grid` runs the
// whole experiment, `verify` re-derives reported metrics from artifacts.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tmg/harness.hpp"

namespace fs = std::filesystem;
using namespace tmg;

namespace {

Date parse_date_flag(const std::string& s, const char* flag) {
  auto d = Date::parse_iso(s);
  if (!d)
    throw ConfigError(std::string("bad date for ") + flag + ": '" + s +
                      "' (expected YYYY-MM-DD)");
  return *d;
}

std::vector<EventRecord> load_events(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open events file " + path);
  return read_events(f);
}

void save_text(const std::string& path, const std::string& text) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty())
    fs::create_directories(parent);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path);
  f << text;
}

// Window defaults to the span of the event list when unset.
struct WindowFlags {
  std::string start, end;
  Date resolve_start(const std::vector<EventRecord>& evs) const {
    if (!start.empty()) return parse_date_flag(start, "--start");
    if (evs.empty()) throw DataError("no events to derive a window from");
    return evs.front().date;
  }
  Date resolve_end(const std::vector<EventRecord>& evs) const {
    if (!end.empty()) return parse_date_flag(end, "--end");
    if (evs.empty()) throw DataError("no events to derive a window from");
    return evs.back().date;
  }
};

struct PipelineFlags {
  std::string events;
  std::string country;
  bool keep_doubt = false;
  WindowFlags window;
  int unit_days = 2;
  int min_presence = 10;

  void add_to(CLI::App* cmd, bool events_required = true) {
    auto* ev = cmd->add_option("--events", events,
                               "canonical events CSV (see `ingest`)");
    if (events_required) ev->required();
    cmd->add_option("--country", country, "keep only this country");
    cmd->add_flag("--keep-doubt", keep_doubt,
                  "keep events flagged as doubtful (dropped by default)");
    cmd->add_option("--start", window.start, "window start (YYYY-MM-DD)");
    cmd->add_option("--end", window.end, "window end (YYYY-MM-DD)");
    cmd->add_option("--unit-days", unit_days, "days per time unit")
        ->capture_default_str();
    cmd->add_option("--min-presence", min_presence,
                    "min number of active units per kept feature")
        ->capture_default_str();
  }

  // events -> filtered events + catalog + both series
  struct Built {
    std::vector<EventRecord> events;
    FeatureCatalog catalog;
    CentralitySeries meta, shallow;
  };
  Built build() const {
    auto evs = load_events(events);
    IngestConfig icfg;
    icfg.country = country;
    icfg.start = window.resolve_start(evs);
    icfg.end = window.resolve_end(evs);
    icfg.drop_doubt = !keep_doubt;
    evs = filter_events(evs, icfg);
    if (evs.empty()) throw DataError("no events after filtering");
    CatalogConfig ccfg;
    ccfg.start = icfg.start;
    ccfg.end = icfg.end;
    ccfg.unit_days = unit_days;
    ccfg.min_presence = min_presence;
    Built b;
    b.catalog = build_catalog(evs, ccfg);
    if (b.catalog.dim_size(Dim::Targets) == 0)
      throw DataError("no target features survive the presence filter");
    CountTensor tensor = build_count_tensor(evs, b.catalog, ccfg);
    b.meta = build_series(tensor, b.catalog, SeriesMode::Meta);
    b.shallow = build_series(tensor, b.catalog, SeriesMode::Shallow);
    b.events = std::move(evs);
    return b;
  }
};

int run_ingest(const std::string& input, const std::string& output,
               const std::string& policy, const std::string& country,
               const WindowFlags& window, bool drop_doubt) {
  std::ifstream f(input);
  if (!f) throw DataError("cannot open " + input);
  GtdParseResult parsed =
      parse_events(f, GtdSchemaMap{},
                   policy == "clamp" ? UnknownDatePolicy::ClampToFirstOfMonth
                                     : UnknownDatePolicy::Drop);
  std::vector<EventRecord> evs = std::move(parsed.events);
  if (!country.empty() || !window.start.empty() || !window.end.empty() ||
      drop_doubt) {
    IngestConfig icfg;
    icfg.country = country;
    icfg.start = window.start.empty() ? Date(1, 1, 1)
                                      : parse_date_flag(window.start, "--start");
    icfg.end = window.end.empty() ? Date(9999, 12, 31)
                                  : parse_date_flag(window.end, "--end");
    icfg.drop_doubt = drop_doubt;
    evs = filter_events(evs, icfg);
  }
  std::ostringstream ss;
  write_events(ss, evs);
  save_text(output, ss.str());
  std::cerr << "rows read: " << parsed.rows_read
            << ", events written: " << evs.size()
            << ", warnings: " << parsed.warnings.size() << "\n";
  for (const auto& w : parsed.warnings) std::cerr << "  " << w << "\n";
  return 0;
}

int run_features(const PipelineFlags& pipe, const std::string& mode_name,
                 const std::string& catalog_out, const std::string& series_out,
                 const std::string& correlation_out) {
  auto built = pipe.build();
  const SeriesMode mode = parse_series_mode(mode_name);
  const CentralitySeries& s =
      mode == SeriesMode::Meta ? built.meta : built.shallow;
  if (!catalog_out.empty())
    save_text(catalog_out, built.catalog.to_json().dump(2) + "\n");
  std::ostringstream ss;
  write_series(ss, s);
  save_text(series_out, ss.str());
  if (!correlation_out.empty()) {
    std::ostringstream cs;
    write_feature_correlation(cs, feature_correlation(s), s.feature_names);
    save_text(correlation_out, cs.str());
  }
  std::cerr << "catalog: " << built.catalog.dim_size(Dim::Tactics)
            << " tactics, " << built.catalog.dim_size(Dim::Weapons)
            << " weapons, " << built.catalog.dim_size(Dim::Targets)
            << " targets; units: " << s.units << "\n";
  return 0;
}

int run_dataset(const std::string& series_path, const std::string& catalog_path,
                const std::string& mode_name, const std::string& labels_path,
                int width, const std::string& split_name,
                const std::string& output) {
  std::ifstream cf(catalog_path);
  if (!cf) throw DataError("cannot open catalog " + catalog_path);
  FeatureCatalog catalog = FeatureCatalog::from_json(nlohmann::json::parse(cf));
  auto read_one = [&](const std::string& path, SeriesMode m) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open series " + path);
    return read_series(f, catalog, m);
  };
  CentralitySeries inputs = read_one(series_path, parse_series_mode(mode_name));
  CentralitySeries labels =
      labels_path.empty() ? inputs : read_one(labels_path, SeriesMode::Meta);
  SplitRanges ranges = split_series(inputs.units);
  std::ostringstream ss;
  bool first = true;
  for (Split sp : {Split::Train, Split::Val, Split::Test}) {
    if (split_name != "all" && split_name != kSplitNames[static_cast<int>(sp)])
      continue;
    WindowedDataset ds = make_windows(inputs, labels, width, ranges, sp);
    if (!ds.warning.empty()) std::cerr << "warning: " << ds.warning << "\n";
    std::ostringstream part;
    write_dataset(part, ds);
    std::string text = part.str();
    if (!first) text.erase(0, text.find('\n') + 1);  // keep a single header
    ss << text;
    first = false;
  }
  save_text(output, ss.str());
  return 0;
}

ExperimentConfig config_from_flags(CLI::App* cmd, const std::string& config_path) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) throw DataError("cannot open config " + config_path);
    cfg = config_from_json(nlohmann::json::parse(f));
  }
  (void)cmd;
  return cfg;
}

int run_compare(const std::string& report_path, const std::string& output) {
  std::ifstream f(report_path);
  if (!f) throw DataError("cannot open report " + report_path);
  nlohmann::json report = nlohmann::json::parse(f);
  std::vector<CellResult> cells;
  for (const auto& cj : report["cells"]) {
    if (cj["status"] != "run") continue;
    CellResult c;
    c.model = parse_model_kind(cj["model"].get<std::string>());
    c.width = cj["width"].get<int>();
    c.mode = parse_series_mode(cj["mode"].get<std::string>());
    c.run = true;
    c.metrics.gamma = cj["gamma"].get<double>();
    c.metrics.phi = cj["phi"].get<double>();
    c.metrics.mse_value = cj["mse"].get<double>();
    c.metrics.mse_per_unit = cj["mse_per_unit"].get<double>();
    cells.push_back(std::move(c));
  }
  std::vector<std::string> warnings;
  auto rows = compare_modes(cells, &warnings);
  std::ostringstream ss;
  write_comparison_csv(ss, rows);
  save_text(output, ss.str());
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"temporal meta-graph forecasting toolkit"};
  app.require_subcommand(1);

  // ---- ingest
  auto* ingest = app.add_subcommand(
      "ingest", "convert a GTD-schema CSV to the canonical event format");
  std::string in_input, in_output, in_policy = "drop", in_country;
  WindowFlags in_window;
  bool in_drop_doubt = false;
  ingest->add_option("--input", in_input, "raw CSV")->required();
  ingest->add_option("--output", in_output, "canonical events CSV")->required();
  ingest->add_option("--date-policy", in_policy,
                     "unknown month/day handling: drop or clamp")
      ->check(CLI::IsMember({"drop", "clamp"}))
      ->capture_default_str();
  ingest->add_option("--country", in_country, "filter: keep only this country");
  ingest->add_option("--start", in_window.start, "filter: window start");
  ingest->add_option("--end", in_window.end, "filter: window end");
  ingest->add_flag("--drop-doubt", in_drop_doubt,
                   "filter: drop events flagged as doubtful");

  // ---- features
  auto* features = app.add_subcommand(
      "features", "build the feature catalog and a centrality series");
  PipelineFlags feat_pipe;
  feat_pipe.add_to(features);
  std::string feat_mode = "meta", feat_catalog_out, feat_series_out,
              feat_corr_out;
  features->add_option("--mode", feat_mode, "meta or shallow")
      ->check(CLI::IsMember({"meta", "shallow"}))
      ->capture_default_str();
  features->add_option("--catalog-out", feat_catalog_out, "catalog JSON path");
  features->add_option("--series-out", feat_series_out, "series CSV path")
      ->required();
  features->add_option("--correlation-out", feat_corr_out,
                       "feature-by-feature Pearson correlation CSV");

  // ---- dataset
  auto* dataset = app.add_subcommand(
      "dataset", "window a series into supervised examples and dump them");
  std::string ds_series, ds_catalog, ds_mode = "meta", ds_labels,
              ds_split = "all", ds_output;
  int ds_width = 1;
  dataset->add_option("--series", ds_series, "input series CSV")->required();
  dataset->add_option("--catalog", ds_catalog, "catalog JSON")->required();
  dataset->add_option("--mode", ds_mode, "input series mode")
      ->check(CLI::IsMember({"meta", "shallow"}))
      ->capture_default_str();
  dataset->add_option("--labels-series", ds_labels,
                      "meta series supplying labels (defaults to --series)");
  dataset->add_option("--width", ds_width, "input window width")
      ->check(CLI::IsMember({"1", "5", "15", "30"}))
      ->required();
  dataset->add_option("--split", ds_split, "train, val, test or all")
      ->check(CLI::IsMember({"train", "val", "test", "all"}))
      ->capture_default_str();
  dataset->add_option("--output", ds_output, "dump CSV path")->required();

  // ---- train
  auto* train_cmd = app.add_subcommand(
      "train", "train and evaluate one (model, width, mode) cell");
  PipelineFlags train_pipe;
  train_pipe.add_to(train_cmd);
  std::string tr_model = "fnn", tr_mode = "meta", tr_out = "out_train";
  int tr_width = 1, tr_epochs = 100, tr_batch = 16, tr_patience = 10;
  std::uint64_t tr_seed = 1;
  double tr_xi = 0.1;
  train_cmd->add_option("--model", tr_model, "architecture")
      ->check(CLI::IsMember({"baseline", "fnn", "lstm", "cnn", "bilstm",
                             "cnn_lstm"}))
      ->capture_default_str();
  train_cmd->add_option("--width", tr_width, "input window width")
      ->check(CLI::IsMember({"1", "5", "15", "30"}))
      ->capture_default_str();
  train_cmd->add_option("--mode", tr_mode, "feature mode")
      ->check(CLI::IsMember({"meta", "shallow"}))
      ->capture_default_str();
  train_cmd->add_option("--seed", tr_seed, "root seed")->capture_default_str();
  train_cmd->add_option("--epochs", tr_epochs, "")->capture_default_str();
  train_cmd->add_option("--batch", tr_batch, "")->capture_default_str();
  train_cmd->add_option("--patience", tr_patience, "")->capture_default_str();
  train_cmd->add_option("--xi", tr_xi, "no-attack threshold")
      ->capture_default_str();
  train_cmd->add_option("--out", tr_out, "output directory")
      ->capture_default_str();

  // ---- evaluate
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "run a saved checkpoint on the test split");
  PipelineFlags ev_pipe;
  ev_pipe.add_to(eval_cmd);
  std::string ev_checkpoint, ev_mode = "meta", ev_out = "out_eval";
  double ev_xi = 0.1;
  eval_cmd->add_option("--checkpoint", ev_checkpoint, "checkpoint JSON")
      ->required();
  eval_cmd->add_option("--mode", ev_mode, "feature mode used for inputs")
      ->check(CLI::IsMember({"meta", "shallow"}))
      ->capture_default_str();
  eval_cmd->add_option("--xi", ev_xi, "no-attack threshold")
      ->capture_default_str();
  eval_cmd->add_option("--out", ev_out, "output directory")
      ->capture_default_str();

  // ---- grid
  auto* grid_cmd = app.add_subcommand(
      "grid", "run the full model x width x mode experiment grid");
  std::string g_config, g_events, g_country, g_out, g_pattern;
  WindowFlags g_window;
  bool g_synthetic = false;
  long g_units = -1;
  std::vector<std::string> g_models, g_modes;
  std::vector<int> g_widths;
  int g_epochs = -1, g_batch = -1, g_patience = -1, g_min_presence = -1;
  double g_xi = -1.0;
  std::int64_t g_seed = -1;
  grid_cmd->add_option("--config", g_config, "experiment config JSON");
  grid_cmd->add_option("--events", g_events, "canonical events CSV");
  grid_cmd->add_flag("--synthetic", g_synthetic,
                     "generate a synthetic stream instead of reading events");
  grid_cmd->add_option("--pattern", g_pattern,
                       "synthetic pattern (alternating, constant, random)");
  grid_cmd->add_option("--units", g_units, "synthetic unit count");
  grid_cmd->add_option("--country", g_country, "country filter");
  grid_cmd->add_option("--start", g_window.start, "window start");
  grid_cmd->add_option("--end", g_window.end, "window end");
  grid_cmd->add_option("--seed", g_seed, "root seed");
  grid_cmd->add_option("--models", g_models, "model kinds to run");
  grid_cmd->add_option("--widths", g_widths, "input widths to run");
  grid_cmd->add_option("--modes", g_modes, "feature modes to run");
  grid_cmd->add_option("--epochs", g_epochs, "training epochs");
  grid_cmd->add_option("--batch", g_batch, "batch size");
  grid_cmd->add_option("--patience", g_patience, "early-stopping patience");
  grid_cmd->add_option("--xi", g_xi, "no-attack threshold");
  grid_cmd->add_option("--min-presence", g_min_presence,
                       "feature presence filter");
  grid_cmd->add_option("--out", g_out, "output directory");
  int g_jobs = -1;
  grid_cmd->add_option("--jobs", g_jobs, "worker threads (0 = all cores)");

  // ---- compare
  auto* compare_cmd = app.add_subcommand(
      "compare", "rebuild the meta-vs-shallow comparison from a grid report");
  std::string cmp_report, cmp_output;
  compare_cmd->add_option("--report", cmp_report, "grid_report.json")
      ->required();
  compare_cmd->add_option("--output", cmp_output, "comparison CSV path")
      ->required();

  // ---- synth
  auto* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic event stream");
  std::string sy_pattern = "alternating", sy_start = "2010-01-01",
              sy_country = "Testland", sy_output;
  long sy_units = 600;
  int sy_unit_days = 2;
  double sy_rate = 3.0;
  std::uint64_t sy_seed = 0;
  synth_cmd->add_option("--pattern", sy_pattern, "")
      ->check(CLI::IsMember({"alternating", "constant", "random"}))
      ->capture_default_str();
  synth_cmd->add_option("--units", sy_units, "")->capture_default_str();
  synth_cmd->add_option("--unit-days", sy_unit_days, "")->capture_default_str();
  synth_cmd->add_option("--start", sy_start, "")->capture_default_str();
  synth_cmd->add_option("--rate", sy_rate, "random pattern: events/day")
      ->capture_default_str();
  synth_cmd->add_option("--seed", sy_seed, "")->capture_default_str();
  synth_cmd->add_option("--country", sy_country, "")->capture_default_str();
  synth_cmd->add_option("--output", sy_output, "canonical events CSV")
      ->required();

  // ---- verify
  auto* verify_cmd = app.add_subcommand(
      "verify", "recompute reported metrics from persisted artifacts");
  std::string vf_dir;
  verify_cmd->add_option("--dir", vf_dir, "grid output directory")->required();

  try {
    app.parse(argc, argv);

    if (*ingest)
      return run_ingest(in_input, in_output, in_policy, in_country, in_window,
                        in_drop_doubt);

    if (*features)
      return run_features(feat_pipe, feat_mode, feat_catalog_out,
                          feat_series_out, feat_corr_out);

    if (*dataset)
      return run_dataset(ds_series, ds_catalog, ds_mode, ds_labels, ds_width,
                         ds_split, ds_output);

    if (*train_cmd) {
      ExperimentConfig cfg;
      cfg.events_path = train_pipe.events;
      cfg.country = train_pipe.country;
      cfg.drop_doubt = !train_pipe.keep_doubt;
      {
        auto evs = load_events(train_pipe.events);
        cfg.window_start = train_pipe.window.resolve_start(evs);
        cfg.window_end = train_pipe.window.resolve_end(evs);
      }
      cfg.unit_days = train_pipe.unit_days;
      cfg.min_presence = train_pipe.min_presence;
      cfg.xi = tr_xi;
      cfg.seed = tr_seed;
      cfg.models = {parse_model_kind(tr_model)};
      cfg.widths = {tr_width};
      cfg.modes = {parse_series_mode(tr_mode)};
      cfg.epochs = tr_epochs;
      cfg.batch = tr_batch;
      cfg.patience = tr_patience;
      cfg.out_dir = tr_out;
      GridReport r = run_grid(cfg);
      for (const auto& c : r.cells)
        if (c.run)
          std::cerr << c.id() << ": gamma " << format6(c.metrics.gamma)
                    << ", phi " << format6(c.metrics.phi) << ", mse "
                    << format6(c.metrics.mse_value) << "\n";
        else
          std::cerr << c.id() << ": skipped (" << c.skip_reason << ")\n";
      return 0;
    }

    if (*eval_cmd) {
      auto built = ev_pipe.build();
      std::ifstream cf(ev_checkpoint);
      if (!cf) throw DataError("cannot open checkpoint " + ev_checkpoint);
      Model model =
          checkpoint_from_json(nlohmann::json::parse(cf), built.catalog.hash());
      const CentralitySeries& inputs =
          parse_series_mode(ev_mode) == SeriesMode::Meta ? built.meta
                                                         : built.shallow;
      SplitRanges ranges = split_series(inputs.units);
      WindowedDataset test_ds = make_windows(inputs, built.meta,
                                             model.spec.width, ranges,
                                             Split::Test);
      if (test_ds.count == 0)
        throw DataError("test segment yields no windows: " + test_ds.warning);
      Tensor preds = predict(model, test_ds);
      Tensor truth({static_cast<std::size_t>(test_ds.count), test_ds.targets});
      truth.data = test_ds.y;
      std::vector<std::string> tnames(built.catalog.dim(Dim::Targets).begin(),
                                      built.catalog.dim(Dim::Targets).end());
      MetricsReport m = compute_metrics(preds, truth, test_ds.label_unit,
                                        ev_xi, tnames);
      fs::create_directories(ev_out);
      save_text(ev_out + "/metrics.json", report_to_json(m).dump(2) + "\n");
      std::ostringstream us, fs_, ps;
      write_unit_csv(us, m, built.meta.start, built.meta.unit_days);
      save_text(ev_out + "/units.csv", us.str());
      write_frequency_csv(fs_, m);
      save_text(ev_out + "/frequencies.csv", fs_.str());
      std::cerr << "gamma " << format6(m.gamma) << ", phi " << format6(m.phi)
                << ", mse " << format6(m.mse_value) << " (mse_per_unit "
                << format6(m.mse_per_unit) << ")\n";
      return 0;
    }

    if (*grid_cmd) {
      ExperimentConfig cfg = config_from_flags(grid_cmd, g_config);
      if (!g_events.empty()) cfg.events_path = g_events;
      if (g_synthetic) cfg.synthetic = true;
      if (!g_pattern.empty()) {
        cfg.synthetic = true;
        cfg.synth.pattern = parse_synth_pattern(g_pattern);
      }
      if (g_units >= 0) cfg.synth.units = g_units;
      if (!g_country.empty()) cfg.country = g_country;
      if (!g_window.start.empty())
        cfg.window_start = parse_date_flag(g_window.start, "--start");
      if (!g_window.end.empty())
        cfg.window_end = parse_date_flag(g_window.end, "--end");
      if (g_seed >= 0) cfg.seed = static_cast<std::uint64_t>(g_seed);
      if (!g_models.empty()) {
        cfg.models.clear();
        for (const auto& m : g_models) cfg.models.push_back(parse_model_kind(m));
      }
      if (!g_widths.empty()) cfg.widths = g_widths;
      if (!g_modes.empty()) {
        cfg.modes.clear();
        for (const auto& m : g_modes) cfg.modes.push_back(parse_series_mode(m));
      }
      if (g_epochs > 0) cfg.epochs = g_epochs;
      if (g_batch > 0) cfg.batch = g_batch;
      if (g_patience > 0) cfg.patience = g_patience;
      if (g_xi >= 0.0) cfg.xi = g_xi;
      if (g_min_presence >= 0) cfg.min_presence = g_min_presence;
      if (!g_out.empty()) cfg.out_dir = g_out;
      if (g_jobs >= 0) cfg.jobs = g_jobs;
      GridReport r = run_grid(cfg);
      std::size_t run_count = 0;
      for (const auto& c : r.cells) run_count += c.run ? 1 : 0;
      std::cerr << "grid: " << r.cells.size() << " cells (" << run_count
                << " run), report in " << cfg.out_dir << "/grid_report.json\n";
      return 0;
    }

    if (*compare_cmd) return run_compare(cmp_report, cmp_output);

    if (*synth_cmd) {
      SynthSpec spec;
      spec.pattern = parse_synth_pattern(sy_pattern);
      spec.start = parse_date_flag(sy_start, "--start");
      spec.units = sy_units;
      spec.unit_days = sy_unit_days;
      spec.rate = sy_rate;
      spec.seed = sy_seed;
      spec.country = sy_country;
      auto events = generate_synthetic_events(spec);
      std::ostringstream ss;
      write_events(ss, events);
      save_text(sy_output, ss.str());
      std::cerr << "wrote " << events.size() << " events\n";
      return 0;
    }

    if (*verify_cmd) {
      std::vector<std::string> messages;
      bool ok = verify_grid(vf_dir, messages);
      for (const auto& m : messages) std::cerr << m << "\n";
      if (!ok) throw DataError("verification failed");
      std::cerr << "verification OK\n";
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
