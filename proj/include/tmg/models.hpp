#pragma once

// The six forecasting architectures and their shared training loop.
// All models map a (batch, w, F) window tensor to (batch, |Y|) raw scores;
// clamping to [0,1] happens only inside the metrics.

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmg/dataset.hpp"
#include "tmg/nn.hpp"

namespace tmg {

enum class ModelKind { Baseline, Fnn, Lstm, Cnn, Bilstm, CnnLstm };

inline const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Baseline: return "baseline";
    case ModelKind::Fnn: return "fnn";
    case ModelKind::Lstm: return "lstm";
    case ModelKind::Cnn: return "cnn";
    case ModelKind::Bilstm: return "bilstm";
    default: return "cnn_lstm";
  }
}

inline ModelKind parse_model_kind(const std::string& s) {
  for (ModelKind k : {ModelKind::Baseline, ModelKind::Fnn, ModelKind::Lstm,
                      ModelKind::Cnn, ModelKind::Bilstm, ModelKind::CnnLstm})
    if (s == model_kind_name(k)) return k;
  throw ConfigError("unknown model kind '" + s + "'");
}

inline const std::vector<ModelKind> kAllModelKinds = {
    ModelKind::Baseline, ModelKind::Fnn,    ModelKind::Lstm,
    ModelKind::Cnn,      ModelKind::Bilstm, ModelKind::CnnLstm};

struct ModelSpec {
  ModelKind kind = ModelKind::Baseline;
  int width = 1;
  std::size_t features = 0;
  std::size_t targets = 0;
  std::uint64_t seed = 0;
  int epochs = 100;
  int batch = 16;
  int patience = 10;

  void validate() const {
    if (width != 1 && width != 5 && width != 15 && width != 30)
      throw ConfigError("model width must be one of 1,5,15,30, got " +
                        std::to_string(width));
    if (features == 0 || targets == 0 || targets > features)
      throw ConfigError("model feature/target counts invalid: F=" +
                        std::to_string(features) + " Y=" +
                        std::to_string(targets));
    if (epochs < 1 || batch < 1 || patience < 1)
      throw ConfigError("model hyperparameters must be positive");
  }

  std::size_t targets_offset() const { return features - targets; }
};

// A built (possibly untrained) model instance. Layer fields are populated
// according to `kind`; `params` lists every trainable tensor in creation
// order, which is also the fixed seed-consumption order.
struct Model {
  ModelSpec spec;
  std::vector<nn::Parameter> params;
  std::vector<std::string> adaptations;  // width-driven layout changes

  nn::Dense dense1, dense2, head;
  nn::Conv1D conv;
  nn::LstmCell lstm;
  nn::BidirectionalLstm bilstm;
  bool has_pool = false;
  std::size_t conv_kernel = 0;

  static Model build(const ModelSpec& spec) {
    spec.validate();
    Model m;
    m.spec = spec;
    Rng rng(spec.seed);
    const std::size_t F = spec.features, Y = spec.targets;
    const std::size_t W = static_cast<std::size_t>(spec.width);
    const std::size_t units = 32;

    switch (spec.kind) {
      case ModelKind::Baseline:
        break;  // parameterless
      case ModelKind::Fnn:
        m.dense1 = nn::Dense::create("dense1", W * F, units, nn::Act::Relu, rng);
        m.dense2 = nn::Dense::create("dense2", units, units, nn::Act::Relu, rng);
        m.head = nn::Dense::create("head", units, Y, nn::Act::Linear, rng);
        m.dense1.collect(m.params);
        m.dense2.collect(m.params);
        m.head.collect(m.params);
        break;
      case ModelKind::Lstm:
        m.lstm = nn::LstmCell::create("lstm", F, units, 0.5, rng);
        m.head = nn::Dense::create("head", units, Y, nn::Act::Linear, rng);
        m.lstm.collect(m.params);
        m.head.collect(m.params);
        break;
      case ModelKind::Cnn: {
        m.conv_kernel = W >= 3 ? 3 : 1;
        if (m.conv_kernel != 3)
          m.adaptations.push_back("conv kernel reduced to 1 (input width " +
                                  std::to_string(W) + " < 3)");
        m.conv = nn::Conv1D::create("conv", F, units, m.conv_kernel,
                                    nn::Act::Relu, rng);
        m.dense1 = nn::Dense::create("dense1", units, units, nn::Act::Relu, rng);
        m.head = nn::Dense::create("head", units, Y, nn::Act::Linear, rng);
        m.conv.collect(m.params);
        m.dense1.collect(m.params);
        m.head.collect(m.params);
        break;
      }
      case ModelKind::Bilstm:
        m.bilstm = nn::BidirectionalLstm::create("bilstm", F, units, 0.5, rng);
        m.head = nn::Dense::create("head", 2 * units, Y, nn::Act::Linear, rng);
        m.bilstm.collect(m.params);
        m.head.collect(m.params);
        break;
      case ModelKind::CnnLstm: {
        m.conv_kernel = W >= 3 ? 3 : 1;
        if (m.conv_kernel != 3)
          m.adaptations.push_back("conv kernel reduced to 1 (input width " +
                                  std::to_string(W) + " < 3)");
        const std::size_t conv_out = W - m.conv_kernel + 1;
        m.has_pool = conv_out >= 2;
        if (!m.has_pool)
          m.adaptations.push_back(
              "max pooling skipped (conv output length " +
              std::to_string(conv_out) + " < pool size 2)");
        m.conv = nn::Conv1D::create("conv", F, units, m.conv_kernel,
                                    nn::Act::Linear, rng);
        m.dense1 = nn::Dense::create("dense1", units, units, nn::Act::Relu, rng);
        m.lstm = nn::LstmCell::create("lstm", units, units, 0.5, rng);
        m.head = nn::Dense::create("head", units, Y, nn::Act::Linear, rng);
        m.conv.collect(m.params);
        m.dense1.collect(m.params);
        m.lstm.collect(m.params);
        m.head.collect(m.params);
        break;
      }
    }
    return m;
  }

  // x3: (batch, w, F) constant node. Training mode draws dropout masks
  // from `rng`; evaluation mode never touches it.
  nn::Var forward(const nn::Var& x3, bool training, Rng& rng) const {
    const std::size_t W = static_cast<std::size_t>(spec.width);
    switch (spec.kind) {
      case ModelKind::Baseline:
        return nn::slice_cols(nn::slice_time(x3, W - 1), spec.targets_offset(),
                              spec.targets);
      case ModelKind::Fnn:
        return head(dense2(dense1(nn::flatten(x3))));
      case ModelKind::Lstm: {
        std::vector<nn::Var> xs;
        for (std::size_t t = 0; t < W; ++t) xs.push_back(nn::slice_time(x3, t));
        return head(lstm.run(xs, training, rng).back());
      }
      case ModelKind::Cnn: {
        nn::Var c = conv(x3);
        const std::size_t len = c->value.shape[1];
        return head(dense1(nn::slice_time(c, len - 1)));
      }
      case ModelKind::Bilstm: {
        std::vector<nn::Var> xs;
        for (std::size_t t = 0; t < W; ++t) xs.push_back(nn::slice_time(x3, t));
        return head(bilstm.run(xs, training, rng).back());
      }
      default: {  // CnnLstm
        nn::Var c = conv(x3);
        if (has_pool) c = nn::maxpool1d_op(c, 2);
        std::vector<nn::Var> seq;
        for (std::size_t t = 0; t < c->value.shape[1]; ++t)
          seq.push_back(dense1(nn::slice_time(c, t)));
        return head(lstm.run(seq, training, rng).back());
      }
    }
  }
};

// ---------------------------------------------------------------- batching

namespace detail {

inline nn::Var batch_inputs(const WindowedDataset& ds, long begin, long count) {
  Tensor x({static_cast<std::size_t>(count),
            static_cast<std::size_t>(ds.width), ds.features});
  std::copy(ds.input(begin),
            ds.input(begin) + x.numel(), x.data.begin());
  return nn::constant(std::move(x));
}

inline nn::Var batch_labels(const WindowedDataset& ds, long begin, long count) {
  Tensor y({static_cast<std::size_t>(count), ds.targets});
  std::copy(ds.label(begin), ds.label(begin) + y.numel(), y.data.begin());
  return nn::constant(std::move(y));
}

}  // namespace detail

// Raw model outputs for every example of a dataset (dropout disabled).
inline Tensor predict(const Model& model, const WindowedDataset& ds) {
  Tensor out({static_cast<std::size_t>(ds.count), ds.targets});
  Rng unused(0);
  const long chunk = 256;
  for (long b = 0; b < ds.count; b += chunk) {
    const long n = std::min(chunk, ds.count - b);
    nn::Var pred = model.forward(detail::batch_inputs(ds, b, n), false, unused);
    std::copy(pred->value.data.begin(), pred->value.data.end(),
              out.data.begin() + static_cast<std::size_t>(b) * ds.targets);
  }
  return out;
}

// Single-window convenience overload: x is (w, F) row-major.
inline std::vector<double> predict(const Model& model,
                                   const std::vector<double>& x) {
  const std::size_t W = static_cast<std::size_t>(model.spec.width);
  if (x.size() != W * model.spec.features)
    throw ConfigError("predict: input size " + std::to_string(x.size()) +
                      " does not match window " + std::to_string(W) + "x" +
                      std::to_string(model.spec.features));
  Tensor t({1, W, model.spec.features});
  t.data = x;
  Rng unused(0);
  nn::Var pred = model.forward(nn::constant(std::move(t)), false, unused);
  return pred->value.data;
}

// Mean squared error of raw predictions over a whole dataset.
inline double dataset_mse(const Model& model, const WindowedDataset& ds) {
  if (ds.count == 0) throw ConfigError("dataset_mse: empty dataset");
  Tensor pred = predict(model, ds);
  double sse = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double d = pred.data[i] - ds.y[i];
    sse += d * d;
  }
  return sse / static_cast<double>(pred.data.size());
}

// ---------------------------------------------------------------- training

struct TrainedModel {
  Model model;
  std::vector<double> train_history;  // per epoch, sample-weighted batch mean
  std::vector<double> val_history;    // per epoch, full-set MSE, dropout off
  int stopped_epoch = 0;              // epochs actually run
  int best_epoch = 0;                 // 1-based epoch restored into `model`
  double best_val = std::numeric_limits<double>::infinity();
};

// Minimizes MSE with Adam over chronologically ordered batches (no
// shuffling), evaluates validation MSE each epoch with dropout disabled,
// stops after `patience` epochs without improvement and restores the best
// parameters. Non-finite losses abort with a diagnostic.
inline TrainedModel train(Model model, const WindowedDataset& train_ds,
                          const WindowedDataset& val_ds) {
  TrainedModel out;
  if (model.spec.kind == ModelKind::Baseline) {
    out.model = std::move(model);
    return out;  // nothing to fit
  }
  if (train_ds.count == 0)
    throw ConfigError("train: training dataset is empty");
  if (val_ds.count == 0)
    throw ConfigError("train: validation dataset is empty");

  const ModelSpec& spec = model.spec;
  nn::AdamState adam;
  adam.init(model.params);
  // Dropout draws come from a stream derived from (seed, "dropout") so the
  // init stream stays independent of epoch count.
  Rng dropout_rng(fnv1a64("dropout", spec.seed));

  std::vector<Tensor> best_params;
  int since_best = 0;

  for (int epoch = 1; epoch <= spec.epochs; ++epoch) {
    double sse_weighted = 0.0;
    long samples = 0;
    for (long b = 0; b < train_ds.count; b += spec.batch) {
      const long n = std::min<long>(spec.batch, train_ds.count - b);
      nn::Var x = detail::batch_inputs(train_ds, b, n);
      nn::Var y = detail::batch_labels(train_ds, b, n);
      nn::Var loss = nn::mse_loss(model.forward(x, true, dropout_rng), y);
      const double lv = loss->value.data[0];
      if (!std::isfinite(lv))
        throw NumericError("training diverged: non-finite loss at epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(b / spec.batch) + " (" +
                           model_kind_name(spec.kind) + ", width " +
                           std::to_string(spec.width) + ")");
      nn::backward(loss);
      nn::adam_step(model.params, adam);
      sse_weighted += lv * static_cast<double>(n);
      samples += n;
    }
    out.train_history.push_back(sse_weighted / static_cast<double>(samples));
    const double val = dataset_mse(model, val_ds);
    if (!std::isfinite(val))
      throw NumericError("training diverged: non-finite validation MSE at epoch " +
                         std::to_string(epoch));
    out.val_history.push_back(val);
    out.stopped_epoch = epoch;

    if (val < out.best_val) {
      out.best_val = val;
      out.best_epoch = epoch;
      since_best = 0;
      best_params.clear();
      for (const auto& p : model.params) best_params.push_back(p->value);
    } else if (++since_best >= spec.patience) {
      break;
    }
  }

  for (std::size_t i = 0; i < model.params.size(); ++i)
    model.params[i]->value = best_params[i];
  out.model = std::move(model);
  return out;
}

inline void write_history(std::ostream& out, const TrainedModel& tm) {
  out << "epoch,train_mse,val_mse\n";
  for (std::size_t e = 0; e < tm.train_history.size(); ++e)
    out << (e + 1) << ',' << format_full(tm.train_history[e]) << ','
        << format_full(tm.val_history[e]) << '\n';
}

// --------------------------------------------------------------- checkpoint

inline constexpr const char* kCheckpointFormat = "tmg-checkpoint-v1";

inline nlohmann::json checkpoint_to_json(const Model& model,
                                         std::uint64_t catalog_hash) {
  nlohmann::json j;
  j["format"] = kCheckpointFormat;
  j["kind"] = model_kind_name(model.spec.kind);
  j["width"] = model.spec.width;
  j["features"] = model.spec.features;
  j["targets"] = model.spec.targets;
  j["seed"] = model.spec.seed;
  j["epochs"] = model.spec.epochs;
  j["batch"] = model.spec.batch;
  j["patience"] = model.spec.patience;
  j["catalog_hash"] = hex64(catalog_hash);
  j["adaptations"] = model.adaptations;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& p : model.params) {
    nlohmann::json t;
    t["shape"] = p->value.shape;
    t["data"] = p->value.data;
    params[p->name] = std::move(t);
  }
  j["parameters"] = std::move(params);
  return j;
}

// Rebuilds the architecture from the descriptor, then overwrites every
// parameter tensor by name. Shape or name mismatches are data errors.
inline Model checkpoint_from_json(const nlohmann::json& j,
                                  std::uint64_t expect_catalog_hash,
                                  bool check_catalog = true) {
  if (!j.contains("format") || j["format"] != kCheckpointFormat)
    throw DataError("checkpoint: unknown format");
  if (check_catalog && j["catalog_hash"].get<std::string>() !=
                           hex64(expect_catalog_hash))
    throw DataError("checkpoint: catalog hash mismatch (model was trained "
                    "on a different catalog)");
  ModelSpec spec;
  spec.kind = parse_model_kind(j["kind"].get<std::string>());
  spec.width = j["width"].get<int>();
  spec.features = j["features"].get<std::size_t>();
  spec.targets = j["targets"].get<std::size_t>();
  spec.seed = j["seed"].get<std::uint64_t>();
  spec.epochs = j["epochs"].get<int>();
  spec.batch = j["batch"].get<int>();
  spec.patience = j["patience"].get<int>();
  Model m = Model::build(spec);
  const auto& params = j["parameters"];
  std::size_t used = 0;
  for (auto& p : m.params) {
    if (!params.contains(p->name))
      throw DataError("checkpoint: missing parameter '" + p->name + "'");
    const auto& t = params[p->name];
    auto shape = t["shape"].get<std::vector<std::size_t>>();
    if (shape != p->value.shape)
      throw DataError("checkpoint: parameter '" + p->name + "' shape " +
                      Tensor::shape_str(shape) + " does not match model " +
                      p->value.shape_str());
    p->value.data = t["data"].get<std::vector<double>>();
    if (p->value.data.size() != p->value.numel())
      throw DataError("checkpoint: parameter '" + p->name + "' data length");
    ++used;
  }
  if (used != params.size())
    throw DataError("checkpoint: file has " + std::to_string(params.size()) +
                    " parameters, model expects " + std::to_string(used));
  return m;
}

}  // namespace tmg
