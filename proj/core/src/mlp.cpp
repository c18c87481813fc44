#include "bsbench/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "bsbench/gbdt.hpp"
#include "bsbench/rng.hpp"

namespace bsb {

using nlohmann::json;

void MlpConfig::validate() const {
  if (hidden.empty()) throw ConfigError("need at least one hidden layer");
  for (int h : hidden)
    if (h < 1) throw ConfigError("hidden layer sizes must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
}

namespace {

constexpr double kProbFloor = 1e-15;

std::vector<std::size_t> layer_sizes(std::size_t n_features,
                                     const MlpConfig& cfg,
                                     std::size_t n_classes) {
  std::vector<std::size_t> sizes;
  sizes.push_back(n_features);
  for (int h : cfg.hidden) sizes.push_back(static_cast<std::size_t>(h));
  sizes.push_back(n_classes);
  return sizes;
}

struct ForwardState {
  // activations[0] is the standardized input; one entry per layer output
  std::vector<std::vector<double>> activations;
  std::vector<double> probs;
};

void standardize(const MlpModel& model, const double* x,
                 std::vector<double>& out) {
  const std::size_t n = model.feat_mean.size();
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = (x[i] - model.feat_mean[i]) / model.feat_std[i];
}

void forward_one(const MlpModel& model, const double* x, ForwardState& fs) {
  const std::size_t n_layers = model.weights.size();
  fs.activations.resize(n_layers + 1);
  standardize(model, x, fs.activations[0]);

  for (std::size_t l = 0; l < n_layers; ++l) {
    const Matrix& w = model.weights[l];
    const std::vector<double>& b = model.biases[l];
    const std::vector<double>& in = fs.activations[l];
    std::vector<double>& out = fs.activations[l + 1];
    out.resize(w.rows());
    for (std::size_t o = 0; o < w.rows(); ++o) {
      const double* wr = w.row(o);
      double acc = b[o];
      for (std::size_t i = 0; i < w.cols(); ++i) acc += wr[i] * in[i];
      out[o] = acc;
    }
    if (l + 1 < n_layers)
      for (double& v : out) v = v > 0.0 ? v : 0.0;  // ReLU
  }

  fs.probs = fs.activations[n_layers];
  double zmax = fs.probs[0];
  for (double v : fs.probs) zmax = std::max(zmax, v);
  double sum = 0.0;
  for (double& v : fs.probs) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (double& v : fs.probs) v /= sum;
}

struct Gradients {
  std::vector<Matrix> dw;
  std::vector<std::vector<double>> db;

  void init_like(const MlpModel& model) {
    dw.clear();
    db.clear();
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
      dw.emplace_back(model.weights[l].rows(), model.weights[l].cols());
      db.emplace_back(model.biases[l].size(), 0.0);
    }
  }
};

// accumulates mean-reduced gradients over the batch; returns mean loss
double backward_batch(const MlpModel& model, const Matrix& X,
                      const std::vector<int>& y,
                      const std::vector<std::size_t>& rows, Gradients& grads) {
  const std::size_t n_layers = model.weights.size();
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  double loss = 0.0;

  ForwardState fs;
  std::vector<std::vector<double>> delta(n_layers);
  for (std::size_t r : rows) {
    forward_one(model, X.row(r), fs);
    loss -= std::log(std::max(fs.probs[static_cast<std::size_t>(y[r])],
                              kProbFloor));

    // output delta: (p - onehot) / batch
    std::vector<double>& dout = delta[n_layers - 1];
    dout = fs.probs;
    dout[static_cast<std::size_t>(y[r])] -= 1.0;
    for (double& v : dout) v *= inv_n;

    for (std::size_t l = n_layers; l-- > 0;) {
      const std::vector<double>& in = fs.activations[l];
      const std::vector<double>& d = delta[l];
      Matrix& dw = grads.dw[l];
      std::vector<double>& db = grads.db[l];
      for (std::size_t o = 0; o < dw.rows(); ++o) {
        const double dv = d[o];
        db[o] += dv;
        double* dwr = dw.row(o);
        for (std::size_t i = 0; i < dw.cols(); ++i) dwr[i] += dv * in[i];
      }
      if (l == 0) break;
      // propagate through W_l then the ReLU of layer l-1
      std::vector<double>& dprev = delta[l - 1];
      dprev.assign(model.weights[l].cols(), 0.0);
      const Matrix& w = model.weights[l];
      for (std::size_t o = 0; o < w.rows(); ++o) {
        const double dv = d[o];
        const double* wr = w.row(o);
        for (std::size_t i = 0; i < w.cols(); ++i) dprev[i] += dv * wr[i];
      }
      const std::vector<double>& act = fs.activations[l];
      for (std::size_t i = 0; i < dprev.size(); ++i)
        if (act[i] <= 0.0) dprev[i] = 0.0;
    }
  }
  return loss * inv_n;
}

struct AdamState {
  Gradients m, v;
  long step = 0;
};

void adam_update(MlpModel& model, const Gradients& grads, AdamState& adam,
                 const MlpConfig& cfg) {
  ++adam.step;
  const double bc1 = 1.0 - std::pow(cfg.adam_beta1, adam.step);
  const double bc2 = 1.0 - std::pow(cfg.adam_beta2, adam.step);
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    auto update = [&](double& param, double g, double& m, double& v) {
      m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g;
      v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * g * g;
      param -= cfg.learning_rate * (m / bc1) /
               (std::sqrt(v / bc2) + cfg.adam_eps);
    };
    auto& w = model.weights[l].data();
    const auto& gw = grads.dw[l].data();
    auto& mw = adam.m.dw[l].data();
    auto& vw = adam.v.dw[l].data();
    for (std::size_t i = 0; i < w.size(); ++i)
      update(w[i], gw[i], mw[i], vw[i]);
    auto& b = model.biases[l];
    const auto& gb = grads.db[l];
    auto& mb = adam.m.db[l];
    auto& vb = adam.v.db[l];
    for (std::size_t i = 0; i < b.size(); ++i)
      update(b[i], gb[i], mb[i], vb[i]);
  }
}

}  // namespace

MlpModel init_mlp(std::size_t n_features,
                  const std::vector<std::string>& class_names,
                  const MlpConfig& cfg) {
  cfg.validate();
  MlpModel model;
  model.config = cfg;
  model.class_names = class_names;
  model.feat_mean.assign(n_features, 0.0);
  model.feat_std.assign(n_features, 1.0);

  const auto sizes = layer_sizes(n_features, cfg, class_names.size());
  Rng rng(derive_seed(cfg.seed, 0x3317));
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    Matrix w(sizes[l + 1], sizes[l]);
    std::vector<double> b(sizes[l + 1], 0.0);
    const bool output_layer = l + 2 == sizes.size();
    if (!output_layer) {
      // He-style uniform fan-in scaling; output layer stays zero so the
      // class ordering carries no initialization asymmetry
      const double bound = std::sqrt(6.0 / static_cast<double>(sizes[l]));
      for (double& v : w.data()) v = rng.uniform(-bound, bound);
      // small bias offsets keep ReLU pre-activations off the exact kink
      for (double& v : b) v = rng.uniform(-0.01, 0.01);
    }
    model.weights.push_back(std::move(w));
    model.biases.push_back(std::move(b));
  }
  return model;
}

MlpModel train_mlp(const Matrix& X, const std::vector<int>& y,
                   const std::vector<std::string>& class_names,
                   const MlpConfig& cfg, TrainReport* report,
                   const Matrix* X_val, const std::vector<int>* y_val) {
  cfg.validate();
  if (X.rows() != y.size()) throw TrainError("X/y length mismatch");
  if (X.rows() == 0) throw DegenerateDataError("no training rows");
  for (double v : X.data())
    if (!std::isfinite(v)) throw NonFiniteFeatureError("non-finite feature");
  {
    std::vector<std::size_t> counts(class_names.size(), 0);
    for (int label : y) {
      if (label < 0 || static_cast<std::size_t>(label) >= class_names.size())
        throw TrainError("label index out of range");
      ++counts[static_cast<std::size_t>(label)];
    }
    std::size_t present = 0;
    for (std::size_t c : counts) present += c > 0 ? 1 : 0;
    if (present < 2)
      throw DegenerateDataError("training data contains a single class");
  }

  MlpModel model = init_mlp(X.cols(), class_names, cfg);

  // standardization statistics from the training rows only
  for (std::size_t c = 0; c < X.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < X.rows(); ++r) mean += X(r, c);
    mean /= static_cast<double>(X.rows());
    double var = 0.0;
    for (std::size_t r = 0; r < X.rows(); ++r)
      var += (X(r, c) - mean) * (X(r, c) - mean);
    var /= static_cast<double>(X.rows());
    model.feat_mean[c] = mean;
    model.feat_std[c] = var > 1e-24 ? std::sqrt(var) : 1.0;
  }

  AdamState adam;
  adam.m.init_like(model);
  adam.v.init_like(model);

  Rng shuffle_rng(derive_seed(cfg.seed, 0xba7c4));
  std::vector<std::size_t> order(X.rows());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainReport local_report;
  TrainReport& rep = report ? *report : local_report;

  MlpModel best_model = model;
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = -1;

  Gradients grads;
  grads.init_like(model);
  std::vector<std::size_t> batch;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // seeded Fisher-Yates
    for (std::size_t i = order.size(); i-- > 1;) {
      const std::size_t j = static_cast<std::size_t>(
          shuffle_rng.uniform_int(0, static_cast<int>(i)));
      std::swap(order[i], order[j]);
    }

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(
          order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      batch.assign(order.begin() + start, order.begin() + end);
      grads.init_like(model);
      const double batch_loss = backward_batch(model, X, y, batch, grads);
      epoch_loss += batch_loss * static_cast<double>(batch.size());
      adam_update(model, grads, adam, cfg);
    }
    epoch_loss /= static_cast<double>(X.rows());
    if (!std::isfinite(epoch_loss))
      throw NonFiniteLossError("non-finite training loss at epoch " +
                               std::to_string(epoch));
    rep.train_loss.push_back(epoch_loss);

    if (X_val && y_val && X_val->rows() > 0) {
      const double vl = mlp_loss(model, *X_val, *y_val);
      rep.val_loss.push_back(vl);
      if (vl < best_val) {
        best_val = vl;
        best_model = model;
        best_epoch = epoch;
      }
    }
  }

  if (best_epoch >= 0) {
    rep.best_epoch = best_epoch;
    best_model.config = model.config;
    return best_model;
  }
  rep.best_epoch = cfg.epochs - 1;
  return model;
}

Matrix predict_mlp(const MlpModel& model, const Matrix& X) {
  if (X.cols() != model.feat_mean.size())
    throw ShapeMismatchError("feature count " + std::to_string(X.cols()) +
                             " != training feature count " +
                             std::to_string(model.feat_mean.size()));
  Matrix out(X.rows(), model.class_names.size());
  ForwardState fs;
  for (std::size_t r = 0; r < X.rows(); ++r) {
    forward_one(model, X.row(r), fs);
    std::copy(fs.probs.begin(), fs.probs.end(), out.row(r));
  }
  return out;
}

double mlp_loss(const MlpModel& model, const Matrix& X,
                const std::vector<int>& y) {
  if (X.rows() != y.size()) throw TrainError("X/y length mismatch");
  if (X.rows() == 0) throw TrainError("empty batch");
  ForwardState fs;
  double loss = 0.0;
  for (std::size_t r = 0; r < X.rows(); ++r) {
    forward_one(model, X.row(r), fs);
    loss -= std::log(std::max(fs.probs[static_cast<std::size_t>(y[r])],
                              kProbFloor));
  }
  return loss / static_cast<double>(X.rows());
}

std::vector<double> mlp_gradients(const MlpModel& model, const Matrix& X,
                                  const std::vector<int>& y) {
  if (X.rows() == 0) throw TrainError("empty batch");
  Gradients grads;
  grads.init_like(model);
  std::vector<std::size_t> rows(X.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  backward_batch(model, X, y, rows, grads);

  std::vector<double> flat;
  for (std::size_t l = 0; l < grads.dw.size(); ++l) {
    flat.insert(flat.end(), grads.dw[l].data().begin(),
                grads.dw[l].data().end());
    flat.insert(flat.end(), grads.db[l].begin(), grads.db[l].end());
  }
  return flat;
}

double grad_check(const MlpModel& model, const Matrix& X,
                  const std::vector<int>& y, std::uint64_t seed,
                  int n_probes) {
  const std::vector<double> analytic = mlp_gradients(model, X, y);

  // flat parameter view mirroring mlp_gradients' layout
  MlpModel probe = model;
  std::vector<double*> params;
  params.reserve(analytic.size());
  for (std::size_t l = 0; l < probe.weights.size(); ++l) {
    for (double& v : probe.weights[l].data()) params.push_back(&v);
    for (double& v : probe.biases[l]) params.push_back(&v);
  }

  constexpr double kStep = 1e-5;
  Rng rng(derive_seed(seed, 0xfd));
  double worst = 0.0;
  const int probes = std::min<int>(n_probes, static_cast<int>(params.size()));
  for (int i = 0; i < probes; ++i) {
    const std::size_t k = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(params.size()) - 1));
    const double saved = *params[k];
    *params[k] = saved + kStep;
    const double up = mlp_loss(probe, X, y);
    *params[k] = saved - kStep;
    const double down = mlp_loss(probe, X, y);
    *params[k] = saved;
    const double fd = (up - down) / (2.0 * kStep);
    const double bp = analytic[k];
    const double denom = std::max({std::abs(fd), std::abs(bp), 1e-6});
    worst = std::max(worst, std::abs(fd - bp) / denom);
  }
  return worst;
}

std::string mlp_to_json(const MlpModel& model) {
  json doc;
  doc["format"] = "bsbench.mlp";
  doc["version"] = 1;
  doc["config"] = {{"hidden", model.config.hidden},
                   {"epochs", model.config.epochs},
                   {"learning_rate", model.config.learning_rate},
                   {"batch_size", model.config.batch_size},
                   {"adam_beta1", model.config.adam_beta1},
                   {"adam_beta2", model.config.adam_beta2},
                   {"adam_eps", model.config.adam_eps},
                   {"seed", model.config.seed}};
  doc["classes"] = model.class_names;
  doc["feat_mean"] = model.feat_mean;
  doc["feat_std"] = model.feat_std;
  json layers = json::array();
  for (std::size_t l = 0; l < model.weights.size(); ++l)
    layers.push_back({{"rows", model.weights[l].rows()},
                      {"cols", model.weights[l].cols()},
                      {"w", model.weights[l].data()},
                      {"b", model.biases[l]}});
  doc["layers"] = std::move(layers);
  return doc.dump();
}

MlpModel mlp_from_json(const std::string& text) {
  json doc = json::parse(text);
  if (doc.value("format", "") != "bsbench.mlp")
    throw DataError("not an mlp model file");
  MlpModel model;
  const json& c = doc.at("config");
  model.config.hidden = c.at("hidden").get<std::vector<int>>();
  model.config.epochs = c.at("epochs").get<int>();
  model.config.learning_rate = c.at("learning_rate").get<double>();
  model.config.batch_size = c.at("batch_size").get<int>();
  model.config.adam_beta1 = c.at("adam_beta1").get<double>();
  model.config.adam_beta2 = c.at("adam_beta2").get<double>();
  model.config.adam_eps = c.at("adam_eps").get<double>();
  model.config.seed = c.at("seed").get<std::uint64_t>();
  model.class_names = doc.at("classes").get<std::vector<std::string>>();
  model.feat_mean = doc.at("feat_mean").get<std::vector<double>>();
  model.feat_std = doc.at("feat_std").get<std::vector<double>>();
  for (const json& lj : doc.at("layers")) {
    Matrix w(lj.at("rows").get<std::size_t>(), lj.at("cols").get<std::size_t>());
    w.data() = lj.at("w").get<std::vector<double>>();
    model.weights.push_back(std::move(w));
    model.biases.push_back(lj.at("b").get<std::vector<double>>());
  }
  return model;
}

}  // namespace bsb
