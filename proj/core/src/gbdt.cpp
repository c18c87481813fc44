#include "bsbench/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

namespace bsb {

using nlohmann::json;

void GbdtConfig::validate() const {
  if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (n_iterations < 0) throw ConfigError("n_iterations must be >= 0");
  if (n_bins < 2 || n_bins > 256) throw ConfigError("n_bins must be in [2, 256]");
  if (!(l2_lambda >= 0.0)) throw ConfigError("l2_lambda must be >= 0");
  if (!(min_child_weight >= 0.0))
    throw ConfigError("min_child_weight must be >= 0");
}

namespace gbdt_detail {

BinnedData bin_features(const Matrix& X, int n_bins) {
  BinnedData out;
  out.n_rows = X.rows();
  out.features.resize(X.cols());

  std::vector<double> values(X.rows());
  for (std::size_t f = 0; f < X.cols(); ++f) {
    for (std::size_t r = 0; r < X.rows(); ++r) values[r] = X(r, f);
    std::vector<double> uniq(values);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

    // candidate cut edges: midpoints between consecutive distinct values,
    // thinned to quantile positions when there are too many
    std::vector<double> edges;
    const std::size_t n_cuts = uniq.size() - 1;
    if (n_cuts + 1 <= static_cast<std::size_t>(n_bins)) {
      for (std::size_t i = 0; i < n_cuts; ++i)
        edges.push_back(0.5 * (uniq[i] + uniq[i + 1]));
    } else {
      std::vector<double> sorted(values);
      std::sort(sorted.begin(), sorted.end());
      std::set<double> chosen;
      for (int b = 1; b < n_bins; ++b) {
        const std::size_t rank = b * sorted.size() / n_bins;
        const double v = sorted[rank];
        // cut just below the rank value
        const auto it =
            std::lower_bound(uniq.begin(), uniq.end(), v) - uniq.begin();
        if (it > 0) chosen.insert(0.5 * (uniq[it - 1] + uniq[it]));
      }
      edges.assign(chosen.begin(), chosen.end());
    }

    BinnedFeature& bf = out.features[f];
    bf.upper_edge = edges;
    bf.upper_edge.push_back(std::numeric_limits<double>::infinity());
    bf.bin_of_row.resize(X.rows());
    for (std::size_t r = 0; r < X.rows(); ++r) {
      const auto it =
          std::lower_bound(edges.begin(), edges.end(), values[r]);
      bf.bin_of_row[r] = static_cast<std::uint16_t>(it - edges.begin());
    }
  }
  return out;
}

namespace {

inline double leaf_objective(double g, double h, double lambda) {
  return g * g / (h + lambda);
}

}  // namespace

SplitDecision find_best_split(const BinnedData& data,
                              const std::vector<double>& grad,
                              const std::vector<double>& hess,
                              const std::vector<std::uint32_t>& rows,
                              const GbdtConfig& cfg) {
  double g_total = 0.0, h_total = 0.0;
  for (std::uint32_t r : rows) {
    g_total += grad[r];
    h_total += hess[r];
  }
  const double parent = leaf_objective(g_total, h_total, cfg.l2_lambda);

  SplitDecision best;
  std::vector<double> gh(0), hh(0);
  for (std::size_t f = 0; f < data.features.size(); ++f) {
    const BinnedFeature& bf = data.features[f];
    const std::size_t n_b = bf.upper_edge.size();
    if (n_b < 2) continue;
    gh.assign(n_b, 0.0);
    hh.assign(n_b, 0.0);
    for (std::uint32_t r : rows) {
      gh[bf.bin_of_row[r]] += grad[r];
      hh[bf.bin_of_row[r]] += hess[r];
    }
    double g_left = 0.0, h_left = 0.0;
    for (std::size_t b = 0; b + 1 < n_b; ++b) {
      g_left += gh[b];
      h_left += hh[b];
      const double g_right = g_total - g_left;
      const double h_right = h_total - h_left;
      if (h_left < cfg.min_child_weight || h_right < cfg.min_child_weight)
        continue;
      const double gain =
          0.5 * (leaf_objective(g_left, h_left, cfg.l2_lambda) +
                 leaf_objective(g_right, h_right, cfg.l2_lambda) - parent);
      if (gain > best.gain + 1e-12 ||
          (!best.valid && gain > 1e-12)) {
        best.valid = true;
        best.feature = static_cast<int>(f);
        best.bin = static_cast<int>(b);
        best.threshold = bf.upper_edge[b];
        best.gain = gain;
      }
    }
  }
  return best;
}

}  // namespace gbdt_detail

namespace {

using gbdt_detail::BinnedData;
using gbdt_detail::SplitDecision;

GbdtTree build_tree(const BinnedData& data, const std::vector<double>& grad,
                    const std::vector<double>& hess, const GbdtConfig& cfg) {
  GbdtTree tree;

  struct Work {
    int node;
    int depth;
    std::vector<std::uint32_t> rows;
  };
  std::vector<Work> stack;

  std::vector<std::uint32_t> all(data.n_rows);
  for (std::size_t r = 0; r < data.n_rows; ++r)
    all[r] = static_cast<std::uint32_t>(r);
  tree.nodes.emplace_back();
  stack.push_back({0, 0, std::move(all)});

  while (!stack.empty()) {
    Work w = std::move(stack.back());
    stack.pop_back();

    double g = 0.0, h = 0.0;
    for (std::uint32_t r : w.rows) {
      g += grad[r];
      h += hess[r];
    }

    SplitDecision split;
    if (w.depth < cfg.max_depth)
      split = gbdt_detail::find_best_split(data, grad, hess, w.rows, cfg);

    if (!split.valid) {
      tree.nodes[w.node].feature = -1;
      tree.nodes[w.node].value =
          -g / (h + cfg.l2_lambda) * cfg.learning_rate;
      continue;
    }

    const auto& bf = data.features[split.feature];
    std::vector<std::uint32_t> left_rows, right_rows;
    for (std::uint32_t r : w.rows) {
      if (bf.bin_of_row[r] <= static_cast<std::uint16_t>(split.bin))
        left_rows.push_back(r);
      else
        right_rows.push_back(r);
    }

    GbdtNode& node = tree.nodes[w.node];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = static_cast<int>(tree.nodes.size());
    node.right = node.left + 1;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    const int left_id = tree.nodes[w.node].left;
    const int right_id = tree.nodes[w.node].right;
    stack.push_back({right_id, w.depth + 1, std::move(right_rows)});
    stack.push_back({left_id, w.depth + 1, std::move(left_rows)});
  }
  return tree;
}

double tree_score(const GbdtTree& tree, const double* x) {
  int node = 0;
  while (tree.nodes[node].feature >= 0) {
    const GbdtNode& n = tree.nodes[node];
    node = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return tree.nodes[node].value;
}

void softmax_row(std::vector<double>& z) {
  double zmax = z[0];
  for (double v : z) zmax = std::max(zmax, v);
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

void check_features(const Matrix& X) {
  for (double v : X.data())
    if (!std::isfinite(v))
      throw NonFiniteFeatureError("non-finite feature value");
}

}  // namespace

GbdtModel train_gbdt(const Matrix& X, const std::vector<int>& y,
                     const std::vector<std::string>& class_names,
                     const GbdtConfig& cfg) {
  cfg.validate();
  if (X.rows() != y.size()) throw TrainError("X/y length mismatch");
  if (X.rows() == 0) throw DegenerateDataError("no training rows");
  check_features(X);

  const std::size_t n = X.rows();
  const std::size_t n_classes = class_names.size();
  std::vector<std::size_t> counts(n_classes, 0);
  for (int label : y) {
    if (label < 0 || static_cast<std::size_t>(label) >= n_classes)
      throw TrainError("label index out of range");
    ++counts[label];
  }
  std::size_t present = 0;
  for (std::size_t c : counts) present += c > 0 ? 1 : 0;
  if (present < 2)
    throw DegenerateDataError("training data contains a single class");

  GbdtModel model;
  model.config = cfg;
  model.n_features = X.cols();
  model.class_names = class_names;
  model.base_scores.resize(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    // empty classes get a tiny pseudo-count so the prior stays finite
    const double p = counts[c] > 0
                         ? static_cast<double>(counts[c]) / n
                         : 0.5 / n;
    model.base_scores[c] = std::log(p);
  }

  const BinnedData binned = gbdt_detail::bin_features(X, cfg.n_bins);

  Matrix margins(n, n_classes);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n_classes; ++c)
      margins(r, c) = model.base_scores[c];

  std::vector<double> grad(n), hess(n), probs(n_classes);
  for (int round = 0; round < cfg.n_iterations; ++round) {
    // probability snapshot at the start of the round
    Matrix p(n, n_classes);
    for (std::size_t r = 0; r < n; ++r) {
      probs.assign(margins.row(r), margins.row(r) + n_classes);
      softmax_row(probs);
      std::copy(probs.begin(), probs.end(), p.row(r));
    }

    std::vector<GbdtTree> trees;
    trees.reserve(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
      for (std::size_t r = 0; r < n; ++r) {
        const double pc = p(r, c);
        grad[r] = pc - (y[r] == static_cast<int>(c) ? 1.0 : 0.0);
        hess[r] = pc * (1.0 - pc);
      }
      trees.push_back(build_tree(binned, grad, hess, cfg));
    }
    for (std::size_t c = 0; c < n_classes; ++c)
      for (std::size_t r = 0; r < n; ++r)
        margins(r, c) += tree_score(trees[c], X.row(r));
    model.rounds.push_back(std::move(trees));
  }
  return model;
}

Matrix predict_gbdt(const GbdtModel& model, const Matrix& X) {
  const std::size_t n_classes = model.class_names.size();
  if (X.cols() != model.n_features)
    throw ShapeMismatchError("feature count " + std::to_string(X.cols()) +
                             " != training feature count " +
                             std::to_string(model.n_features));
  if (X.rows() == 0) return Matrix(0, n_classes);
  check_features(X);

  Matrix out(X.rows(), n_classes);
  std::vector<double> z(n_classes);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const double* x = X.row(r);
    for (std::size_t c = 0; c < n_classes; ++c) z[c] = model.base_scores[c];
    for (const auto& round : model.rounds)
      for (std::size_t c = 0; c < n_classes; ++c)
        z[c] += tree_score(round[c], x);
    softmax_row(z);
    // keep every probability strictly inside (0, 1)
    double sum = 0.0;
    for (double& v : z) {
      v = std::clamp(v, 1e-15, 1.0 - 1e-15);
      sum += v;
    }
    for (std::size_t c = 0; c < n_classes; ++c) out(r, c) = z[c] / sum;
  }
  return out;
}

std::string gbdt_to_json(const GbdtModel& model) {
  json doc;
  doc["format"] = "bsbench.gbdt";
  doc["version"] = 1;
  doc["config"] = {{"max_depth", model.config.max_depth},
                   {"learning_rate", model.config.learning_rate},
                   {"n_iterations", model.config.n_iterations},
                   {"n_bins", model.config.n_bins},
                   {"l2_lambda", model.config.l2_lambda},
                   {"min_child_weight", model.config.min_child_weight},
                   {"seed", model.config.seed}};
  doc["n_features"] = model.n_features;
  doc["classes"] = model.class_names;
  doc["base_scores"] = model.base_scores;
  json rounds = json::array();
  for (const auto& round : model.rounds) {
    json trees = json::array();
    for (const GbdtTree& tree : round) {
      json nodes = json::array();
      for (const GbdtNode& n : tree.nodes)
        nodes.push_back({{"f", n.feature},
                         {"t", n.threshold},
                         {"l", n.left},
                         {"r", n.right},
                         {"v", n.value}});
      trees.push_back(std::move(nodes));
    }
    rounds.push_back(std::move(trees));
  }
  doc["rounds"] = std::move(rounds);
  return doc.dump();
}

GbdtModel gbdt_from_json(const std::string& text) {
  json doc = json::parse(text);
  if (doc.value("format", "") != "bsbench.gbdt")
    throw DataError("not a gbdt model file");
  GbdtModel model;
  const json& c = doc.at("config");
  model.config.max_depth = c.at("max_depth").get<int>();
  model.config.learning_rate = c.at("learning_rate").get<double>();
  model.config.n_iterations = c.at("n_iterations").get<int>();
  model.config.n_bins = c.at("n_bins").get<int>();
  model.config.l2_lambda = c.at("l2_lambda").get<double>();
  model.config.min_child_weight = c.at("min_child_weight").get<double>();
  model.config.seed = c.at("seed").get<std::uint64_t>();
  model.n_features = doc.at("n_features").get<std::size_t>();
  model.class_names = doc.at("classes").get<std::vector<std::string>>();
  model.base_scores = doc.at("base_scores").get<std::vector<double>>();
  for (const json& round : doc.at("rounds")) {
    std::vector<GbdtTree> trees;
    for (const json& tj : round) {
      GbdtTree tree;
      for (const json& nj : tj) {
        GbdtNode n;
        n.feature = nj.at("f").get<int>();
        n.threshold = nj.at("t").get<double>();
        n.left = nj.at("l").get<int>();
        n.right = nj.at("r").get<int>();
        n.value = nj.at("v").get<double>();
        tree.nodes.push_back(n);
      }
      trees.push_back(std::move(tree));
    }
    model.rounds.push_back(std::move(trees));
  }
  return model;
}

}  // namespace bsb
