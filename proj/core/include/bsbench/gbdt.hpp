#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsbench/matrix.hpp"
#include "bsbench/types.hpp"

namespace bsb {

struct DegenerateDataError : TrainError {
  using TrainError::TrainError;
};
struct NonFiniteFeatureError : TrainError {
  using TrainError::TrainError;
};

// Histogram gradient boosting with a softmax objective: one regression tree
// per class per round, second-order gain, leaf weight -G/(H+lambda) shrunk
// by the learning rate. Defaults follow the reproduced training recipe.
struct GbdtConfig {
  int max_depth = 7;
  double learning_rate = 0.001;
  int n_iterations = 50;
  int n_bins = 256;
  double l2_lambda = 1.0;
  double min_child_weight = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GbdtNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // x[feature] <= threshold goes left
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf weight, shrinkage already applied
};

struct GbdtTree {
  std::vector<GbdtNode> nodes;  // nodes[0] is the root
};

struct GbdtModel {
  GbdtConfig config;
  std::size_t n_features = 0;
  std::vector<std::string> class_names;
  std::vector<double> base_scores;  // per-class log prior
  std::vector<std::vector<GbdtTree>> rounds;  // [round][class]
};

// y holds class indices aligned with class_names. Deterministic given
// (X, y, cfg); bins come from per-feature quantiles of X.
GbdtModel train_gbdt(const Matrix& X, const std::vector<int>& y,
                     const std::vector<std::string>& class_names,
                     const GbdtConfig& cfg);

// Probability matrix [n x C]; rows sum to 1.
Matrix predict_gbdt(const GbdtModel& model, const Matrix& X);

std::string gbdt_to_json(const GbdtModel& model);
GbdtModel gbdt_from_json(const std::string& text);

// --- internals exposed for oracle tests --------------------------------

namespace gbdt_detail {

struct BinnedFeature {
  std::vector<std::uint16_t> bin_of_row;
  // upper value edge per bin; going left means raw value <= edge
  std::vector<double> upper_edge;
};

struct BinnedData {
  std::vector<BinnedFeature> features;
  std::size_t n_rows = 0;
};

BinnedData bin_features(const Matrix& X, int n_bins);

struct SplitDecision {
  bool valid = false;
  int feature = -1;
  int bin = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Best gain over all (feature, bin) cuts for the given row set, honoring
// l2_lambda and min_child_weight; valid only when gain > 0.
SplitDecision find_best_split(const BinnedData& data,
                              const std::vector<double>& grad,
                              const std::vector<double>& hess,
                              const std::vector<std::uint32_t>& rows,
                              const GbdtConfig& cfg);

}  // namespace gbdt_detail

}  // namespace bsb
