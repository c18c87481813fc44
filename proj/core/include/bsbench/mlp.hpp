#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsbench/matrix.hpp"
#include "bsbench/types.hpp"

namespace bsb {

struct NonFiniteLossError : TrainError {
  using TrainError::TrainError;
};

// ReLU hidden layers, softmax output, cross-entropy loss, Adam.
struct MlpConfig {
  std::vector<int> hidden = {128, 64};
  int epochs = 20;
  double learning_rate = 1e-4;
  int batch_size = 32;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct MlpModel {
  MlpConfig config;
  std::vector<std::string> class_names;
  // layer l maps in -> out: weights[l] is [out x in]
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
  // per-column standardization fitted on the training rows only
  std::vector<double> feat_mean;
  std::vector<double> feat_std;
};

struct TrainReport {
  std::vector<double> train_loss;  // mean cross-entropy per epoch
  std::vector<double> val_loss;    // present when a validation set is given
  int best_epoch = -1;  // epoch whose weights the model carries (0-based)
};

// Hidden layers He-uniform initialized, output layer zero-initialized so
// that class order carries no initialization bias. When a validation set is
// given, the weights from the epoch with the lowest validation loss are
// restored at the end. Deterministic given cfg.seed.
MlpModel train_mlp(const Matrix& X, const std::vector<int>& y,
                   const std::vector<std::string>& class_names,
                   const MlpConfig& cfg, TrainReport* report = nullptr,
                   const Matrix* X_val = nullptr,
                   const std::vector<int>* y_val = nullptr);

// Untrained model with identity standardization; gradient-check fodder.
MlpModel init_mlp(std::size_t n_features,
                  const std::vector<std::string>& class_names,
                  const MlpConfig& cfg);

// Probability matrix [n x C]; rows sum to 1.
Matrix predict_mlp(const MlpModel& model, const Matrix& X);

// Mean cross-entropy of a batch; exposed for the finite-difference check.
double mlp_loss(const MlpModel& model, const Matrix& X,
                const std::vector<int>& y);

// Backprop gradients of the mean loss, flattened layer by layer (weights
// row-major, then biases).
std::vector<double> mlp_gradients(const MlpModel& model, const Matrix& X,
                                  const std::vector<int>& y);

// Max relative disagreement between backprop and central finite differences
// (step 1e-5) over a seeded sample of at least `n_probes` parameters.
double grad_check(const MlpModel& model, const Matrix& X,
                  const std::vector<int>& y, std::uint64_t seed,
                  int n_probes = 120);

std::string mlp_to_json(const MlpModel& model);
MlpModel mlp_from_json(const std::string& text);

}  // namespace bsb
