#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsbench/matrix.hpp"
#include "bsbench/types.hpp"

namespace bsb {

struct SingleClassError : DataError {
  using DataError::DataError;
};
struct NoClassPresentError : DataError {
  using DataError::DataError;
};
struct LengthMismatchError : DataError {
  using DataError::DataError;
};

// Probability that a random positive outranks a random negative, ties
// counted half (rank-sum form). labels are 0/1.
double roc_auc_binary(const std::vector<double>& scores,
                      const std::vector<int>& labels);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

// Threshold sweep over distinct scores, descending; first point is (0,0).
// Trapezoidal area equals roc_auc_binary exactly.
struct RocCurve {
  std::vector<RocPoint> points;
};

RocCurve roc_curve(const std::vector<double>& scores,
                   const std::vector<int>& labels);

double roc_curve_area(const RocCurve& curve);

// One-vs-rest per-class AUC report; classes with zero support are carried
// as absent (not zero) and excluded from the macro mean.
struct AucReport {
  std::string task;   // "binary" | "five-class"
  std::string model;  // e.g. "gbdt[tuned]"
  std::string features;
  std::string split;  // "train" | "val" | "test"
  std::vector<std::string> class_names;
  std::vector<double> auc_per_class;   // valid where present[i]
  std::vector<bool> present;
  std::vector<std::size_t> n_per_class;
  double macro = 0.0;
};

// probs columns align with class_names; labels index class_names.
AucReport macro_ovr_auc(const Matrix& probs, const std::vector<int>& labels,
                        const std::vector<std::string>& class_names);

// rows = true class, columns = predicted class.
Matrix confusion(const std::vector<int>& predicted,
                 const std::vector<int>& labels, std::size_t n_classes);

// `{task, model, split, auc_per_class:{...}, auc_macro, n_per_class:{...}}`
// with null for absent classes.
std::string auc_report_to_json(const AucReport& report);
AucReport auc_report_from_json(const std::string& text);

// CSV with columns model,features,None,SB,MB,CRS,HS,macro; absent or
// inapplicable cells rendered as "n/a".
void write_table_csv(const std::string& path,
                     const std::vector<AucReport>& reports);

struct LabeledRocCurve {
  std::string task, model, features, split, class_name;
  RocCurve curve;
};

// Plot-data CSV: model,features,task,split,class,fpr,tpr,threshold.
void write_roc_csv(const std::string& path,
                   const std::vector<LabeledRocCurve>& curves);

}  // namespace bsb
