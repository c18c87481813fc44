#include "bsbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "bsbench/wav.hpp"

namespace bsb {

using nlohmann::json;

namespace {

void check_binary_inputs(const std::vector<double>& scores,
                         const std::vector<int>& labels, std::size_t& n_pos,
                         std::size_t& n_neg) {
  if (scores.size() != labels.size())
    throw LengthMismatchError("scores/labels length mismatch");
  n_pos = n_neg = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!std::isfinite(scores[i])) throw DataError("non-finite score");
    if (labels[i] == 1)
      ++n_pos;
    else if (labels[i] == 0)
      ++n_neg;
    else
      throw DataError("binary labels must be 0 or 1");
  }
  if (n_pos == 0 || n_neg == 0)
    throw SingleClassError("need both classes present");
}

}  // namespace

double roc_auc_binary(const std::vector<double>& scores,
                      const std::vector<int>& labels) {
  std::size_t n_pos, n_neg;
  check_binary_inputs(scores, labels, n_pos, n_neg);

  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  // rank sum of positives with average ranks over ties
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    // ranks are 1-based: the tie block [i, j] shares the mean rank
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k)
      if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) /
         (np * static_cast<double>(n_neg));
}

RocCurve roc_curve(const std::vector<double>& scores,
                   const std::vector<int>& labels) {
  std::size_t n_pos, n_neg;
  check_binary_inputs(scores, labels, n_pos, n_neg);

  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0, fp = 0, i = 0;
  while (i < n) {
    const double threshold = scores[order[i]];
    std::size_t j = i;
    while (j < n && scores[order[j]] == threshold) {
      if (labels[order[j]] == 1)
        ++tp;
      else
        ++fp;
      ++j;
    }
    curve.points.push_back({static_cast<double>(fp) / n_neg,
                            static_cast<double>(tp) / n_pos, threshold});
    i = j;
  }
  return curve;
}

double roc_curve_area(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const RocPoint& a = curve.points[i - 1];
    const RocPoint& b = curve.points[i];
    area += (b.fpr - a.fpr) * 0.5 * (a.tpr + b.tpr);
  }
  return area;
}

AucReport macro_ovr_auc(const Matrix& probs, const std::vector<int>& labels,
                        const std::vector<std::string>& class_names) {
  const std::size_t n_classes = class_names.size();
  if (probs.cols() != n_classes)
    throw ShapeMismatchError("probability columns != class count");
  if (probs.rows() != labels.size())
    throw LengthMismatchError("probs/labels length mismatch");

  AucReport report;
  report.class_names = class_names;
  report.auc_per_class.assign(n_classes, 0.0);
  report.present.assign(n_classes, false);
  report.n_per_class.assign(n_classes, 0);

  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= n_classes)
      throw DataError("label index out of range");
    ++report.n_per_class[static_cast<std::size_t>(label)];
  }
  std::size_t distinct = 0;
  for (std::size_t c = 0; c < n_classes; ++c)
    distinct += report.n_per_class[c] > 0 ? 1 : 0;
  if (distinct < 2)
    throw NoClassPresentError(
        "one-vs-rest needs at least two classes in the labels");

  double macro_sum = 0.0;
  std::size_t macro_n = 0;
  std::vector<double> scores(labels.size());
  std::vector<int> ovr(labels.size());
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (report.n_per_class[c] == 0) continue;
    for (std::size_t r = 0; r < labels.size(); ++r) {
      scores[r] = probs(r, c);
      ovr[r] = labels[r] == static_cast<int>(c) ? 1 : 0;
    }
    report.auc_per_class[c] = roc_auc_binary(scores, ovr);
    report.present[c] = true;
    macro_sum += report.auc_per_class[c];
    ++macro_n;
  }
  report.macro = macro_sum / static_cast<double>(macro_n);
  return report;
}

Matrix confusion(const std::vector<int>& predicted,
                 const std::vector<int>& labels, std::size_t n_classes) {
  if (predicted.size() != labels.size())
    throw LengthMismatchError("predicted/labels length mismatch");
  Matrix m(n_classes, n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= n_classes ||
        predicted[i] < 0 || static_cast<std::size_t>(predicted[i]) >= n_classes)
      throw DataError("class index out of range");
    m(static_cast<std::size_t>(labels[i]),
      static_cast<std::size_t>(predicted[i])) += 1.0;
  }
  return m;
}

std::string auc_report_to_json(const AucReport& report) {
  json doc;
  doc["task"] = report.task;
  doc["model"] = report.model;
  doc["features"] = report.features;
  doc["split"] = report.split;
  json aucs = json::object();
  json counts = json::object();
  for (std::size_t c = 0; c < report.class_names.size(); ++c) {
    if (report.present[c])
      aucs[report.class_names[c]] = report.auc_per_class[c];
    else
      aucs[report.class_names[c]] = nullptr;
    counts[report.class_names[c]] = report.n_per_class[c];
  }
  doc["auc_per_class"] = std::move(aucs);
  doc["auc_macro"] = report.macro;
  doc["n_per_class"] = std::move(counts);
  return doc.dump(2);
}

AucReport auc_report_from_json(const std::string& text) {
  json doc = json::parse(text);
  AucReport report;
  report.task = doc.at("task").get<std::string>();
  report.model = doc.at("model").get<std::string>();
  report.features = doc.value("features", "");
  report.split = doc.at("split").get<std::string>();
  report.macro = doc.at("auc_macro").get<double>();
  for (const auto& [name, value] : doc.at("auc_per_class").items()) {
    report.class_names.push_back(name);
    report.present.push_back(!value.is_null());
    report.auc_per_class.push_back(value.is_null() ? 0.0
                                                   : value.get<double>());
    report.n_per_class.push_back(
        doc.at("n_per_class").at(name).get<std::size_t>());
  }
  return report;
}

namespace {

std::string auc_cell(const AucReport& report, const std::string& class_name) {
  for (std::size_t c = 0; c < report.class_names.size(); ++c) {
    if (report.class_names[c] != class_name) continue;
    if (!report.present[c]) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", report.auc_per_class[c]);
    return buf;
  }
  return "n/a";
}

}  // namespace

void write_table_csv(const std::string& path,
                     const std::vector<AucReport>& reports) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot open for writing: " + path);
  out << "model,features,None,SB,MB,CRS,HS,macro\n";
  char buf[32];
  for (const AucReport& r : reports) {
    out << r.model << "," << r.features;
    for (const char* cls : {"None", "SB", "MB", "CRS", "HS"})
      out << "," << auc_cell(r, cls);
    std::snprintf(buf, sizeof(buf), "%.6f", r.macro);
    out << "," << buf << "\n";
  }
  if (!out) throw IoFailure("write failed: " + path);
}

void write_roc_csv(const std::string& path,
                   const std::vector<LabeledRocCurve>& curves) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot open for writing: " + path);
  out << "model,features,task,split,class,fpr,tpr,threshold\n";
  char buf[96];
  for (const LabeledRocCurve& c : curves) {
    for (const RocPoint& p : c.curve.points) {
      std::snprintf(buf, sizeof(buf), "%.9f,%.9f,%.9g", p.fpr, p.tpr,
                    p.threshold);
      out << c.model << "," << c.features << "," << c.task << "," << c.split
          << "," << c.class_name << "," << buf << "\n";
    }
  }
  if (!out) throw IoFailure("write failed: " + path);
}

}  // namespace bsb
