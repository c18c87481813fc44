#include "bsbench/split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "bsbench/rng.hpp"
#include "bsbench/wav.hpp"

namespace bsb {

using nlohmann::json;

std::string split_name(SplitSet s) {
  switch (s) {
    case SplitSet::Train:
      return "train";
    case SplitSet::Val:
      return "val";
    default:
      return "test";
  }
}

SplitSet parse_split(std::string_view name) {
  if (name == "train") return SplitSet::Train;
  if (name == "val") return SplitSet::Val;
  if (name == "test") return SplitSet::Test;
  throw DataError("unknown split name: " + std::string(name));
}

void SplitRatio::validate() const {
  if (!(train > 0.0) || !(val > 0.0) || !(test > 0.0))
    throw ConfigError("all split fractions must be > 0");
  if (std::abs(train + val + test - 1.0) > 1e-9)
    throw ConfigError("split fractions must sum to 1");
}

namespace {

struct SubjectStats {
  std::string id;
  std::size_t counts[kNumLabels] = {0, 0, 0, 0, 0};
  std::size_t total = 0;
};

}  // namespace

SplitAssignment stratified_group_split(const std::vector<SegmentInfo>& segments,
                                       const SplitRatio& ratio,
                                       std::uint64_t seed) {
  ratio.validate();

  // per-subject label profiles, subjects ordered by id for determinism
  std::map<std::string, SubjectStats> by_id;
  for (const SegmentInfo& seg : segments) {
    SubjectStats& st = by_id[seg.subject_id];
    st.id = seg.subject_id;
    ++st.counts[static_cast<int>(seg.label)];
    ++st.total;
  }
  if (by_id.size() < 3)
    throw TooFewSubjectsError("need >= 3 distinct subjects, got " +
                              std::to_string(by_id.size()));

  std::vector<SubjectStats> subjects;
  subjects.reserve(by_id.size());
  for (auto& [id, st] : by_id) subjects.push_back(std::move(st));

  std::size_t label_totals[kNumLabels] = {0, 0, 0, 0, 0};
  std::size_t grand_total = 0;
  for (const SubjectStats& st : subjects) {
    for (int l = 0; l < kNumLabels; ++l) label_totals[l] += st.counts[l];
    grand_total += st.total;
  }

  // labels present, rarest first; enum order breaks count ties
  std::vector<int> label_order;
  for (int l = 0; l < kNumLabels; ++l)
    if (label_totals[l] > 0) label_order.push_back(l);
  std::stable_sort(label_order.begin(), label_order.end(),
                   [&](int a, int b) { return label_totals[a] < label_totals[b]; });

  double demand[kNumSplits][kNumLabels];
  double capacity[kNumSplits];
  for (int s = 0; s < kNumSplits; ++s) {
    const double r = ratio.at(static_cast<SplitSet>(s));
    capacity[s] = r * static_cast<double>(grand_total);
    for (int l = 0; l < kNumLabels; ++l)
      demand[s][l] = r * static_cast<double>(label_totals[l]);
  }

  Rng rng(derive_seed(seed, 0x5714));
  std::vector<int> assignment(subjects.size(), -1);

  auto place = [&](std::size_t subj_idx, int split) {
    assignment[subj_idx] = split;
    const SubjectStats& st = subjects[subj_idx];
    for (int l = 0; l < kNumLabels; ++l)
      demand[split][l] -= static_cast<double>(st.counts[l]);
    capacity[split] -= static_cast<double>(st.total);
  };

  auto pick_split = [&](int label) {
    // largest remaining demand for the label, measured relative to the
    // split's share so that train/val/test fill proportionally; exhausted
    // demands (<= 0) count as tied and the capacity tie-break keeps the
    // split sizes on target
    std::vector<int> best;
    auto effective = [&](int s) {
      return std::max(demand[s][label], 0.0) /
             ratio.at(static_cast<SplitSet>(s));
    };
    for (int s = 0; s < kNumSplits; ++s) {
      if (best.empty()) {
        best.push_back(s);
        continue;
      }
      const double d = effective(s), db = effective(best.front());
      if (d > db + 1e-12) {
        best.assign(1, s);
      } else if (std::abs(d - db) <= 1e-12) {
        const double c = capacity[s], cb = capacity[best.front()];
        if (c > cb + 1e-12)
          best.assign(1, s);
        else if (std::abs(c - cb) <= 1e-12)
          best.push_back(s);
      }
    }
    if (best.size() > 1) {
      // among equal demands prefer the largest remaining capacity
      std::vector<int> widest;
      for (int s : best) {
        if (widest.empty() || capacity[s] > capacity[widest.front()] + 1e-12)
          widest.assign(1, s);
        else if (std::abs(capacity[s] - capacity[widest.front()]) <= 1e-12)
          widest.push_back(s);
      }
      best = widest;
    }
    return best.size() == 1
               ? best.front()
               : best[static_cast<std::size_t>(
                     rng.uniform_int(0, static_cast<int>(best.size()) - 1))];
  };

  for (int label : label_order) {
    for (;;) {
      // unassigned subject with the most segments of this label
      std::size_t best_subj = subjects.size();
      std::size_t best_count = 0;
      for (std::size_t i = 0; i < subjects.size(); ++i) {
        if (assignment[i] >= 0) continue;
        const std::size_t c = subjects[i].counts[label];
        if (c > best_count) {
          best_count = c;
          best_subj = i;
        }
      }
      if (best_subj == subjects.size()) break;
      place(best_subj, pick_split(label));
    }
  }
  // subjects with no labeled segments at all (cannot occur for non-empty
  // profiles, but keep the partition total)
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    if (assignment[i] >= 0) continue;
    int best = 0;
    for (int s = 1; s < kNumSplits; ++s)
      if (capacity[s] > capacity[best]) best = s;
    place(i, best);
  }

  // with very few subjects the greedy pass can starve a split; repair by
  // moving the lightest subject out of the most populated one
  for (;;) {
    std::size_t split_sizes[kNumSplits] = {0, 0, 0};
    for (int a : assignment) ++split_sizes[a];
    int empty = -1, fullest = 0;
    for (int s = 0; s < kNumSplits; ++s) {
      if (split_sizes[s] == 0) empty = s;
      if (split_sizes[s] > split_sizes[fullest]) fullest = s;
    }
    if (empty < 0 || split_sizes[fullest] < 2) break;
    std::size_t lightest = subjects.size();
    for (std::size_t i = 0; i < subjects.size(); ++i)
      if (assignment[i] == fullest &&
          (lightest == subjects.size() ||
           subjects[i].total < subjects[lightest].total))
        lightest = i;
    assignment[lightest] = empty;
  }

  SplitAssignment out;
  out.ratio = ratio;
  out.seed = seed;
  for (std::size_t i = 0; i < subjects.size(); ++i)
    out.subjects[subjects[i].id] = static_cast<SplitSet>(assignment[i]);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const SplitSet s = out.subjects.at(segments[i].subject_id);
    out.segment_indices[static_cast<int>(s)].push_back(i);
  }
  return out;
}

void write_split_json(const std::string& path, const SplitAssignment& split) {
  json doc;
  json assignments = json::object();
  for (const auto& [id, s] : split.subjects) assignments[id] = split_name(s);
  doc["assignments"] = assignments;
  doc["ratio"] = {{"train", split.ratio.train},
                  {"val", split.ratio.val},
                  {"test", split.ratio.test}};
  doc["seed"] = split.seed;
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot open for writing: " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw IoFailure("write failed: " + path);
}

SplitAssignment read_split_json(const std::string& path,
                                const std::vector<SegmentInfo>& segments) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  SplitAssignment out;
  try {
    for (const auto& [id, name] : doc.at("assignments").items())
      out.subjects[id] = parse_split(name.get<std::string>());
    out.ratio.train = doc.at("ratio").at("train").get<double>();
    out.ratio.val = doc.at("ratio").at("val").get<double>();
    out.ratio.test = doc.at("ratio").at("test").get<double>();
    out.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto it = out.subjects.find(segments[i].subject_id);
    if (it == out.subjects.end())
      throw DataError(path + ": subject not in split file: " +
                      segments[i].subject_id);
    out.segment_indices[static_cast<int>(it->second)].push_back(i);
  }
  return out;
}

}  // namespace bsb
