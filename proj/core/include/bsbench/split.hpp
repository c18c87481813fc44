#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bsbench/types.hpp"

namespace bsb {

struct TooFewSubjectsError : DataError {
  using DataError::DataError;
};

enum class SplitSet : int { Train = 0, Val = 1, Test = 2 };

inline constexpr int kNumSplits = 3;

std::string split_name(SplitSet s);
SplitSet parse_split(std::string_view name);

struct SplitRatio {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;

  double at(SplitSet s) const {
    switch (s) {
      case SplitSet::Train:
        return train;
      case SplitSet::Val:
        return val;
      default:
        return test;
    }
  }
  void validate() const;
};

// subject -> split, plus segment index lists per split (in input order).
struct SplitAssignment {
  std::map<std::string, SplitSet> subjects;
  std::vector<std::size_t> segment_indices[kNumSplits];
  SplitRatio ratio;
  std::uint64_t seed = 0;
};

// Greedy group-level iterative stratification: labels are processed from
// rarest to most frequent; each step assigns the unassigned subject holding
// the most segments of the current label to the split with the largest
// remaining demand for it, tie-broken by largest remaining total capacity,
// then by seeded draw. All segments of a subject travel together.
SplitAssignment stratified_group_split(const std::vector<SegmentInfo>& segments,
                                       const SplitRatio& ratio,
                                       std::uint64_t seed);

// JSON persistence with ratio and seed for provenance.
void write_split_json(const std::string& path, const SplitAssignment& split);
SplitAssignment read_split_json(const std::string& path,
                                const std::vector<SegmentInfo>& segments);

}  // namespace bsb
