// Copyright 2026 The rotorscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "rotorscope/box_io.h"
#include "rotorscope/segmentation.h"

namespace rotorscope
{
struct MatchReport
{
  std::size_t tp{0};
  std::size_t fp{0};
  std::size_t fn{0};
  double precision{0.0};
  double recall{0.0};
  double f1{0.0};

  // Recomputes precision/recall/f1 from the counts (0 on empty denominators).
  static MatchReport from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
  MatchReport & operator+=(const MatchReport & other);
};

struct LatencyStats
{
  double median_ms{0.0};
  double iqr_ms{0.0};
  double p95_ms{0.0};
  std::size_t n{0};
};

// Intersection over union with inclusive pixel bounds.
double iou(const Box & a, const Box & b);

/// Greedy one-to-one matching of one window's boxes: candidate pairs with
/// IoU >= iou_thresh are taken in descending IoU order, ties broken by
/// (pred index, gt index).
MatchReport match_and_score(std::span<const Box> preds, std::span<const Box> gts, double iou_thresh = 0.5);

// Per-window matching, counts summed over all windows present in either
// input, then P/R/F1 computed once.
MatchReport score_windows(
  const std::vector<WindowBoxes> & preds, const std::vector<WindowBoxes> & gts, double iou_thresh = 0.5);

// Linear interpolation between order statistics at position q*(n-1).
double quantile(std::span<const double> sorted, double q);

// throws ContractViolation on an empty sample
LatencyStats latency_summary(std::span<const double> samples_ms);

nlohmann::json to_json(const MatchReport & r);
nlohmann::json to_json(const LatencyStats & s);

}  // namespace rotorscope
