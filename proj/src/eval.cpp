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

#include "rotorscope/eval.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "rotorscope/errors.h"

namespace rotorscope
{
MatchReport MatchReport::from_counts(std::size_t tp, std::size_t fp, std::size_t fn)
{
  MatchReport r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  const auto d = [](std::size_t a, std::size_t b) { return static_cast<double>(a + b); };
  r.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / d(tp, fp);
  r.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / d(tp, fn);
  r.f1 = r.precision + r.recall == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

MatchReport & MatchReport::operator+=(const MatchReport & other)
{
  *this = from_counts(tp + other.tp, fp + other.fp, fn + other.fn);
  return *this;
}

double iou(const Box & a, const Box & b)
{
  const auto ix = std::int64_t{std::min(a.x_max, b.x_max)} - std::max(a.x_min, b.x_min) + 1;
  const auto iy = std::int64_t{std::min(a.y_max, b.y_max)} - std::max(a.y_min, b.y_min) + 1;
  if (ix <= 0 || iy <= 0) return 0.0;
  const auto inter = ix * iy;
  return static_cast<double>(inter) / static_cast<double>(a.area() + b.area() - inter);
}

MatchReport match_and_score(std::span<const Box> preds, std::span<const Box> gts, double iou_thresh)
{
  struct Pair
  {
    double iou;
    std::size_t pred;
    std::size_t gt;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) {
      const double v = iou(preds[i], gts[j]);
      if (v >= iou_thresh && v > 0.0) pairs.push_back({v, i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair & a, const Pair & b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    return std::tie(a.pred, a.gt) < std::tie(b.pred, b.gt);
  });
  std::vector<bool> pred_used(preds.size(), false);
  std::vector<bool> gt_used(gts.size(), false);
  std::size_t tp = 0;
  for (const auto & p : pairs) {
    if (pred_used[p.pred] || gt_used[p.gt]) continue;
    pred_used[p.pred] = gt_used[p.gt] = true;
    ++tp;
  }
  return MatchReport::from_counts(tp, preds.size() - tp, gts.size() - tp);
}

MatchReport score_windows(
  const std::vector<WindowBoxes> & preds, const std::vector<WindowBoxes> & gts, double iou_thresh)
{
  std::map<std::size_t, std::pair<std::vector<Box>, std::vector<Box>>> by_window;
  for (const auto & r : preds) {
    auto & slot = by_window[r.window].first;
    slot.insert(slot.end(), r.boxes.begin(), r.boxes.end());
  }
  for (const auto & r : gts) {
    auto & slot = by_window[r.window].second;
    slot.insert(slot.end(), r.boxes.begin(), r.boxes.end());
  }
  MatchReport total;
  for (const auto & [window, boxes] : by_window) {
    total += match_and_score(boxes.first, boxes.second, iou_thresh);
  }
  return total;
}

double quantile(std::span<const double> sorted, double q)
{
  if (sorted.empty()) throw ContractViolation("quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

LatencyStats latency_summary(std::span<const double> samples_ms)
{
  if (samples_ms.empty()) throw ContractViolation("latency summary of an empty sample");
  std::vector<double> s(samples_ms.begin(), samples_ms.end());
  std::sort(s.begin(), s.end());
  LatencyStats out;
  out.n = s.size();
  out.median_ms = quantile(s, 0.5);
  out.iqr_ms = quantile(s, 0.75) - quantile(s, 0.25);
  out.p95_ms = quantile(s, 0.95);
  return out;
}

nlohmann::json to_json(const MatchReport & r)
{
  return {{"tp", r.tp}, {"fp", r.fp}, {"fn", r.fn},
          {"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1}};
}

nlohmann::json to_json(const LatencyStats & s)
{
  return {{"median_ms", s.median_ms}, {"iqr_ms", s.iqr_ms}, {"p95_ms", s.p95_ms}, {"n", s.n}};
}

}  // namespace rotorscope
