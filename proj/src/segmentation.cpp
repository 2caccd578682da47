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

#include "rotorscope/segmentation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace rotorscope
{
namespace
{
class DisjointSets
{
public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t add()
  {
    parent_.push_back(parent_.size());
    return parent_.size() - 1;
  }

  std::size_t find(std::size_t a)
  {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  bool unite(std::size_t a, std::size_t b)
  {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

private:
  std::vector<std::size_t> parent_;
};

bool joinable(const Box & a, const Box & b, double alpha)
{
  const double dx = a.centroid_x() - b.centroid_x();
  const double dy = a.centroid_y() - b.centroid_y();
  const auto scale = std::max({a.width(), a.height(), b.width(), b.height()});
  return std::hypot(dx, dy) < alpha * static_cast<double>(scale);
}

}  // namespace

Box enclose(const Box & a, const Box & b)
{
  return {std::min(a.x_min, b.x_min), std::min(a.y_min, b.y_min), std::max(a.x_max, b.x_max),
          std::max(a.y_max, b.y_max)};
}

LabelGrid label_components(const RotorMask & mask)
{
  const auto w = mask.geometry.width;
  const auto h = mask.geometry.height;
  LabelGrid out{w, h, std::vector<std::int32_t>(mask.cells.size(), 0), 0};

  // first pass: provisional labels, equivalences from the already-visited neighbours
  DisjointSets sets(1);  // slot 0 unused
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      std::int32_t here = 0;
      auto visit = [&](std::int64_t nx, std::int64_t ny) {
        if (nx < 0 || nx >= w || ny < 0) return;
        const auto l = out.at(static_cast<std::uint32_t>(nx), static_cast<std::uint32_t>(ny));
        if (l == 0) return;
        if (here == 0) {
          here = l;
        } else {
          sets.unite(static_cast<std::size_t>(here), static_cast<std::size_t>(l));
        }
      };
      visit(std::int64_t{x} - 1, y);
      visit(std::int64_t{x} - 1, std::int64_t{y} - 1);
      visit(x, std::int64_t{y} - 1);
      visit(std::int64_t{x} + 1, std::int64_t{y} - 1);
      if (here == 0) here = static_cast<std::int32_t>(sets.add());
      out.labels[std::size_t{y} * w + x] = here;
    }
  }

  // second pass: dense relabel in raster order of first appearance
  std::vector<std::int32_t> dense;
  for (auto & l : out.labels) {
    if (l == 0) continue;
    const auto root = sets.find(static_cast<std::size_t>(l));
    if (root >= dense.size()) dense.resize(root + 1, 0);
    if (dense[root] == 0) dense[root] = static_cast<std::int32_t>(++out.count);
    l = dense[root];
  }
  return out;
}

std::vector<Box> extract_boxes(const LabelGrid & labels)
{
  std::vector<Box> boxes(labels.count);
  std::vector<bool> seen(labels.count, false);
  for (std::uint32_t y = 0; y < labels.height; ++y) {
    for (std::uint32_t x = 0; x < labels.width; ++x) {
      const auto l = labels.at(x, y);
      if (l == 0) continue;
      const auto i = static_cast<std::size_t>(l - 1);
      const auto xi = static_cast<std::int32_t>(x);
      const auto yi = static_cast<std::int32_t>(y);
      if (!seen[i]) {
        boxes[i] = {xi, yi, xi, yi};
        seen[i] = true;
      } else {
        boxes[i] = enclose(boxes[i], {xi, yi, xi, yi});
      }
    }
  }
  return boxes;
}

std::vector<Box> filter_boxes(std::span<const Box> boxes, std::size_t a_min)
{
  std::vector<Box> out;
  for (const auto & b : boxes) {
    if (b.area() >= static_cast<std::int64_t>(a_min)) out.push_back(b);
  }
  return out;
}

std::vector<Box> merge_boxes(std::span<const Box> boxes, double alpha)
{
  std::vector<Box> current(boxes.begin(), boxes.end());
  for (;;) {
    DisjointSets sets(current.size());
    bool merged = false;
    for (std::size_t i = 0; i < current.size(); ++i) {
      for (std::size_t j = i + 1; j < current.size(); ++j) {
        if (joinable(current[i], current[j], alpha)) merged |= sets.unite(i, j);
      }
    }
    if (!merged) break;
    std::vector<Box> next;
    std::vector<std::size_t> slot(current.size(), current.size());
    for (std::size_t i = 0; i < current.size(); ++i) {
      const auto root = sets.find(i);
      if (slot[root] == current.size()) {
        slot[root] = next.size();
        next.push_back(current[i]);
      } else {
        next[slot[root]] = enclose(next[slot[root]], current[i]);
      }
    }
    current = std::move(next);
  }
  std::sort(current.begin(), current.end(), [](const Box & a, const Box & b) {
    return std::tie(a.y_min, a.x_min, a.y_max, a.x_max) < std::tie(b.y_min, b.x_min, b.y_max, b.x_max);
  });
  return current;
}

}  // namespace rotorscope
