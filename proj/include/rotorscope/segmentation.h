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
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rotorscope/events.h"

namespace rotorscope
{
// Axis-aligned box with inclusive pixel bounds.
struct Box
{
  std::int32_t x_min{0};
  std::int32_t y_min{0};
  std::int32_t x_max{0};
  std::int32_t y_max{0};

  std::int64_t width() const { return std::int64_t{x_max} - x_min + 1; }
  std::int64_t height() const { return std::int64_t{y_max} - y_min + 1; }
  std::int64_t area() const { return width() * height(); }
  double centroid_x() const { return (static_cast<double>(x_min) + x_max) / 2.0; }
  double centroid_y() const { return (static_cast<double>(y_min) + y_max) / 2.0; }
  bool contains(const Box & o) const
  {
    return x_min <= o.x_min && y_min <= o.y_min && x_max >= o.x_max && y_max >= o.y_max;
  }
  bool operator==(const Box &) const = default;
};

Box enclose(const Box & a, const Box & b);

struct RotorMask
{
  SensorGeometry geometry;
  std::vector<std::uint8_t> cells;  // row-major, 1 = rotor

  explicit RotorMask(SensorGeometry g = {1, 1}) : geometry(g), cells(g.pixel_count(), 0) {}
  bool at(std::uint32_t x, std::uint32_t y) const { return cells[std::size_t{y} * geometry.width + x] != 0; }
  void set(std::uint32_t x, std::uint32_t y, bool v = true)
  {
    cells[std::size_t{y} * geometry.width + x] = v ? 1 : 0;
  }
};

struct LabelGrid
{
  std::uint32_t width{0};
  std::uint32_t height{0};
  std::vector<std::int32_t> labels;  // 0 = background, components 1..count
  std::size_t count{0};

  std::int32_t at(std::uint32_t x, std::uint32_t y) const { return labels[std::size_t{y} * width + x]; }
};

// 8-connected labelling (two-pass union-find). Labels are numbered in
// raster order of each component's first pixel.
LabelGrid label_components(const RotorMask & mask);

// Tight bounding box per label, in label order.
std::vector<Box> extract_boxes(const LabelGrid & labels);

// Keeps boxes with area >= a_min.
std::vector<Box> filter_boxes(std::span<const Box> boxes, std::size_t a_min);

/// Merges boxes whose centroid distance is < alpha * max(w1, h1, w2, h2).
/// Pairs satisfying the rule form a graph; each connected component is
/// replaced by its enclosing box, and the pass repeats until no pair
/// satisfies the rule. Output sorted by (y_min, x_min).
std::vector<Box> merge_boxes(std::span<const Box> boxes, double alpha);

}  // namespace rotorscope
