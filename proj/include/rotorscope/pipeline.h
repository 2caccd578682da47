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
#include <functional>
#include <span>
#include <vector>

#include "rotorscope/eval.h"
#include "rotorscope/events.h"
#include "rotorscope/fingerprint.h"
#include "rotorscope/params.h"
#include "rotorscope/segmentation.h"

namespace rotorscope
{
struct RotorPixel
{
  std::uint16_t x{0};
  std::uint16_t y{0};
  double f_hz{0.0};
  bool operator==(const RotorPixel &) const = default;
};

struct Detection
{
  std::size_t window_index{0};
  std::vector<Box> boxes;            // final, merged
  std::vector<Box> components;       // one per 8-connected mask component, before filtering
  std::vector<RotorPixel> freq_map;  // rotor pixels in linear-index order
  double latency_ms{0.0};
};

struct StreamResult
{
  std::vector<Detection> detections;
  LatencyStats latency;
};

// Runs fn(i) for i in [0, n) on up to `workers` threads; workers == 1 runs inline.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)> & fn);

// ndft -> power spectrum -> classify, for one pixel group.
PixelVerdict classify_group(const PixelGroup & group, const DetectorParams & params, timestamp_us t_len);

struct Segmentation
{
  std::vector<Box> components;
  std::vector<Box> boxes;
};

// label -> extract -> filter(A_min) -> merge(alpha)
Segmentation segment_mask(const RotorMask & mask, const DetectorParams & params);

/// Owns the per-run configuration. Per-pixel classification is spread over
/// a worker count fixed at construction (0 = hardware concurrency); verdicts
/// are gathered by pixel index, so the output does not depend on it.
/// One instance per stream; not for concurrent use.
class Detector
{
public:
  Detector(SensorGeometry geometry, DetectorParams params, std::size_t workers = 0);

  Detection detect(const EventWindow & window) const;
  StreamResult detect_stream(
    std::span<const Event> events, timestamp_us t_len = kDefaultWindowUs,
    std::optional<timestamp_us> end_us = {}) const;

  const SensorGeometry & geometry() const { return geometry_; }
  const DetectorParams & params() const { return params_; }
  std::size_t workers() const { return workers_; }

private:
  SensorGeometry geometry_;
  DetectorParams params_;
  std::size_t workers_;
};

Detection detect_window(const EventWindow & window, const SensorGeometry & geometry, const DetectorParams & params);

std::vector<WindowBoxes> to_window_boxes(std::span<const Detection> detections);

}  // namespace rotorscope
