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

#include "rotorscope/pipeline.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "rotorscope/errors.h"
#include "rotorscope/spectral.h"

namespace rotorscope
{
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)> & fn)
{
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  constexpr std::size_t kChunk = 64;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(kChunk);
        if (begin >= n) return;
        const std::size_t end = std::min(n, begin + kChunk);
        for (std::size_t i = begin; i < end; ++i) fn(i);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(n);
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
  }
  if (failure) std::rethrow_exception(failure);
}

PixelVerdict classify_group(const PixelGroup & group, const DetectorParams & params, timestamp_us t_len)
{
  thread_local ComplexSpectrum modes;
  thread_local PowerSpectrum spectrum;
  ndft_into(group.polarities, group.phases, params.K, modes);
  power_spectrum_into(modes, bin_hz_for(t_len), spectrum);
  return classify_pixel(spectrum, params);
}

Segmentation segment_mask(const RotorMask & mask, const DetectorParams & params)
{
  Segmentation out;
  out.components = extract_boxes(label_components(mask));
  out.boxes = merge_boxes(filter_boxes(out.components, params.A_min), params.alpha);
  return out;
}

Detector::Detector(SensorGeometry geometry, DetectorParams params, std::size_t workers)
: geometry_(geometry), params_(params), workers_(workers)
{
  geometry_.validate();
  params_.validate();
  if (workers_ == 0) workers_ = std::max(1u, std::thread::hardware_concurrency());
}

Detection Detector::detect(const EventWindow & window) const
{
  const auto start = std::chrono::steady_clock::now();
  Detection out;
  out.window_index = window.index;

  const auto groups = group_by_pixel(window, params_.n_min);
  std::vector<PixelVerdict> verdicts(groups.size());
  parallel_for(groups.size(), workers_, [&](std::size_t i) {
    verdicts[i] = classify_group(groups[i], params_, window.t_len);
  });

  RotorMask mask(geometry_);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (!verdicts[i].is_rotor) continue;
    if (!geometry_.contains(groups[i].x, groups[i].y)) {
      throw ContractViolation("event pixel outside sensor geometry");
    }
    mask.set(groups[i].x, groups[i].y);
    out.freq_map.push_back({groups[i].x, groups[i].y, verdicts[i].f_hz});
  }
  auto seg = segment_mask(mask, params_);
  out.components = std::move(seg.components);
  out.boxes = std::move(seg.boxes);

  const auto stop = std::chrono::steady_clock::now();
  out.latency_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return out;
}

StreamResult Detector::detect_stream(
  std::span<const Event> events, timestamp_us t_len, std::optional<timestamp_us> end_us) const
{
  StreamResult out;
  const auto windows = window_events(events, t_len, end_us);
  std::vector<double> latencies;
  for (const auto & w : windows) {
    try {
      out.detections.push_back(detect(w));
    } catch (const ContractViolation & e) {
      throw ContractViolation("window " + std::to_string(w.index) + ": " + e.what());
    }
    latencies.push_back(out.detections.back().latency_ms);
  }
  if (!latencies.empty()) out.latency = latency_summary(latencies);
  return out;
}

Detection detect_window(const EventWindow & window, const SensorGeometry & geometry, const DetectorParams & params)
{
  return Detector(geometry, params).detect(window);
}

std::vector<WindowBoxes> to_window_boxes(std::span<const Detection> detections)
{
  std::vector<WindowBoxes> out;
  out.reserve(detections.size());
  for (const auto & d : detections) out.push_back({d.window_index, d.boxes});
  return out;
}

}  // namespace rotorscope
