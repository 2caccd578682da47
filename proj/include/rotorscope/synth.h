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

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rotorscope/box_io.h"
#include "rotorscope/events.h"

namespace rotorscope
{
// c_n = tau * sinc(n tau) * exp(-i pi n tau), sinc(x) = sin(pi x)/(pi x)
std::complex<double> pulse_train_coefficient(double duty, int n);

// |c_n|^2 = (sin(pi n tau) / (pi n))^2 for n >= 1
double harmonic_power(double duty, int n);

struct TimedPolarity
{
  timestamp_us t{0};
  std::int8_t p{1};
  bool operator==(const TimedPolarity &) const = default;
};

/// Events one pixel sees while blades occlude it with period 1/f_bpf.
/// Occlusion k spans [(k + phase_frac) T, (k + phase_frac) T + duty T).
/// Each occluded segment contributes `events_per_edge` evenly spaced -1
/// samples starting at its onset, each clear segment as many +1 samples
/// starting at the occlusion end; with one per edge this is exactly the
/// onset/offset pair. Only samples in [t0, t1) are kept; timestamps are
/// rounded to whole microseconds and strictly increasing.
std::vector<TimedPolarity> gen_rotor_pixel_events(
  double f_bpf, double duty, double phase_frac, timestamp_us t0, timestamp_us t1,
  std::uint32_t events_per_edge = 1);

struct RotorSpec
{
  double cx{0.0};
  double cy{0.0};
  double radius{10.0};
  double f_bpf{150.0};
  double duty{0.2};
  std::uint32_t blades{2};
  double phase0{0.0};  // radians
};

// A dark vertical bar sweeping along x at constant velocity over rows
// [y_min, y_min + extent_px). Each column it crosses gets one -1 at the
// leading edge and one +1 at the trailing edge.
struct ClutterSpec
{
  double velocity_px_s{400.0};
  std::uint32_t extent_px{64};
  std::uint32_t y_min{0};
  std::uint32_t bar_width_px{6};
  double x_start{0.0};  // leading-edge column at t = 0
};

struct SceneSpec
{
  SensorGeometry geometry{128, 128};
  timestamp_us duration_us{kDefaultWindowUs};
  std::vector<RotorSpec> rotors;
  double noise_rate{0.0};  // events / pixel / second, Poisson
  std::optional<ClutterSpec> clutter;
  std::uint64_t seed{0};
  std::uint32_t events_per_edge{1};
  double jitter_us{100.0};  // Gaussian timestamp jitter on rotor and clutter events
  timestamp_us window_us{kDefaultWindowUs};  // ground-truth windowing

  // throws ValidationError
  void validate() const;
};

void to_json(nlohmann::json & j, const RotorSpec & r);
void from_json(const nlohmann::json & j, RotorSpec & r);
void to_json(nlohmann::json & j, const ClutterSpec & c);
void from_json(const nlohmann::json & j, ClutterSpec & c);
void to_json(nlohmann::json & j, const SceneSpec & s);
void from_json(const nlohmann::json & j, SceneSpec & s);

struct Scene
{
  EventStream stream;
  std::vector<WindowBoxes> truth;  // one record per window, one box per rotor disc
};

// Tight box over the pixels (x, y) with (x - cx)^2 + (y - cy)^2 <= r^2.
Box disc_box(const RotorSpec & rotor);

// Blade-sweep phase of a pixel: (blades * atan2(y - cy, x - cx) + phase0) mod 2pi, over 2pi.
double blade_phase(const RotorSpec & rotor, double x, double y);

// Deterministic for a given spec (including seed).
Scene gen_scene(const SceneSpec & spec);

}  // namespace rotorscope
