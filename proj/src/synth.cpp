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

#include "rotorscope/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

#include "rotorscope/errors.h"

namespace rotorscope
{
namespace
{
constexpr double kPi = std::numbers::pi;

template <typename F>
void for_each_disc_pixel(const RotorSpec & r, F && f)
{
  const auto y0 = static_cast<std::int64_t>(std::ceil(r.cy - r.radius));
  const auto y1 = static_cast<std::int64_t>(std::floor(r.cy + r.radius));
  const auto x0 = static_cast<std::int64_t>(std::ceil(r.cx - r.radius));
  const auto x1 = static_cast<std::int64_t>(std::floor(r.cx + r.radius));
  for (auto y = y0; y <= y1; ++y) {
    for (auto x = x0; x <= x1; ++x) {
      const double dx = static_cast<double>(x) - r.cx;
      const double dy = static_cast<double>(y) - r.cy;
      if (dx * dx + dy * dy <= r.radius * r.radius) f(x, y);
    }
  }
}

void require(bool ok, const std::string & what)
{
  if (!ok) throw ValidationError("scene spec: " + what);
}

}  // namespace

std::complex<double> pulse_train_coefficient(double duty, int n)
{
  const double x = static_cast<double>(n) * duty;
  const double sinc = n == 0 ? 1.0 : std::sin(kPi * x) / (kPi * x);
  return duty * sinc * std::polar(1.0, -kPi * x);
}

double harmonic_power(double duty, int n)
{
  const double s = std::sin(kPi * n * duty) / (kPi * n);
  return s * s;
}

std::vector<TimedPolarity> gen_rotor_pixel_events(
  double f_bpf, double duty, double phase_frac, timestamp_us t0, timestamp_us t1,
  std::uint32_t events_per_edge)
{
  if (!(f_bpf > 0.0) || !(duty > 0.0 && duty < 1.0) || events_per_edge < 1 || t1 <= t0) {
    throw ContractViolation("gen_rotor_pixel_events: invalid arguments");
  }
  const double period = 1e6 / f_bpf;
  const double occluded = duty * period;
  const double clear = period - occluded;
  const double per = static_cast<double>(events_per_edge);

  std::vector<TimedPolarity> out;
  bool have_last = false;
  timestamp_us last = 0;
  auto emit = [&](long long r, std::int8_t p) {
    if (r < static_cast<long long>(t0)) return;
    auto ts = static_cast<timestamp_us>(r);
    if (have_last && ts <= last) ts = last + 1;
    if (ts >= t1) return;
    out.push_back({ts, p});
    last = ts;
    have_last = true;
  };
  // start one period early so clear-segment samples of a straddling period are kept
  auto k = static_cast<long long>(std::floor(static_cast<double>(t0) / period - phase_frac)) - 1;
  for (;; ++k) {
    const double onset = (static_cast<double>(k) + phase_frac) * period;
    if (onset >= static_cast<double>(t1)) break;
    // edges are offset from the rounded onset so the occlusion length is round(duty * T)
    const auto base = std::llround(onset);
    for (std::uint32_t i = 0; i < events_per_edge; ++i) emit(base + std::llround(i * occluded / per), -1);
    for (std::uint32_t i = 0; i < events_per_edge; ++i) emit(base + std::llround(occluded + i * clear / per), +1);
  }
  return out;
}

void SceneSpec::validate() const
{
  geometry.validate();
  require(duration_us >= 1, "duration_us must be >= 1");
  require(noise_rate >= 0.0, "noise_rate must be >= 0");
  require(events_per_edge >= 1, "events_per_edge must be >= 1");
  require(jitter_us >= 0.0, "jitter_us must be >= 0");
  require(window_us >= 1, "window_us must be >= 1");
  for (std::size_t i = 0; i < rotors.size(); ++i) {
    const auto & r = rotors[i];
    const auto tag = "rotor " + std::to_string(i) + ": ";
    require(r.radius >= 1.0, tag + "radius must be >= 1");
    require(r.duty > 0.0 && r.duty < 1.0, tag + "duty must be in (0, 1)");
    require(r.f_bpf > 0.0, tag + "f_bpf must be > 0");
    require(r.blades >= 1, tag + "blades must be >= 1");
    require(
      r.cx - r.radius >= 0.0 && r.cy - r.radius >= 0.0 &&
        r.cx + r.radius <= static_cast<double>(geometry.width) - 1.0 &&
        r.cy + r.radius <= static_cast<double>(geometry.height) - 1.0,
      tag + "disc leaves the sensor");
  }
  if (clutter) {
    require(clutter->velocity_px_s != 0.0, "clutter velocity must be non-zero");
    require(clutter->bar_width_px >= 1, "clutter bar width must be >= 1");
    require(clutter->extent_px >= 1, "clutter extent must be >= 1");
    require(
      std::uint64_t{clutter->y_min} + clutter->extent_px <= geometry.height,
      "clutter rows leave the sensor");
  }
}

Box disc_box(const RotorSpec & rotor)
{
  bool first = true;
  Box b;
  for_each_disc_pixel(rotor, [&](std::int64_t x, std::int64_t y) {
    const Box p{static_cast<std::int32_t>(x), static_cast<std::int32_t>(y), static_cast<std::int32_t>(x),
                static_cast<std::int32_t>(y)};
    b = first ? p : enclose(b, p);
    first = false;
  });
  return b;
}

double blade_phase(const RotorSpec & rotor, double x, double y)
{
  const double angle = static_cast<double>(rotor.blades) * std::atan2(y - rotor.cy, x - rotor.cx) + rotor.phase0;
  double frac = std::fmod(angle, 2.0 * kPi) / (2.0 * kPi);
  if (frac < 0.0) frac += 1.0;
  return frac >= 1.0 ? 0.0 : frac;
}

Scene gen_scene(const SceneSpec & spec)
{
  spec.validate();
  Scene scene;
  scene.stream.geometry = spec.geometry;
  auto & events = scene.stream.events;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> jitter(0.0, spec.jitter_us > 0.0 ? spec.jitter_us : 1.0);
  const auto duration = static_cast<double>(spec.duration_us);

  auto push = [&](double t, std::int64_t x, std::int64_t y, std::int8_t p) {
    if (spec.jitter_us > 0.0) t += jitter(rng);
    const auto r = std::llround(t);
    if (r < 0 || static_cast<double>(r) >= duration) return;
    events.push_back({static_cast<timestamp_us>(r), static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), p});
  };

  for (const auto & rotor : spec.rotors) {
    for_each_disc_pixel(rotor, [&](std::int64_t x, std::int64_t y) {
      const double frac = blade_phase(rotor, static_cast<double>(x), static_cast<double>(y));
      for (const auto & e :
           gen_rotor_pixel_events(rotor.f_bpf, rotor.duty, frac, 0, spec.duration_us, spec.events_per_edge)) {
        push(static_cast<double>(e.t), x, y, e.p);
      }
    });
  }

  if (spec.clutter) {
    const auto & c = *spec.clutter;
    const double speed = std::abs(c.velocity_px_s);
    for (std::uint32_t col = 0; col < spec.geometry.width; ++col) {
      // distance the leading edge travels before reaching this column
      const double lead = c.velocity_px_s > 0 ? static_cast<double>(col) - c.x_start : c.x_start - static_cast<double>(col);
      if (lead < 0.0) continue;
      const double t_in = lead / speed * 1e6;
      const double t_out = (lead + c.bar_width_px) / speed * 1e6;
      if (t_in >= duration) continue;
      for (std::uint32_t row = c.y_min; row < c.y_min + c.extent_px; ++row) {
        push(t_in, col, row, -1);
        if (t_out < duration) push(t_out, col, row, +1);
      }
    }
  }

  if (spec.noise_rate > 0.0) {
    const double mean = spec.noise_rate * static_cast<double>(spec.geometry.pixel_count()) * duration * 1e-6;
    std::poisson_distribution<std::uint64_t> count_dist(mean);
    const auto count = count_dist(rng);
    std::uniform_int_distribution<std::uint64_t> pixel(0, spec.geometry.pixel_count() - 1);
    std::uniform_int_distribution<timestamp_us> when(0, spec.duration_us - 1);
    std::bernoulli_distribution positive(0.5);
    for (std::uint64_t i = 0; i < count; ++i) {
      const auto px = pixel(rng);
      const auto t = when(rng);
      const auto p = static_cast<std::int8_t>(positive(rng) ? 1 : -1);
      events.push_back({t, static_cast<std::uint16_t>(px % spec.geometry.width),
                        static_cast<std::uint16_t>(px / spec.geometry.width), p});
    }
  }

  std::sort(events.begin(), events.end(), [](const Event & a, const Event & b) {
    return std::tie(a.t, a.y, a.x, a.p) < std::tie(b.t, b.y, b.x, b.p);
  });

  std::vector<Box> discs;
  for (const auto & r : spec.rotors) discs.push_back(disc_box(r));
  const auto n_windows = (spec.duration_us + spec.window_us - 1) / spec.window_us;
  for (timestamp_us w = 0; w < n_windows; ++w) scene.truth.push_back({static_cast<std::size_t>(w), discs});
  return scene;
}

void to_json(nlohmann::json & j, const RotorSpec & r)
{
  j = {{"center", {r.cx, r.cy}}, {"radius", r.radius}, {"f_bpf", r.f_bpf},
       {"duty", r.duty}, {"blades", r.blades}, {"phase0", r.phase0}};
}

void from_json(const nlohmann::json & j, RotorSpec & r)
{
  const auto & c = j.at("center");
  r.cx = c.at(0).get<double>();
  r.cy = c.at(1).get<double>();
  r.radius = j.value("radius", r.radius);
  r.f_bpf = j.value("f_bpf", r.f_bpf);
  r.duty = j.value("duty", r.duty);
  r.blades = j.value("blades", r.blades);
  r.phase0 = j.value("phase0", r.phase0);
}

void to_json(nlohmann::json & j, const ClutterSpec & c)
{
  j = {{"velocity_px_s", c.velocity_px_s}, {"extent_px", c.extent_px}, {"y_min", c.y_min},
       {"bar_width_px", c.bar_width_px}, {"x_start", c.x_start}};
}

void from_json(const nlohmann::json & j, ClutterSpec & c)
{
  c.velocity_px_s = j.value("velocity_px_s", c.velocity_px_s);
  c.extent_px = j.value("extent_px", c.extent_px);
  c.y_min = j.value("y_min", c.y_min);
  c.bar_width_px = j.value("bar_width_px", c.bar_width_px);
  c.x_start = j.value("x_start", c.x_start);
}

void to_json(nlohmann::json & j, const SceneSpec & s)
{
  j = {{"geometry", {{"width", s.geometry.width}, {"height", s.geometry.height}}},
       {"duration_us", s.duration_us},
       {"rotors", s.rotors},
       {"noise_rate", s.noise_rate},
       {"clutter", s.clutter ? nlohmann::json(*s.clutter) : nlohmann::json(nullptr)},
       {"seed", s.seed},
       {"events_per_edge", s.events_per_edge},
       {"jitter_us", s.jitter_us},
       {"window_us", s.window_us}};
}

void from_json(const nlohmann::json & j, SceneSpec & s)
{
  if (j.contains("geometry")) {
    s.geometry.width = j["geometry"].at("width").get<std::uint32_t>();
    s.geometry.height = j["geometry"].at("height").get<std::uint32_t>();
  }
  s.duration_us = j.value("duration_us", s.duration_us);
  if (j.contains("rotors")) s.rotors = j["rotors"].get<std::vector<RotorSpec>>();
  s.noise_rate = j.value("noise_rate", s.noise_rate);
  if (j.contains("clutter") && !j["clutter"].is_null()) s.clutter = j["clutter"].get<ClutterSpec>();
  s.seed = j.value("seed", s.seed);
  s.events_per_edge = j.value("events_per_edge", s.events_per_edge);
  s.jitter_us = j.value("jitter_us", s.jitter_us);
  s.window_us = j.value("window_us", s.window_us);
}

}  // namespace rotorscope
