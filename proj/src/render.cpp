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

#include "rotorscope/render.h"

#include <algorithm>
#include <fstream>
#include <ostream>

namespace rotorscope
{
namespace
{
constexpr int kStep = 32;
}

Image render_frame(const EventWindow & window, const Detection & detection, const SensorGeometry & geometry)
{
  Image img{geometry.width, geometry.height, std::vector<std::uint8_t>(geometry.pixel_count() * 3, kMidGray)};
  std::vector<int> level(geometry.pixel_count(), kMidGray);
  for (const auto & e : window.events) {
    if (!geometry.contains(e.x, e.y)) continue;
    auto & l = level[std::size_t{e.y} * geometry.width + e.x];
    l = std::clamp(l + kStep * e.p, 0, 255);
  }
  for (std::uint32_t y = 0; y < geometry.height; ++y) {
    for (std::uint32_t x = 0; x < geometry.width; ++x) {
      const auto v = static_cast<std::uint8_t>(level[std::size_t{y} * geometry.width + x]);
      img.set(x, y, {v, v, v});
    }
  }
  auto plot = [&](std::int64_t x, std::int64_t y) {
    if (geometry.contains(x, y)) img.set(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y), kBoxColor);
  };
  for (const auto & b : detection.boxes) {
    for (std::int64_t x = b.x_min; x <= b.x_max; ++x) {
      plot(x, b.y_min);
      plot(x, b.y_max);
    }
    for (std::int64_t y = b.y_min; y <= b.y_max; ++y) {
      plot(b.x_min, y);
      plot(b.x_max, y);
    }
  }
  return img;
}

void write_ppm(std::ostream & out, const Image & image)
{
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char *>(image.rgb.data()), static_cast<std::streamsize>(image.rgb.size()));
}

void write_ppm_file(const std::string & path, const Image & image)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_ppm(out, image);
}

}  // namespace rotorscope
