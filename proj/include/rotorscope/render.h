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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rotorscope/events.h"
#include "rotorscope/pipeline.h"

namespace rotorscope
{
using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kBoxColor{255, 0, 0};
inline constexpr std::uint8_t kMidGray = 128;

struct Image
{
  std::uint32_t width{0};
  std::uint32_t height{0};
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  Rgb at(std::uint32_t x, std::uint32_t y) const
  {
    const auto i = (std::size_t{y} * width + x) * 3;
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
  void set(std::uint32_t x, std::uint32_t y, Rgb c)
  {
    const auto i = (std::size_t{y} * width + x) * 3;
    rgb[i] = c[0];
    rgb[i + 1] = c[1];
    rgb[i + 2] = c[2];
  }
};

// Event accumulation on mid-gray (each +1 brightens, each -1 darkens),
// with the detection boxes outlined 1 px wide.
Image render_frame(const EventWindow & window, const Detection & detection, const SensorGeometry & geometry);

void write_ppm(std::ostream & out, const Image & image);
void write_ppm_file(const std::string & path, const Image & image);

}  // namespace rotorscope
