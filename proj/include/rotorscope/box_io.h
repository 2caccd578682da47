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
#include <iosfwd>
#include <string>
#include <vector>

#include "rotorscope/segmentation.h"

namespace rotorscope
{
// One JSON-lines record: {"window": i, "boxes": [{"x_min":..,"y_min":..,"x_max":..,"y_max":..}]}
struct WindowBoxes
{
  std::size_t window{0};
  std::vector<Box> boxes;
  bool operator==(const WindowBoxes &) const = default;
};

void write_box_lines(std::ostream & out, const std::vector<WindowBoxes> & records);
// throws ParseError with the 1-based line number on malformed records
std::vector<WindowBoxes> read_box_lines(std::istream & in);

std::vector<WindowBoxes> read_box_file(const std::string & path);
void write_box_file(const std::string & path, const std::vector<WindowBoxes> & records);

}  // namespace rotorscope
