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

#include "rotorscope/box_io.h"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "rotorscope/errors.h"

namespace rotorscope
{
void write_box_lines(std::ostream & out, const std::vector<WindowBoxes> & records)
{
  for (const auto & r : records) {
    nlohmann::json boxes = nlohmann::json::array();
    for (const auto & b : r.boxes) {
      boxes.push_back({{"x_min", b.x_min}, {"y_min", b.y_min}, {"x_max", b.x_max}, {"y_max", b.y_max}});
    }
    out << nlohmann::json{{"window", r.window}, {"boxes", boxes}}.dump() << '\n';
  }
}

std::vector<WindowBoxes> read_box_lines(std::istream & in)
{
  std::vector<WindowBoxes> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      WindowBoxes r;
      r.window = j.at("window").get<std::size_t>();
      for (const auto & b : j.at("boxes")) {
        Box box{b.at("x_min").get<std::int32_t>(), b.at("y_min").get<std::int32_t>(),
                b.at("x_max").get<std::int32_t>(), b.at("y_max").get<std::int32_t>()};
        if (box.x_min > box.x_max || box.y_min > box.y_max) {
          throw ParseError("box with min > max", lineno);
        }
        r.boxes.push_back(box);
      }
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception & e) {
      throw ParseError(std::string("box record: ") + e.what(), lineno);
    }
  }
  return out;
}

std::vector<WindowBoxes> read_box_file(const std::string & path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_box_lines(in);
}

void write_box_file(const std::string & path, const std::vector<WindowBoxes> & records)
{
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_box_lines(out, records);
}

}  // namespace rotorscope
