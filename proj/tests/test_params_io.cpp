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

#include <doctest.h>

#include <sstream>

#include "rotorscope/box_io.h"
#include "rotorscope/errors.h"
#include "rotorscope/params.h"

using namespace rotorscope;

TEST_SUITE("params")
{
  TEST_CASE("defaults are valid and round trip through json")
  {
    const DetectorParams d;
    CHECK_NOTHROW(d.validate());
    const nlohmann::json j = d;
    CHECK(j.size() == 10);
    CHECK(j.at("tau_sf") == 0.89);
    CHECK(j.at("A_min") == 147);
    CHECK(j.get<DetectorParams>() == d);
  }

  TEST_CASE("invariants")
  {
    auto bad = [](auto mutate) {
      DetectorParams p;
      mutate(p);
      CHECK_THROWS_AS(p.validate(), ValidationError);
    };
    bad([](DetectorParams & p) { p.tau_sf = 0.0; });
    bad([](DetectorParams & p) { p.tau_sf = 1.01; });
    bad([](DetectorParams & p) { p.tau_comb = 0.99; });
    bad([](DetectorParams & p) { p.h_min = 5; });
    bad([](DetectorParams & p) { p.h_min = 1; p.M = 1; });
    bad([](DetectorParams & p) { p.n_min = 1; });
    bad([](DetectorParams & p) { p.A_min = 0; });
    bad([](DetectorParams & p) { p.alpha = 0.0; });
    bad([](DetectorParams & p) { p.omega_min = 0; });
    bad([](DetectorParams & p) { p.omega_min = 512; });
  }

  TEST_CASE("overrides")
  {
    DetectorParams p;
    p.set("tau_sf=0.5");
    p.set("tau_comb=6");
    p.set("M=8");
    CHECK(p.tau_sf == 0.5);
    CHECK(p.tau_comb == 6.0);
    CHECK(p.M == 8);
    CHECK_THROWS_AS(p.set("nope=1"), ValidationError);
    CHECK_THROWS_AS(p.set("M=abc"), ValidationError);
    CHECK_THROWS_AS(p.set("M=-2"), ValidationError);
    CHECK_THROWS_AS(p.set("tau_sf"), ValidationError);
  }

  TEST_CASE("json rejects unknown or mistyped fields")
  {
    CHECK_THROWS_AS(nlohmann::json::parse(R"({"tau_sf": 0.5, "extra": 1})").get<DetectorParams>(), ValidationError);
    CHECK_THROWS_AS(nlohmann::json::parse(R"({"M": 2.5})").get<DetectorParams>(), ValidationError);
    CHECK_THROWS_AS(nlohmann::json::parse(R"({"M": -1})").get<DetectorParams>(), ValidationError);
    const auto partial = nlohmann::json::parse(R"({"alpha": 7.5})").get<DetectorParams>();
    CHECK(partial.alpha == 7.5);
    CHECK(partial.M == 4);
  }
}

TEST_SUITE("box_io")
{
  TEST_CASE("box lines round trip")
  {
    const std::vector<WindowBoxes> records{{0, {}}, {1, {{1, 2, 3, 4}, {10, 10, 20, 30}}}, {7, {{0, 0, 0, 0}}}};
    std::stringstream io;
    write_box_lines(io, records);
    CHECK(read_box_lines(io) == records);
  }

  TEST_CASE("box line format")
  {
    std::ostringstream out;
    write_box_lines(out, {{3, {{1, 2, 3, 4}}}});
    const auto j = nlohmann::json::parse(out.str());
    CHECK(j.at("window") == 3);
    CHECK(j.at("boxes").at(0).at("x_min") == 1);
    CHECK(j.at("boxes").at(0).at("y_max") == 4);
  }

  TEST_CASE("bad records name their line")
  {
    std::istringstream in("{\"window\": 0, \"boxes\": []}\n\n{\"window\": 1, \"boxes\": [{\"x_min\": 5, \"y_min\": 0, \"x_max\": 4, \"y_max\": 0}]}\n");
    try {
      read_box_lines(in);
      FAIL("expected a parse error");
    } catch (const ParseError & e) {
      CHECK(e.offset() == 3);
    }
    std::istringstream garbage("not json\n");
    CHECK_THROWS_AS(read_box_lines(garbage), ParseError);
  }
}
