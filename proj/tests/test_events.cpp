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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "rotorscope/errors.h"
#include "rotorscope/events.h"

using namespace rotorscope;

namespace
{
std::vector<Event> random_events(std::mt19937_64 & rng, SensorGeometry g, std::size_t n, timestamp_us span)
{
  std::uniform_int_distribution<timestamp_us> t(0, span);
  std::uniform_int_distribution<int> x(0, static_cast<int>(g.width) - 1);
  std::uniform_int_distribution<int> y(0, static_cast<int>(g.height) - 1);
  std::bernoulli_distribution pos(0.5);
  std::vector<Event> ev(n);
  for (auto & e : ev) {
    e = {t(rng), static_cast<std::uint16_t>(x(rng)), static_cast<std::uint16_t>(y(rng)),
         static_cast<std::int8_t>(pos(rng) ? 1 : -1)};
  }
  std::stable_sort(ev.begin(), ev.end(), [](const Event & a, const Event & b) { return a.t < b.t; });
  return ev;
}

EventStream parse_csv(const std::string & text, SensorGeometry g = {8, 8}, timestamp_us slack = 0)
{
  std::istringstream in(text);
  return parse_events(in, EventFormat::csv, {g, slack});
}

}  // namespace

TEST_SUITE("event_core")
{
  TEST_CASE("csv record maps fields directly")
  {
    const auto s = parse_csv("t_us,x,y,p\n0,3,4,1\n");
    REQUIRE(s.events.size() == 1);
    CHECK(s.events[0] == Event{0, 3, 4, 1});
    CHECK(s.geometry == SensorGeometry{8, 8});
  }

  TEST_CASE("csv polarity zero becomes negative")
  {
    const auto s = parse_csv("t_us,x,y,p\n5,1,1,0\n6,1,1,-1\n");
    CHECK(s.events[0].p == -1);
    CHECK(s.events[1].p == -1);
  }

  TEST_CASE("csv errors")
  {
    CHECK_THROWS_AS(parse_csv("t_us,x,y,p\n0,9,4,1\n"), ValidationError);
    CHECK_THROWS_AS(parse_csv("t_us,x,y,p\n0,1,4,2\n"), ParseError);
    try {
      parse_csv("t_us,x,y,p\n0,1,1,1\nbogus\n");
      FAIL("expected a parse error");
    } catch (const ParseError & e) {
      CHECK(e.offset() == 3);
    }
    CHECK_THROWS_AS(parse_csv("t_us,x,y,p\n100,1,1,1\n50,1,1,1\n"), ValidationError);
    const auto ok = parse_csv("t_us,x,y,p\n100,1,1,1\n50,1,1,1\n", {8, 8}, 60);
    CHECK(ok.events.front().t == 50);
    std::istringstream in("t_us,x,y,p\n0,1,1,1\n");
    CHECK_THROWS_AS(parse_events(in, EventFormat::csv, {}), ValidationError);
  }

  TEST_CASE("evb magic is checked")
  {
    std::istringstream in(std::string("EVB2\x08\x00\x08\x00", 8) + std::string(8, '\0'));
    CHECK_THROWS_AS(parse_events(in, EventFormat::evb, {}), FormatError);
  }

  TEST_CASE("evb truncated record reports byte offset")
  {
    std::ostringstream out;
    const std::vector<Event> ev{{1, 1, 1, 1}, {2, 2, 2, -1}};
    write_events(out, EventFormat::evb, {8, 8}, ev);
    const auto bytes = out.str();
    std::istringstream in(bytes.substr(0, bytes.size() - 3));
    try {
      parse_events(in, EventFormat::evb, {});
      FAIL("expected a parse error");
    } catch (const ParseError & e) {
      CHECK(e.offset() == 16 + 13);
    }
  }

  TEST_CASE("format names")
  {
    CHECK(parse_event_format("csv") == EventFormat::csv);
    CHECK(parse_event_format("evb") == EventFormat::evb);
    CHECK_THROWS_AS(parse_event_format("aedat"), FormatError);
  }

  TEST_CASE("round trip is exact in both formats")
  {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      const SensorGeometry g{static_cast<std::uint32_t>(1 + trial * 13), static_cast<std::uint32_t>(1 + trial * 7)};
      const auto ev = random_events(rng, g, static_cast<std::size_t>(trial * 20), 1'000'000);
      for (auto fmt : {EventFormat::csv, EventFormat::evb}) {
        std::stringstream io;
        write_events(io, fmt, g, ev);
        const auto back = parse_events(io, fmt, {g, 0});
        CHECK(back.geometry == g);
        CHECK(back.events == ev);
      }
    }
  }

  TEST_CASE("windowing example")
  {
    const std::vector<Event> ev{{0, 0, 0, 1}, {33332, 0, 0, 1}, {33333, 0, 0, 1}, {99999, 0, 0, 1}};
    const auto w = window_events(ev, 33333);
    // floor(t / t_len) places 99999 = 3 * 33333 at the start of window 3
    REQUIRE(w.size() == 4);
    for (const auto & win : w) {
      for (const auto & e : win.events) CHECK(e.t / 33333 == win.index);
    }
    CHECK(w[0].events.size() == 2);
    CHECK(w[1].events.size() == 1);
    CHECK(w[1].events[0].t == 33333);
    CHECK(w[2].events.empty());
    CHECK(w[3].events.size() == 1);
    CHECK(w[3].t_start == 99999);
    CHECK(w[3].partial);
    CHECK(window_events({}, 33333).empty());
    const std::vector<Event> one{{0, 1, 1, 1}};
    const auto w1 = window_events(one, 33333);
    REQUIRE(w1.size() == 1);
    CHECK(w1[0].events.size() == 1);
    CHECK(w1[0].partial);
  }

  TEST_CASE("windows are aligned to t=0 and gaps are kept")
  {
    const std::vector<Event> ev{{70000, 0, 0, 1}};
    const auto w = window_events(ev, 33333);
    REQUIRE(w.size() == 3);
    CHECK(w[0].events.empty());
    CHECK(w[1].events.empty());
    CHECK(w[2].index == 2);
    const auto padded = window_events(ev, 33333, 133331);
    CHECK(padded.size() == 4);
    CHECK(padded.back().partial);
  }

  TEST_CASE("windowing partitions the input")
  {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
      const SensorGeometry g{32, 24};
      const auto ev = random_events(rng, g, 3000, 250'000);
      const timestamp_us t_len = 1000 + static_cast<timestamp_us>(trial) * 997;
      const auto windows = window_events(ev, t_len);
      std::vector<Event> all;
      for (const auto & w : windows) {
        CHECK(w.t_start == w.index * t_len);
        for (std::size_t i = 0; i < w.events.size(); ++i) {
          const auto & e = w.events[i];
          CHECK((e.t >= w.t_start && e.t < w.t_start + t_len));
          if (i > 0) {
            const auto & a = w.events[i - 1];
            const auto la = std::size_t{a.y} * g.width + a.x;
            const auto lb = std::size_t{e.y} * g.width + e.x;
            CHECK((la < lb || (la == lb && a.t <= e.t)));
          }
        }
        all.insert(all.end(), w.events.begin(), w.events.end());
      }
      auto key = [](const Event & e) { return std::tie(e.t, e.y, e.x, e.p); };
      auto a = ev;
      std::sort(a.begin(), a.end(), [&](const Event & l, const Event & r) { return key(l) < key(r); });
      std::sort(all.begin(), all.end(), [&](const Event & l, const Event & r) { return key(l) < key(r); });
      CHECK(a == all);
    }
  }

  TEST_CASE("pixel sort is stable for large windows")
  {
    std::mt19937_64 rng(3);
    auto ev = random_events(rng, {64, 64}, 20000, 33332);
    auto expected = ev;
    std::stable_sort(expected.begin(), expected.end(), [](const Event & a, const Event & b) {
      return std::tie(a.y, a.x) < std::tie(b.y, b.x);
    });
    sort_by_pixel(ev);
    CHECK(ev == expected);
  }

  TEST_CASE("grouping thresholds and order")
  {
    EventWindow w;
    w.t_len = 33333;
    for (int i = 0; i < 6; ++i) w.events.push_back({static_cast<timestamp_us>(i * 100), 2, 2, 1});
    for (int i = 0; i < 5; ++i) w.events.push_back({static_cast<timestamp_us>(i * 100), 3, 2, 1});
    for (int i = 0; i < 7; ++i) w.events.push_back({static_cast<timestamp_us>(i * 100), 1, 5, -1});
    sort_by_pixel(w.events);
    const auto groups = group_by_pixel(w, 6);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].x == 2);
    CHECK(groups[0].y == 2);
    CHECK(groups[0].phases.size() == 6);
    CHECK(groups[1].x == 1);
    CHECK(groups[1].y == 5);
    CHECK(groups[1].polarities == std::vector<std::int8_t>(7, -1));
    CHECK(std::is_sorted(groups[1].phases.begin(), groups[1].phases.end()));
  }

  TEST_CASE("timestamp normalization")
  {
    constexpr double pi = std::numbers::pi;
    CHECK(normalize_timestamp(1000, 1000, 33333) == doctest::Approx(-pi).epsilon(1e-15));
    CHECK(normalize_timestamp(500, 0, 1000) == doctest::Approx(0.0));
    const double last = normalize_timestamp(33332, 0, 33333);
    CHECK(last == doctest::Approx(-pi + 2 * pi * 33332.0 / 33333.0).epsilon(1e-15));
    CHECK(last == doctest::Approx(3.141404).epsilon(1e-6));
    CHECK(last < pi);
    CHECK(normalize_timestamp(0, 0, 1) < pi);
    CHECK_THROWS_AS(normalize_timestamp(33333, 0, 33333), ContractViolation);
    CHECK_THROWS_AS(normalize_timestamp(5, 10, 33333), ContractViolation);
    const std::vector<timestamp_us> ts{10, 20, 20, 30};
    const auto ph = normalize_timestamps(ts, 10, 100);
    CHECK(std::is_sorted(ph.begin(), ph.end()));
    CHECK(ph[1] - ph[0] == doctest::Approx(ph[3] - ph[2]));
  }
}
