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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rotorscope
{
using timestamp_us = std::uint64_t;

inline constexpr timestamp_us kDefaultWindowUs = 33333;

struct SensorGeometry
{
  std::uint32_t width{0};
  std::uint32_t height{0};

  // throws ValidationError unless width, height >= 1 and both fit the EVB u16 fields
  void validate() const;
  bool contains(std::int64_t x, std::int64_t y) const
  {
    return x >= 0 && y >= 0 && x < static_cast<std::int64_t>(width) &&
           y < static_cast<std::int64_t>(height);
  }
  std::size_t pixel_count() const { return std::size_t{width} * height; }
  bool operator==(const SensorGeometry &) const = default;
};

// One contrast-detection sample. Polarity is canonical {-1, +1}.
struct Event
{
  timestamp_us t{0};
  std::uint16_t x{0};
  std::uint16_t y{0};
  std::int8_t p{1};

  bool operator==(const Event &) const = default;
};

enum class EventFormat { csv, evb };

// throws FormatError for anything other than "csv" or "evb"
EventFormat parse_event_format(std::string_view name);

struct ParseOptions
{
  // Required for csv (no header geometry); ignored for evb.
  std::optional<SensorGeometry> geometry;
  // Largest tolerated backwards step in t between consecutive records.
  timestamp_us reorder_slack_us{0};
};

struct EventStream
{
  SensorGeometry geometry;
  std::vector<Event> events;  // non-decreasing t
};

EventStream parse_events(std::istream & source, EventFormat format, const ParseOptions & options);
void write_events(
  std::ostream & sink, EventFormat format, const SensorGeometry & geometry,
  std::span<const Event> events);

EventStream read_event_file(const std::string & path, EventFormat format, const ParseOptions & options);
void write_event_file(
  const std::string & path, EventFormat format, const SensorGeometry & geometry,
  std::span<const Event> events);

struct EventWindow
{
  std::size_t index{0};
  timestamp_us t_start{0};
  timestamp_us t_len{kDefaultWindowUs};
  // Set on the last window when the stream ends before t_start + t_len.
  bool partial{false};
  // Sorted by (pixel linear index, t); ties keep input order.
  std::vector<Event> events;
};

/// Splits a time-sorted stream into consecutive windows [i*t_len, (i+1)*t_len)
/// aligned to t = 0. Windows without events inside the covered range are
/// emitted empty so window indices stay dense. `end_us` is the exclusive end
/// of the recording; it defaults to one past the last event.
std::vector<EventWindow> window_events(
  std::span<const Event> events, timestamp_us t_len, std::optional<timestamp_us> end_us = {});

// Stable sort by (y, x), which equals the linear index order y*width + x.
void sort_by_pixel(std::vector<Event> & events);

struct PixelGroup
{
  std::uint16_t x{0};
  std::uint16_t y{0};
  std::vector<std::int8_t> polarities;
  std::vector<double> phases;  // non-decreasing, in [-pi, pi)
};

std::vector<PixelGroup> group_by_pixel(const EventWindow & window, std::size_t n_min);

// phase = -pi + 2*pi*(t - t_start)/t_len. throws ContractViolation for t outside the window.
std::vector<double> normalize_timestamps(
  std::span<const timestamp_us> t, timestamp_us t_start, timestamp_us t_len);
double normalize_timestamp(timestamp_us t, timestamp_us t_start, timestamp_us t_len);

}  // namespace rotorscope
