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

#include "rotorscope/events.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <numbers>
#include <ostream>
#include <sstream>

#include "rotorscope/errors.h"

namespace rotorscope
{
namespace
{
constexpr std::array<char, 4> kEvbMagic{'E', 'V', 'B', '1'};
constexpr std::size_t kEvbHeaderBytes = 4 + 2 + 2 + 8;
constexpr std::size_t kEvbRecordBytes = 8 + 2 + 2 + 1;

std::int8_t canonical_polarity(long long p, std::size_t where)
{
  switch (p) {
    case -1:
    case 0:
      return -1;
    case 1:
      return 1;
    default:
      throw ParseError("polarity must be one of -1, 0, 1, got " + std::to_string(p), where);
  }
}

template <typename T>
T read_le(const unsigned char * b)
{
  T v{0};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(static_cast<T>(b[i]) << (8 * i));
  }
  return v;
}

template <typename T>
void put_le(std::string & out, T v)
{
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((u >> (8 * i)) & 0xFF));
  }
}

// Checks geometry and ordering for one decoded record, tracking the running maximum t.
void admit(
  const Event & e, long long x, long long y, const SensorGeometry & g, timestamp_us slack,
  timestamp_us & max_t, bool & out_of_order, std::size_t where)
{
  if (!g.contains(x, y)) {
    throw ValidationError(
      "event (" + std::to_string(x) + "," + std::to_string(y) + ") outside " +
      std::to_string(g.width) + "x" + std::to_string(g.height) + " sensor at " +
      std::to_string(where));
  }
  if (e.t < max_t) {
    if (max_t - e.t > slack) {
      throw ValidationError(
        "timestamp " + std::to_string(e.t) + " goes back more than " + std::to_string(slack) +
        " us at " + std::to_string(where));
    }
    out_of_order = true;
  }
  max_t = std::max(max_t, e.t);
}

void sort_by_time(std::vector<Event> & events)
{
  std::stable_sort(
    events.begin(), events.end(), [](const Event & a, const Event & b) { return a.t < b.t; });
}

template <typename T>
T parse_field(std::string_view s, std::size_t line, const char * name)
{
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("bad " + std::string(name) + " field '" + std::string(s) + "'", line);
  }
  return v;
}

EventStream parse_csv(std::istream & in, const ParseOptions & opt)
{
  if (!opt.geometry) {
    throw ValidationError("csv input requires a declared sensor geometry");
  }
  opt.geometry->validate();
  EventStream out{*opt.geometry, {}};
  std::string line;
  std::size_t lineno = 0;
  timestamp_us max_t = 0;
  bool out_of_order = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "t_us,x,y,p") throw ParseError("expected header 't_us,x,y,p'", lineno);
      continue;
    }
    if (line.empty()) continue;
    std::array<std::string_view, 4> f;
    std::string_view rest(line);
    for (std::size_t i = 0; i < 4; ++i) {
      auto comma = rest.find(',');
      if ((i < 3) != (comma != std::string_view::npos)) {
        throw ParseError("expected 4 comma-separated fields", lineno);
      }
      f[i] = rest.substr(0, comma);
      rest = i < 3 ? rest.substr(comma + 1) : std::string_view{};
    }
    const auto t = parse_field<timestamp_us>(f[0], lineno, "t_us");
    const auto x = parse_field<long long>(f[1], lineno, "x");
    const auto y = parse_field<long long>(f[2], lineno, "y");
    const auto p = parse_field<long long>(f[3], lineno, "p");
    Event e{t, 0, 0, canonical_polarity(p, lineno)};
    admit(e, x, y, out.geometry, opt.reorder_slack_us, max_t, out_of_order, lineno);
    e.x = static_cast<std::uint16_t>(x);
    e.y = static_cast<std::uint16_t>(y);
    out.events.push_back(e);
  }
  if (lineno == 0) throw ParseError("empty csv input", 1);
  if (out_of_order) sort_by_time(out.events);
  return out;
}

EventStream parse_evb(std::istream & in, const ParseOptions & opt)
{
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (bytes.size() < kEvbMagic.size() || !std::equal(kEvbMagic.begin(), kEvbMagic.end(), bytes.begin())) {
    throw FormatError("not an EVB1 stream (bad magic)");
  }
  if (bytes.size() < kEvbHeaderBytes) throw ParseError("truncated EVB header", bytes.size());
  const auto * b = reinterpret_cast<const unsigned char *>(bytes.data());
  EventStream out;
  out.geometry.width = read_le<std::uint16_t>(b + 4);
  out.geometry.height = read_le<std::uint16_t>(b + 6);
  const auto count = read_le<std::uint64_t>(b + 8);
  out.geometry.validate();
  const std::size_t payload = bytes.size() - kEvbHeaderBytes;
  if (count > payload / kEvbRecordBytes) {
    throw ParseError(
      "EVB header declares " + std::to_string(count) + " records but payload is truncated",
      kEvbHeaderBytes + (payload / kEvbRecordBytes) * kEvbRecordBytes);
  }
  if (payload != count * kEvbRecordBytes) {
    throw ParseError("trailing bytes after EVB records", kEvbHeaderBytes + count * kEvbRecordBytes);
  }
  out.events.reserve(count);
  timestamp_us max_t = 0;
  bool out_of_order = false;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t off = kEvbHeaderBytes + i * kEvbRecordBytes;
    const unsigned char * r = b + off;
    const auto raw_p = static_cast<std::int8_t>(r[12]);
    Event e{read_le<std::uint64_t>(r), read_le<std::uint16_t>(r + 8), read_le<std::uint16_t>(r + 10),
            canonical_polarity(raw_p, off + 12)};
    admit(e, e.x, e.y, out.geometry, opt.reorder_slack_us, max_t, out_of_order, off);
    out.events.push_back(e);
  }
  if (out_of_order) sort_by_time(out.events);
  return out;
}

}  // namespace

void SensorGeometry::validate() const
{
  if (width < 1 || height < 1 || width > 0xFFFF || height > 0xFFFF) {
    throw ValidationError(
      "invalid sensor geometry " + std::to_string(width) + "x" + std::to_string(height));
  }
}

EventFormat parse_event_format(std::string_view name)
{
  if (name == "csv") return EventFormat::csv;
  if (name == "evb") return EventFormat::evb;
  throw FormatError("unknown event format '" + std::string(name) + "'");
}

EventStream parse_events(std::istream & source, EventFormat format, const ParseOptions & options)
{
  return format == EventFormat::csv ? parse_csv(source, options) : parse_evb(source, options);
}

void write_events(
  std::ostream & sink, EventFormat format, const SensorGeometry & geometry,
  std::span<const Event> events)
{
  geometry.validate();
  if (format == EventFormat::csv) {
    sink << "t_us,x,y,p\n";
    for (const auto & e : events) {
      sink << e.t << ',' << e.x << ',' << e.y << ',' << static_cast<int>(e.p) << '\n';
    }
    return;
  }
  std::string out;
  out.reserve(kEvbHeaderBytes + events.size() * kEvbRecordBytes);
  out.append(kEvbMagic.begin(), kEvbMagic.end());
  put_le(out, static_cast<std::uint16_t>(geometry.width));
  put_le(out, static_cast<std::uint16_t>(geometry.height));
  put_le(out, static_cast<std::uint64_t>(events.size()));
  for (const auto & e : events) {
    put_le(out, e.t);
    put_le(out, e.x);
    put_le(out, e.y);
    put_le(out, e.p);
  }
  sink.write(out.data(), static_cast<std::streamsize>(out.size()));
}

EventStream read_event_file(const std::string & path, EventFormat format, const ParseOptions & options)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_events(in, format, options);
}

void write_event_file(
  const std::string & path, EventFormat format, const SensorGeometry & geometry,
  std::span<const Event> events)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_events(out, format, geometry, events);
}

void sort_by_pixel(std::vector<Event> & events)
{
  if (events.size() < 4096) {
    std::stable_sort(events.begin(), events.end(), [](const Event & a, const Event & b) {
      return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    return;
  }
  // two stable 16-bit counting passes: x then y
  std::vector<Event> tmp(events.size());
  std::vector<std::size_t> count(1u << 16);
  for (int pass = 0; pass < 2; ++pass) {
    std::fill(count.begin(), count.end(), 0);
    auto key = [pass](const Event & e) -> std::size_t { return pass == 0 ? e.x : e.y; };
    for (const auto & e : events) ++count[key(e)];
    std::size_t sum = 0;
    for (auto & c : count) {
      const auto n = c;
      c = sum;
      sum += n;
    }
    for (const auto & e : events) tmp[count[key(e)]++] = e;
    events.swap(tmp);
  }
}

std::vector<EventWindow> window_events(
  std::span<const Event> events, timestamp_us t_len, std::optional<timestamp_us> end_us)
{
  if (t_len < 1) throw ContractViolation("window length must be >= 1 us");
  std::vector<EventWindow> out;
  if (events.empty() && !end_us) return out;
  const timestamp_us end = end_us ? *end_us : events.back().t + 1;
  if (!events.empty() && events.back().t >= end) {
    throw ContractViolation("event beyond the declared recording end");
  }
  const std::size_t n_windows = static_cast<std::size_t>((end + t_len - 1) / t_len);
  out.resize(n_windows);
  for (std::size_t i = 0; i < n_windows; ++i) {
    out[i].index = i;
    out[i].t_start = i * t_len;
    out[i].t_len = t_len;
  }
  if (n_windows > 0) out.back().partial = end < n_windows * t_len;

  timestamp_us prev = 0;
  for (const auto & e : events) {
    if (e.t < prev) throw ContractViolation("window_events requires time-sorted input");
    prev = e.t;
    out[static_cast<std::size_t>(e.t / t_len)].events.push_back(e);
  }
  for (auto & w : out) sort_by_pixel(w.events);
  return out;
}

double normalize_timestamp(timestamp_us t, timestamp_us t_start, timestamp_us t_len)
{
  if (t < t_start || t - t_start >= t_len) {
    throw ContractViolation(
      "timestamp " + std::to_string(t) + " outside window [" + std::to_string(t_start) + ", " +
      std::to_string(t_start + t_len) + ")");
  }
  constexpr double pi = std::numbers::pi;
  const double phase = -pi + 2.0 * pi * static_cast<double>(t - t_start) / static_cast<double>(t_len);
  return phase < pi ? phase : std::nextafter(pi, 0.0);
}

std::vector<double> normalize_timestamps(
  std::span<const timestamp_us> t, timestamp_us t_start, timestamp_us t_len)
{
  std::vector<double> out;
  out.reserve(t.size());
  for (auto v : t) out.push_back(normalize_timestamp(v, t_start, t_len));
  return out;
}

std::vector<PixelGroup> group_by_pixel(const EventWindow & window, std::size_t n_min)
{
  std::vector<PixelGroup> groups;
  const auto & ev = window.events;
  std::size_t i = 0;
  while (i < ev.size()) {
    std::size_t j = i + 1;
    while (j < ev.size() && ev[j].x == ev[i].x && ev[j].y == ev[i].y) ++j;
    if (j - i >= n_min) {
      PixelGroup g;
      g.x = ev[i].x;
      g.y = ev[i].y;
      g.polarities.reserve(j - i);
      g.phases.reserve(j - i);
      for (std::size_t k = i; k < j; ++k) {
        g.polarities.push_back(ev[k].p);
        g.phases.push_back(normalize_timestamp(ev[k].t, window.t_start, window.t_len));
      }
      groups.push_back(std::move(g));
    }
    i = j;
  }
  return groups;
}

}  // namespace rotorscope
