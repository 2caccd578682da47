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

#include "rotorscope/params.h"

#include <charconv>
#include <fstream>

#include "rotorscope/errors.h"

namespace rotorscope
{
namespace
{
template <typename F>
void for_each_field(DetectorParams & p, F && f)
{
  f("tau_sf", p.tau_sf);
  f("tau_comb", p.tau_comb);
  f("M", p.M);
  f("delta_k", p.delta_k);
  f("h_min", p.h_min);
  f("n_min", p.n_min);
  f("A_min", p.A_min);
  f("alpha", p.alpha);
  f("K", p.K);
  f("omega_min", p.omega_min);
}

void require(bool ok, const char * what)
{
  if (!ok) throw ValidationError(std::string("detector params: ") + what);
}

template <typename T>
T parse_number(std::string_view s, std::string_view key)
{
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ValidationError("bad value '" + std::string(s) + "' for " + std::string(key));
  }
  return v;
}

}  // namespace

void DetectorParams::validate() const
{
  require(tau_sf > 0.0 && tau_sf <= 1.0, "tau_sf must be in (0, 1]");
  require(tau_comb >= 1.0, "tau_comb must be >= 1");
  require(h_min >= 2, "h_min must be >= 2");
  require(M >= h_min, "M must be >= h_min");
  require(n_min >= 2, "n_min must be >= 2");
  require(A_min >= 1, "A_min must be >= 1");
  require(alpha > 0.0, "alpha must be > 0");
  require(K >= 2, "K must be >= 2");
  require(omega_min >= 1 && omega_min < K, "omega_min must be in [1, K)");
}

void DetectorParams::set(std::string_view assignment)
{
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ValidationError("expected key=value, got '" + std::string(assignment) + "'");
  }
  const auto key = assignment.substr(0, eq);
  const auto value = assignment.substr(eq + 1);
  bool found = false;
  for_each_field(*this, [&](std::string_view name, auto & field) {
    if (name != key) return;
    found = true;
    field = parse_number<std::remove_reference_t<decltype(field)>>(value, key);
  });
  if (!found) throw ValidationError("unknown parameter '" + std::string(key) + "'");
}

void to_json(nlohmann::json & j, const DetectorParams & p)
{
  j = nlohmann::json::object();
  auto copy = p;
  for_each_field(copy, [&](const char * name, auto & field) { j[name] = field; });
}

void from_json(const nlohmann::json & j, DetectorParams & p)
{
  if (!j.is_object()) throw ValidationError("detector params must be a JSON object");
  std::size_t matched = 0;
  for_each_field(p, [&](const char * name, auto & field) {
    auto it = j.find(name);
    if (it == j.end()) return;
    ++matched;
    using T = std::remove_reference_t<decltype(field)>;
    if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_unsigned()) {
        throw ValidationError(std::string("detector params: ") + name + " must be a non-negative integer");
      }
    } else if (!it->is_number()) {
      throw ValidationError(std::string("detector params: ") + name + " must be a number");
    }
    field = it->get<T>();
  });
  if (matched != j.size()) throw ValidationError("detector params: unknown field in JSON object");
}

DetectorParams load_params(const std::string & path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error & e) {
    throw ParseError(std::string("params JSON: ") + e.what(), e.byte);
  }
  return j.get<DetectorParams>();
}

void save_params(const std::string & path, const DetectorParams & params)
{
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << nlohmann::json(params).dump(2) << '\n';
}

}  // namespace rotorscope
