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
#include <string>
#include <string_view>

#include <json.hpp>

namespace rotorscope
{
// Every threshold the detector uses. Defaults are the tuned values for
// 33.3 ms windows at 30 FPS.
struct DetectorParams
{
  double tau_sf{0.89};       // spectral-flatness ceiling
  double tau_comb{1.5};      // comb SNR floor
  std::size_t M{4};          // harmonics per comb
  std::size_t delta_k{3};    // harmonic half-bandwidth, bins
  std::size_t h_min{4};      // min in-band harmonics
  std::size_t n_min{6};      // min events per pixel per window
  std::size_t A_min{147};    // min box area, px^2
  double alpha{19.05};       // centroid join radius factor
  std::size_t K{512};        // NDFT modes
  std::size_t omega_min{2};  // lowest candidate fundamental, bins

  // throws ValidationError naming the first violated bound
  void validate() const;

  // Applies "key=value" to the named field. throws ValidationError on an
  // unknown key or an unparsable value (no range check; call validate()).
  void set(std::string_view assignment);

  bool operator==(const DetectorParams &) const = default;
};

void to_json(nlohmann::json & j, const DetectorParams & p);
// Missing fields keep their defaults; unknown fields are rejected.
void from_json(const nlohmann::json & j, DetectorParams & p);

DetectorParams load_params(const std::string & path);
void save_params(const std::string & path, const DetectorParams & params);

}  // namespace rotorscope
