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
#include <optional>
#include <span>
#include <vector>

#include "rotorscope/params.h"
#include "rotorscope/spectral.h"

namespace rotorscope
{
// Inclusive bin range.
struct BinRange
{
  std::size_t lo{0};
  std::size_t hi{0};
  bool operator==(const BinRange &) const = default;
};

struct HarmonicWindows
{
  std::vector<BinRange> windows;  // one per valid harmonic, ascending m
  std::size_t m_valid{0};
};

/// Windows [m*omega - delta_k, m*omega + delta_k] for m = 1..M that lie
/// entirely inside the spectrum [0, K-1]. A window is never clipped; one
/// that does not fit is dropped.
/// throws ContractViolation unless 1 <= omega < K.
HarmonicWindows harmonic_windows(std::size_t omega, const DetectorParams & params);

// Mean over valid harmonics of the peak power inside each window, or nullopt
// when fewer than h_min harmonics are in band.
std::optional<double> comb_score(const PowerSpectrum & spectrum, std::size_t omega, const DetectorParams & params);

// Median power over bins 1..K-1 outside every window; nullopt if that set is empty.
std::optional<double> median_baseline(const PowerSpectrum & spectrum, std::span<const BinRange> windows);

// comb_score / max(median_baseline, power_floor); nullopt for an invalid candidate.
std::optional<double> rotor_snr(const PowerSpectrum & spectrum, std::size_t omega, const DetectorParams & params);

struct PixelVerdict
{
  bool is_rotor{false};
  std::optional<std::size_t> omega;  // set iff is_rotor
  double f_hz{0.0};
  double snr{0.0};  // best SNR over candidates; 0 when the comb was never evaluated
  double sf{1.0};
};

/// Flatness gate first (sf > tau_sf rejects without touching the comb),
/// then the median-normalised comb sweep over omega in [omega_min, K-1].
/// Ties on SNR resolve to the smallest omega.
PixelVerdict classify_pixel(const PowerSpectrum & spectrum, const DetectorParams & params);

}  // namespace rotorscope
