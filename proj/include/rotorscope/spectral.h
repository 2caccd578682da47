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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rotorscope/events.h"

namespace rotorscope
{
inline constexpr std::size_t kDefaultModes = 512;

struct ComplexSpectrum
{
  std::vector<double> re;
  std::vector<double> im;

  std::size_t size() const { return re.size(); }
  std::complex<double> operator[](std::size_t k) const { return {re[k], im[k]}; }
};

struct PowerSpectrum
{
  std::vector<double> power;
  double bin_hz{1.0};

  std::size_t size() const { return power.size(); }
  double operator[](std::size_t k) const { return power[k]; }
};

// Hz per mode for a window of t_len microseconds (mode k = k cycles per window).
inline double bin_hz_for(timestamp_us t_len) { return 1e6 / static_cast<double>(t_len); }

/// Non-uniform DFT of a signed event train:
///   F_k = sum_j p_j * exp(i k t_j),  k = 0 .. modes-1,
/// where t_j are phases in [-pi, pi). Evaluated with a per-event phasor
/// recurrence, two events per pass; agrees with the direct double
/// sum to rounding.
/// throws ContractViolation on empty or mismatched input, or modes < 2.
ComplexSpectrum ndft(std::span<const std::int8_t> polarities, std::span<const double> phases, std::size_t modes);

PowerSpectrum power_spectrum(const ComplexSpectrum & spectrum, double bin_hz);

/// Same as ndft, writing into `out` and reusing its storage.
void ndft_into(std::span<const std::int8_t> polarities, std::span<const double> phases, std::size_t modes, ComplexSpectrum & out);

/// Same as power_spectrum, writing into `out` and reusing its storage.
void power_spectrum_into(const ComplexSpectrum & spectrum, double bin_hz, PowerSpectrum & out);

// Spectral flatness over bins 1..K-1 with an epsilon floor of
// 1e-12 * max(1, max P_k). Result in (0, 1].
double spectral_flatness(const PowerSpectrum & spectrum);
double spectral_flatness(std::span<const double> power);

// 1e-12 * max(1, max_{k>=1} P_k)
double power_floor(std::span<const double> power);

}  // namespace rotorscope
