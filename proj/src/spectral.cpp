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

#include "rotorscope/spectral.h"

#include <algorithm>
#include <cmath>
#include <experimental/simd>
#include <numbers>

#include "rotorscope/errors.h"

namespace rotorscope
{
namespace
{
namespace stdx = std::experimental;
using Lane = stdx::native_simd<double>;

constexpr std::size_t kBlock = Lane::size();  // modes advanced together
constexpr std::size_t kEvents = 2;            // events interleaved per pass

// Adds the contributions of up to kEvents events to every mode. Each event
// keeps the phasors e^{i k t} for one block of modes and steps the block by
// e^{i kBlock t}, so the recurrence runs modes / kBlock times.
void accumulate(
  const std::int8_t * p, const double * t, std::size_t count, std::size_t modes, double * re, double * im)
{
  double w[kEvents] = {};
  double sr[kEvents] = {};
  double si[kEvents] = {};
  Lane zr[kEvents];
  Lane zi[kEvents];
  for (std::size_t g = 0; g < kEvents; ++g) {
    alignas(stdx::memory_alignment_v<Lane>) double br[kBlock] = {};
    alignas(stdx::memory_alignment_v<Lane>) double bi[kBlock] = {};
    if (g < count) {
      w[g] = p[g];
      const double c = std::cos(t[g]);
      const double s = std::sin(t[g]);
      double ar = 1.0;
      double ai = 0.0;
      for (std::size_t l = 0; l < kBlock; ++l) {
        br[l] = ar;
        bi[l] = ai;
        const double nr = ar * c - ai * s;
        ai = ar * s + ai * c;
        ar = nr;
      }
      sr[g] = std::cos(static_cast<double>(kBlock) * t[g]);
      si[g] = std::sin(static_cast<double>(kBlock) * t[g]);
    }
    zr[g].copy_from(br, stdx::vector_aligned);
    zi[g].copy_from(bi, stdx::vector_aligned);
  }

  const std::size_t full = modes / kBlock * kBlock;
  for (std::size_t k = 0; k < full; k += kBlock) {
    Lane ar(re + k, stdx::element_aligned);
    Lane ai(im + k, stdx::element_aligned);
    for (std::size_t g = 0; g < kEvents; ++g) {
      ar += w[g] * zr[g];
      ai += w[g] * zi[g];
      const Lane nr = zr[g] * sr[g] - zi[g] * si[g];
      zi[g] = zr[g] * si[g] + zi[g] * sr[g];
      zr[g] = nr;
    }
    ar.copy_to(re + k, stdx::element_aligned);
    ai.copy_to(im + k, stdx::element_aligned);
  }
  for (std::size_t k = full; k < modes; ++k) {
    for (std::size_t g = 0; g < kEvents; ++g) {
      re[k] += w[g] * zr[g][k - full];
      im[k] += w[g] * zi[g][k - full];
    }
  }
}

}  // namespace

void ndft_into(std::span<const std::int8_t> polarities, std::span<const double> phases, std::size_t modes, ComplexSpectrum & out)
{
  if (polarities.empty() || polarities.size() != phases.size()) {
    throw ContractViolation("ndft needs equal-length, non-empty polarity and phase sequences");
  }
  if (modes < 2) throw ContractViolation("ndft needs at least 2 modes");

  out.re.assign(modes, 0.0);
  out.im.assign(modes, 0.0);
  const std::size_t m = polarities.size();
  for (std::size_t j = 0; j < m; j += kEvents) {
    accumulate(polarities.data() + j, phases.data() + j, std::min(kEvents, m - j), modes, out.re.data(), out.im.data());
  }
}

ComplexSpectrum ndft(std::span<const std::int8_t> polarities, std::span<const double> phases, std::size_t modes)
{
  ComplexSpectrum out;
  ndft_into(polarities, phases, modes, out);
  return out;
}

void power_spectrum_into(const ComplexSpectrum & spectrum, double bin_hz, PowerSpectrum & out)
{
  out.bin_hz = bin_hz;
  out.power.resize(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    out.power[k] = spectrum.re[k] * spectrum.re[k] + spectrum.im[k] * spectrum.im[k];
  }
}

PowerSpectrum power_spectrum(const ComplexSpectrum & spectrum, double bin_hz)
{
  PowerSpectrum out;
  power_spectrum_into(spectrum, bin_hz, out);
  return out;
}

double power_floor(std::span<const double> power)
{
  double mx = 1.0;
  for (std::size_t k = 1; k < power.size(); ++k) mx = std::max(mx, power[k]);
  return 1e-12 * mx;
}

double spectral_flatness(std::span<const double> power)
{
  if (power.size() < 2) throw ContractViolation("spectral flatness needs K >= 2");
  const double eps = power_floor(power);
  const std::size_t n = power.size() - 1;
  // log of the product, renormalised with frexp so it cannot overflow
  double mant = 1.0;
  long exponent = 0;
  double sum = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double v = power[k] + eps;
    sum += v;
    mant *= v;
    if ((k & 3) == 0) {
      int e = 0;
      mant = std::frexp(mant, &e);
      exponent += e;
    }
  }
  const double log_sum = std::log(mant) + static_cast<double>(exponent) * std::numbers::ln2;
  const double nd = static_cast<double>(n);
  const double sf = std::exp(log_sum / nd) / (sum / nd);
  return std::min(sf, 1.0);
}

double spectral_flatness(const PowerSpectrum & spectrum) { return spectral_flatness(spectrum.power); }

}  // namespace rotorscope
