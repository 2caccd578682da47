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

#include "rotorscope/fingerprint.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <utility>

#include "rotorscope/errors.h"

namespace rotorscope
{
namespace
{
void check_size(const PowerSpectrum & spectrum, const DetectorParams & params)
{
  if (spectrum.size() != params.K) {
    throw ContractViolation(
      "spectrum has " + std::to_string(spectrum.size()) + " modes, params.K = " +
      std::to_string(params.K));
  }
}

// First valid harmonic index for omega under the lower in-band rule.
std::size_t first_harmonic(std::size_t omega, std::size_t delta_k)
{
  return std::max<std::size_t>(1, (delta_k + omega - 1) / omega);
}

double median_of_sorted(const std::vector<double> & s)
{
  const std::size_t a = (s.size() - 1) / 2;
  const std::size_t b = s.size() / 2;
  return (s[a] + s[b]) / 2.0;
}

constexpr std::uint32_t kBelow = std::numeric_limits<std::uint32_t>::max() - 1;
constexpr std::uint32_t kAbove = std::numeric_limits<std::uint32_t>::max();

// Per-thread scratch for the comb sweep.
//
// The median of the complement only ever moves within a band of order
// statistics around the full-spectrum median: excluding e bins shifts the
// target rank by at most e. So one partial sort per pixel gives the exact
// ranks of that band, and each candidate is resolved by skipping its
// excluded ranks inside the band.
struct SweepScratch
{
  std::vector<double> values;
  std::vector<double> spare;
  std::vector<std::pair<double, std::uint32_t>> order;  // bins tied with or inside the band
  std::vector<std::uint32_t> rank;       // band rank, kBelow or kAbove per bin
  std::vector<std::uint32_t> below_upto;  // bins in 1..k-1 ranked below the band
  std::vector<double> band_value;        // value at band rank, offset by band_lo
  std::vector<double> window_max;        // max over [c - delta_k, c + delta_k]
  std::vector<std::uint64_t> excluded;   // band ranks removed by the current candidate
};

// Position of the n-th (0-based) set bit of a non-zero word.
unsigned select_bit(std::uint64_t word, unsigned n)
{
  unsigned pos = 0;
  for (unsigned half = 32; half > 0; half /= 2) {
    const std::uint64_t low = word & ((std::uint64_t{1} << half) - 1);
    const auto c = static_cast<unsigned>(std::popcount(low));
    if (n >= c) {
      n -= c;
      word >>= half;
      pos += half;
    } else {
      word = low;
    }
  }
  return pos;
}

// Value of the n-th band rank (0-based) not flagged in `excluded`.
double select_kept(const SweepScratch & s, std::size_t band_size, std::size_t n)
{
  for (std::size_t w = 0; w < s.excluded.size(); ++w) {
    const std::size_t base = w * 64;
    const std::size_t width = std::min<std::size_t>(64, band_size - base);
    std::uint64_t kept = ~s.excluded[w];
    if (width < 64) kept &= (std::uint64_t{1} << width) - 1;
    const auto count = static_cast<std::size_t>(std::popcount(kept));
    if (n < count) return s.band_value[base + select_bit(kept, static_cast<unsigned>(n))];
    n -= count;
  }
  throw ContractViolation("median rank fell outside the precomputed band");
}

// k-th smallest of buf[0][0..len), branch-free quickselect; all three buffers are clobbered.
double select_value(std::array<double *, 3> buf, std::size_t len, std::size_t k)
{
  std::size_t cur = 0;
  double * src = buf[0];
  bool stalled = false;
  for (;;) {
    const std::size_t next = (cur + 1) % 3;
    double * out = buf[next];
    if (len < 64 || stalled) {
      stalled = false;
      const double a = src[0];
      const double b = src[len / 2];
      const double c = src[len - 1];
      const double pivot = std::max(std::min(a, b), std::min(std::max(a, b), c));
      std::size_t less = 0;
      std::size_t greater = 0;
      for (std::size_t i = 0; i < len; ++i) {
        const double x = src[i];
        out[less] = x;
        out[len - 1 - greater] = x;
        less += x < pivot ? 1 : 0;
        greater += x > pivot ? 1 : 0;
      }
      if (k >= less && k < len - greater) return pivot;
      if (k < less) {
        src = out;
        len = less;
      } else {
        k -= len - greater;
        src = out + (len - greater);
        len = greater;
      }
      cur = next;
      continue;
    }
    // two pivots bracketing the target's relative rank in an evenly spaced sample
    std::array<double, 15> sample{};
    for (std::size_t i = 0; i < sample.size(); ++i) sample[i] = src[i * (len - 1) / (sample.size() - 1)];
    std::sort(sample.begin(), sample.end());
    const std::size_t j = k * sample.size() / len;
    const double lo = sample[j > 1 ? j - 2 : 0];
    const double hi = sample[std::min(sample.size() - 1, j + 2)];
    const std::size_t other = (cur + 2) % 3;
    double * mid = buf[other];
    std::size_t less = 0;
    std::size_t greater = 0;
    std::size_t inside = 0;
    for (std::size_t i = 0; i < len; ++i) {
      const double x = src[i];
      out[less] = x;
      out[len - 1 - greater] = x;
      mid[inside] = x;
      const bool below = x < lo;
      const bool above = x > hi;
      less += below ? 1 : 0;
      greater += above ? 1 : 0;
      inside += below || above ? 0 : 1;
    }
    if (k < less) {
      src = out;
      len = less;
      cur = next;
    } else if (k >= len - greater) {
      k -= len - greater;
      src = out + (len - greater);
      len = greater;
      cur = next;
    } else {
      stalled = inside == len;
      k -= less;
      src = mid;
      len = inside;
      cur = other;
    }
  }
}

bool value_then_bin(const std::pair<double, std::uint32_t> & a, const std::pair<double, std::uint32_t> & b)
{
  return a.first < b.first || (a.first == b.first && a.second < b.second);
}

}  // namespace

HarmonicWindows harmonic_windows(std::size_t omega, const DetectorParams & params)
{
  if (omega < 1 || omega >= params.K) {
    throw ContractViolation("candidate omega " + std::to_string(omega) + " outside [1, K)");
  }
  HarmonicWindows out;
  for (std::size_t m = first_harmonic(omega, params.delta_k); m <= params.M; ++m) {
    const std::size_t centre = m * omega;
    if (centre + params.delta_k > params.K - 1) break;
    out.windows.push_back({centre - params.delta_k, centre + params.delta_k});
  }
  out.m_valid = out.windows.size();
  return out;
}

std::optional<double> comb_score(const PowerSpectrum & spectrum, std::size_t omega, const DetectorParams & params)
{
  check_size(spectrum, params);
  const auto hw = harmonic_windows(omega, params);
  if (hw.m_valid < params.h_min || hw.m_valid == 0) return std::nullopt;
  double sum = 0.0;
  for (const auto & w : hw.windows) {
    sum += *std::max_element(spectrum.power.begin() + w.lo, spectrum.power.begin() + w.hi + 1);
  }
  return sum / static_cast<double>(hw.m_valid);
}

std::optional<double> median_baseline(const PowerSpectrum & spectrum, std::span<const BinRange> windows)
{
  std::vector<bool> excluded(spectrum.size(), false);
  for (const auto & w : windows) {
    for (std::size_t k = w.lo; k <= w.hi && k < spectrum.size(); ++k) excluded[k] = true;
  }
  std::vector<double> rest;
  for (std::size_t k = 1; k < spectrum.size(); ++k) {
    if (!excluded[k]) rest.push_back(spectrum[k]);
  }
  if (rest.empty()) return std::nullopt;
  std::sort(rest.begin(), rest.end());
  return median_of_sorted(rest);
}

std::optional<double> rotor_snr(const PowerSpectrum & spectrum, std::size_t omega, const DetectorParams & params)
{
  const auto n = comb_score(spectrum, omega, params);
  if (!n) return std::nullopt;
  const auto hw = harmonic_windows(omega, params);
  const auto base = median_baseline(spectrum, hw.windows);
  if (!base) return std::nullopt;
  return *n / std::max(*base, power_floor(spectrum.power));
}

PixelVerdict classify_pixel(const PowerSpectrum & spectrum, const DetectorParams & params)
{
  check_size(spectrum, params);
  PixelVerdict verdict;
  verdict.sf = spectral_flatness(spectrum);
  if (verdict.sf > params.tau_sf) return verdict;

  const auto & P = spectrum.power;
  const std::size_t K = P.size();
  const std::size_t n = K - 1;  // bins 1..K-1
  const std::size_t dk = params.delta_k;
  const std::size_t max_excluded = std::min(n, params.M * (2 * dk + 1));

  thread_local SweepScratch s;
  const std::size_t band_lo = (n - max_excluded - (n > max_excluded ? 1 : 0)) / 2;
  const std::size_t band_hi = std::min(n - 1, n / 2 + max_excluded);
  const std::size_t band_size = band_hi - band_lo + 1;

  // Ranks follow (value, bin); select on values, then order only the bins that can fall in the band.
  s.values.assign(P.begin() + 1, P.end());
  s.spare.resize(2 * n);
  const std::array<double *, 3> buffers{s.values.data(), s.spare.data(), s.spare.data() + n};
  const double v_lo = select_value(buffers, n, band_lo);
  std::size_t at_most = 0;
  std::size_t above = 0;
  for (std::size_t k = 1; k < K; ++k) {
    const double v = P[k];
    s.values[above] = v;
    above += v > v_lo ? 1 : 0;
    at_most += v > v_lo ? 0 : 1;
  }
  const double v_hi =
    band_hi < at_most ? v_lo : select_value(buffers, above, band_hi - at_most);
  s.rank.resize(K);
  s.rank[0] = kAbove;
  s.order.clear();
  s.below_upto.resize(K + 1);
  s.below_upto[0] = 0;
  s.below_upto[1] = 0;
  std::size_t below = 0;
  for (std::size_t k = 1; k < K; ++k) {
    const double v = P[k];
    below += v < v_lo ? 1 : 0;
    s.below_upto[k + 1] = static_cast<std::uint32_t>(below);
    s.rank[k] = v < v_lo ? kBelow : kAbove;
    if (v >= v_lo && v <= v_hi) s.order.emplace_back(v, static_cast<std::uint32_t>(k));
  }
  bool promoted = false;
  std::sort(s.order.begin(), s.order.end(), value_then_bin);
  s.band_value.resize(band_size);
  for (std::size_t j = 0; j < s.order.size(); ++j) {
    const std::size_t r = below + j;
    const auto k = s.order[j].second;
    if (r < band_lo) {
      s.rank[k] = kBelow;
      promoted = true;
    } else if (r <= band_hi) {
      s.rank[k] = static_cast<std::uint32_t>(r - band_lo);
      s.band_value[r - band_lo] = s.order[j].first;
    }
  }
  if (promoted) {
    // bins tied with the band's lower edge can rank below it
    for (std::size_t k = 1; k < K; ++k) s.below_upto[k + 1] = s.below_upto[k] + (s.rank[k] == kBelow ? 1 : 0);
  }

  s.window_max.assign(K, 0.0);
  if (K > 2 * dk) {
    double * wm = s.window_max.data() + dk;
    const std::size_t centres = K - 2 * dk;
    for (std::size_t d = 0; d <= 2 * dk; ++d) {
      const double * src = P.data() + d;
      for (std::size_t c = 0; c < centres; ++c) wm[c] = std::max(wm[c], src[c]);
    }
  }
  s.excluded.resize((band_size + 63) / 64);

  const double floor = power_floor(P);
  double best = -1.0;
  std::size_t best_omega = 0;
  for (std::size_t omega = params.omega_min; omega < K; ++omega) {
    const std::size_t m0 = first_harmonic(omega, dk);
    const std::size_t m_top = std::min(params.M, (K - 1 - std::min(dk, K - 1)) / omega);
    const std::size_t m_valid = m_top >= m0 ? m_top - m0 + 1 : 0;
    if (m_valid < params.h_min || m_valid == 0) {
      // with m0 = 1 the harmonic count only shrinks as omega grows
      if (m0 == 1) break;
      continue;
    }
    double peak_sum = 0.0;
    std::size_t excluded = 0;
    std::size_t excluded_below = 0;
    std::size_t covered = 0;  // windows are ascending; skip bins already taken
    for (std::size_t m = m0; m <= m_top; ++m) {
      const std::size_t centre = m * omega;
      peak_sum += s.window_max[centre];
      const std::size_t lo = std::max({std::size_t{1}, centre - dk, covered + 1});
      const std::size_t hi = centre + dk;
      if (lo > hi) continue;
      excluded += hi - lo + 1;
      excluded_below += s.below_upto[hi + 1] - s.below_upto[lo];
      covered = hi;
    }
    const std::size_t kept = n - excluded;
    if (kept == 0) continue;
    // complement ranks below the band come first
    const std::size_t first = band_lo - excluded_below;
    const std::size_t ia = (kept - 1) / 2 - first;
    const std::size_t ib = kept / 2 - first;
    const double peak_mean = peak_sum / static_cast<double>(m_valid);
    // exclusions only raise the median, so the unexcluded band gives an upper bound on the score
    const double bound = peak_mean / std::max((s.band_value[ia] + s.band_value[ib]) / 2.0, floor);
    if (!(bound > best)) continue;

    std::fill(s.excluded.begin(), s.excluded.end(), 0);
    covered = 0;
    for (std::size_t m = m0; m <= m_top; ++m) {
      const std::size_t hi = m * omega + dk;
      for (std::size_t k = std::max({std::size_t{1}, m * omega - dk, covered + 1}); k <= hi; ++k) {
        const auto r = s.rank[k];
        if (r < kBelow) s.excluded[r >> 6] |= std::uint64_t{1} << (r & 63);
      }
      covered = std::max(covered, hi);
    }
    const double va = select_kept(s, band_size, ia);
    const double vb = kept % 2 ? va : select_kept(s, band_size, ib);
    const double baseline = (va + vb) / 2.0;
    const double snr = peak_mean / std::max(baseline, floor);
    if (snr > best) {
      best = snr;
      best_omega = omega;
    }
  }
  if (best < 0.0) return verdict;
  verdict.snr = best;
  if (best >= params.tau_comb) {
    verdict.is_rotor = true;
    verdict.omega = best_omega;
    verdict.f_hz = static_cast<double>(best_omega) * spectrum.bin_hz;
  }
  return verdict;
}

}  // namespace rotorscope
