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

// Independent reference implementations used only by tests. None of these
// share code paths with the library routines they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "rotorscope/fingerprint.h"
#include "rotorscope/segmentation.h"

namespace rotorscope::oracle
{
// Direct double sum with std::polar for every (k, j).
inline std::vector<std::complex<double>> naive_ndft(
  const std::vector<std::int8_t> & p, const std::vector<double> & phase, std::size_t modes)
{
  std::vector<std::complex<double>> f(modes);
  for (std::size_t k = 0; k < modes; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < p.size(); ++j) {
      acc += static_cast<double>(p[j]) * std::polar(1.0, static_cast<double>(k) * phase[j]);
    }
    f[k] = acc;
  }
  return f;
}

// Re-evaluates the comb SNR of one candidate straight from its definition.
inline std::optional<double> comb_snr(const std::vector<double> & P, std::size_t omega, const DetectorParams & q)
{
  const long K = static_cast<long>(P.size());
  const long dk = static_cast<long>(q.delta_k);
  std::vector<std::pair<long, long>> wins;
  for (long m = 1; m <= static_cast<long>(q.M); ++m) {
    const long c = m * static_cast<long>(omega);
    if (c + dk > K - 1) break;
    if (c - dk < 0) continue;
    wins.push_back({c - dk, c + dk});
  }
  if (wins.size() < q.h_min || wins.empty()) return std::nullopt;
  double sum = 0.0;
  for (auto [lo, hi] : wins) {
    double mx = P[static_cast<std::size_t>(lo)];
    for (long k = lo; k <= hi; ++k) mx = std::max(mx, P[static_cast<std::size_t>(k)]);
    sum += mx;
  }
  const double n = sum / static_cast<double>(wins.size());
  std::vector<double> rest;
  double top = 1.0;
  for (long k = 1; k < K; ++k) {
    top = std::max(top, P[static_cast<std::size_t>(k)]);
    bool inside = false;
    for (auto [lo, hi] : wins) inside = inside || (k >= lo && k <= hi);
    if (!inside) rest.push_back(P[static_cast<std::size_t>(k)]);
  }
  if (rest.empty()) return std::nullopt;
  std::sort(rest.begin(), rest.end());
  const double med = (rest[(rest.size() - 1) / 2] + rest[rest.size() / 2]) / 2.0;
  return n / std::max(med, 1e-12 * top);
}

struct SweepResult
{
  double best{-1.0};
  std::size_t omega{0};
};

inline SweepResult comb_sweep(const std::vector<double> & P, const DetectorParams & q)
{
  SweepResult r;
  for (std::size_t w = q.omega_min; w < P.size(); ++w) {
    const auto s = comb_snr(P, w, q);
    if (s && *s > r.best) {
      r.best = *s;
      r.omega = w;
    }
  }
  return r;
}

// Breadth-first flood fill; returns, per true pixel, the set of pixels in its component.
inline std::set<std::set<std::size_t>> flood_fill_partition(const RotorMask & mask)
{
  const long w = mask.geometry.width;
  const long h = mask.geometry.height;
  std::vector<bool> seen(mask.cells.size(), false);
  std::set<std::set<std::size_t>> parts;
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      const auto i = static_cast<std::size_t>(y * w + x);
      if (!mask.cells[i] || seen[i]) continue;
      std::set<std::size_t> part;
      std::vector<std::size_t> queue{i};
      seen[i] = true;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto c = queue[head];
        part.insert(c);
        const long cx = static_cast<long>(c) % w;
        const long cy = static_cast<long>(c) / w;
        for (long dy = -1; dy <= 1; ++dy) {
          for (long dx = -1; dx <= 1; ++dx) {
            const long nx = cx + dx;
            const long ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const auto n = static_cast<std::size_t>(ny * w + nx);
            if (mask.cells[n] && !seen[n]) {
              seen[n] = true;
              queue.push_back(n);
            }
          }
        }
      }
      parts.insert(part);
    }
  }
  return parts;
}

inline double box_iou(const Box & a, const Box & b)
{
  // pixel counting
  long inter = 0;
  for (long y = std::min(a.y_min, b.y_min); y <= std::max(a.y_max, b.y_max); ++y) {
    for (long x = std::min(a.x_min, b.x_min); x <= std::max(a.x_max, b.x_max); ++x) {
      const bool in_a = x >= a.x_min && x <= a.x_max && y >= a.y_min && y <= a.y_max;
      const bool in_b = x >= b.x_min && x <= b.x_max && y >= b.y_min && y <= b.y_max;
      inter += in_a && in_b;
    }
  }
  const long uni = a.area() + b.area() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// Maximum number of disjoint (pred, gt) pairs with IoU >= thresh, by permutation.
inline std::size_t optimal_tp(const std::vector<Box> & preds, const std::vector<Box> & gts, double thresh)
{
  const bool swap = preds.size() < gts.size();
  const auto & a = swap ? gts : preds;
  const auto & b = swap ? preds : gts;
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t tp = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const auto & pa = a[perm[j]];
      tp += box_iou(swap ? b[j] : pa, swap ? pa : b[j]) >= thresh;
    }
    best = std::max(best, tp);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Quantile by linear interpolation, written from the textbook definition.
inline double interp_quantile(std::vector<double> v, double q)
{
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const double lo = std::floor(h);
  const double hi = std::ceil(h);
  return v[static_cast<std::size_t>(lo)] + (h - lo) * (v[static_cast<std::size_t>(hi)] - v[static_cast<std::size_t>(lo)]);
}

}  // namespace rotorscope::oracle
