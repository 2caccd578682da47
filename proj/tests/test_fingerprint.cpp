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

#include <random>

#include "oracles.h"
#include "rotorscope/fingerprint.h"

using namespace rotorscope;

namespace
{
PowerSpectrum flat(std::size_t K, double level = 1.0) { return {std::vector<double>(K, level), 30.0}; }

PowerSpectrum comb(std::size_t K, std::size_t omega, std::size_t count, double height)
{
  auto P = flat(K);
  for (std::size_t m = 1; m <= count; ++m) P.power[m * omega] = height;
  return P;
}

DetectorParams narrow()
{
  DetectorParams q;
  q.delta_k = 0;
  return q;
}

// Realistic spectra: random events plus an optional periodic component.
PowerSpectrum event_spectrum(std::mt19937_64 & rng, std::size_t K)
{
  std::uniform_real_distribution<double> ph(-3.14159, 3.14159);
  std::uniform_int_distribution<int> n(6, 80);
  std::uniform_int_distribution<int> w(2, 40);
  std::bernoulli_distribution periodic(0.5);
  std::vector<std::int8_t> p;
  std::vector<double> t;
  if (periodic(rng)) {
    const int omega = w(rng);
    const double off = ph(rng);
    for (int c = 0; c < omega; ++c) {
      const double base = -3.14159265 + 2 * 3.14159265 * c / omega + (off + 3.2) / omega * 0.5;
      t.push_back(base);
      p.push_back(-1);
      t.push_back(base + 0.2 * 2 * 3.14159265 / omega);
      p.push_back(1);
    }
  }
  const int extra = n(rng);
  for (int j = 0; j < extra; ++j) {
    t.push_back(ph(rng));
    p.push_back(j % 2 ? 1 : -1);
  }
  return power_spectrum(ndft(p, t, K), 30.0);
}

}  // namespace

TEST_SUITE("fingerprint")
{
  TEST_CASE("harmonic window examples")
  {
    auto q = narrow();
    auto w = harmonic_windows(5, q);
    CHECK(w.m_valid == 4);
    CHECK(w.windows == std::vector<BinRange>{{5, 5}, {10, 10}, {15, 15}, {20, 20}});

    q.delta_k = 3;
    w = harmonic_windows(200, q);
    CHECK(w.m_valid == 2);
    CHECK(w.windows == std::vector<BinRange>{{197, 203}, {397, 403}});

    w = harmonic_windows(300, q);
    CHECK(w.m_valid == 1);
    CHECK(w.m_valid < q.h_min);
    CHECK_FALSE(rotor_snr(flat(512), 300, q).has_value());
  }

  TEST_CASE("windows never reach past the last bin")
  {
    DetectorParams q;
    for (std::size_t omega = 1; omega < q.K; ++omega) {
      for (const auto & r : harmonic_windows(omega, q).windows) {
        CHECK(r.hi <= q.K - 1);
        CHECK(r.hi - r.lo == 2 * q.delta_k);
      }
    }
  }

  TEST_CASE("comb score examples")
  {
    auto q = narrow();
    const auto P = comb(512, 5, 4, 10.0);
    CHECK(comb_score(P, 5, q).value() == 10.0);
    q.delta_k = 1;
    CHECK(comb_score(P, 5, q).value() == 10.0);
    for (std::size_t omega : {2, 9, 60}) CHECK(comb_score(flat(512, 3.5), omega, q).value() == 3.5);
  }

  TEST_CASE("median baseline examples")
  {
    const PowerSpectrum P{{99, 1, 2, 3, 10, 3, 2, 1}, 1.0};
    const std::vector<BinRange> one{{4, 4}};
    CHECK(median_baseline(P, one).value() == 2.0);
    CHECK(median_baseline(flat(16, 2.5), one).value() == 2.5);
    const std::vector<BinRange> most{{1, 3}, {5, 7}};
    CHECK(median_baseline(P, most).value() == 10.0);
    const std::vector<BinRange> all{{1, 7}};
    CHECK_FALSE(median_baseline(P, all).has_value());
  }

  TEST_CASE("snr examples")
  {
    const auto q = narrow();
    CHECK(rotor_snr(comb(512, 5, 4, 10.0), 5, q).value() == 10.0);
    CHECK(rotor_snr(flat(512, 4.0), 7, q).value() == doctest::Approx(1.0));
    CHECK(rotor_snr(flat(512, 0.0), 7, q).value() == 0.0);
  }

  TEST_CASE("flat spectrum is rejected by flatness")
  {
    const auto v = classify_pixel(flat(512), DetectorParams{});
    CHECK_FALSE(v.is_rotor);
    CHECK(v.sf == doctest::Approx(1.0));
    CHECK(v.snr == 0.0);
  }

  TEST_CASE("comb spectrum classification")
  {
    auto q = narrow();
    const auto P = comb(512, 5, 4, 10.0);
    // four peaks over 511 unit bins are too sparse for the default flatness gate
    const auto gated = classify_pixel(P, q);
    CHECK(gated.sf > q.tau_sf);
    CHECK_FALSE(gated.is_rotor);

    q.tau_sf = 1.0;
    const auto v = classify_pixel(P, q);
    CHECK(v.is_rotor);
    CHECK(v.omega == 5u);
    CHECK(v.snr == 10.0);
    CHECK(v.f_hz == doctest::Approx(150.0));
  }

  TEST_CASE("threshold is inclusive")
  {
    auto q = narrow();
    q.tau_sf = 1.0;
    q.tau_comb = 1.5;
    const auto v = classify_pixel(comb(512, 5, 4, 1.5), q);
    CHECK(v.snr == 1.5);
    CHECK(v.is_rotor);
    q.tau_comb = std::nextafter(1.5, 2.0);
    CHECK_FALSE(classify_pixel(comb(512, 5, 4, 1.5), q).is_rotor);
  }

  TEST_CASE("smallest fundamental wins ties")
  {
    auto q = narrow();
    q.tau_sf = 1.0;
    q.M = 4;
    q.h_min = 2;
    // peaks at every multiple of 10 up to 80: candidates 10 and 20 both see only peaks
    auto P = flat(512);
    for (std::size_t k = 10; k <= 80; k += 10) P.power[k] = 20.0;
    const auto v = classify_pixel(P, q);
    CHECK(v.omega == 10u);
  }

  TEST_CASE("sweep agrees with brute force")
  {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 300; ++trial) {
      DetectorParams q;
      q.tau_sf = 1.0;
      q.K = trial % 4 == 0 ? 128 : 512;
      q.delta_k = static_cast<std::size_t>(trial % 5);
      q.M = 4 + static_cast<std::size_t>(trial % 3) * 2;
      q.h_min = 2 + static_cast<std::size_t>(trial % 4);
      const auto P = event_spectrum(rng, q.K);
      const auto v = classify_pixel(P, q);
      const auto ref = oracle::comb_sweep(P.power, q);
      if (ref.best < 0) {
        CHECK(v.snr == 0.0);
        continue;
      }
      CHECK(v.snr == ref.best);
      CHECK(v.is_rotor == (ref.best >= q.tau_comb));
      if (v.is_rotor) CHECK(*v.omega == ref.omega);
    }
  }

  TEST_CASE("sweep agrees with brute force on heavily tied spectra")
  {
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 200; ++trial) {
      DetectorParams q;
      q.tau_sf = 1.0;
      q.delta_k = static_cast<std::size_t>(trial % 4);
      const int levels = 1 + trial % 6;
      std::uniform_int_distribution<int> level(0, levels);
      PowerSpectrum P;
      P.bin_hz = 30.0;
      P.power.resize(q.K);
      for (auto & v : P.power) v = static_cast<double>(level(rng));
      const auto v = classify_pixel(P, q);
      const auto ref = oracle::comb_sweep(P.power, q);
      CHECK(v.snr == ref.best);
      CHECK(v.is_rotor == (ref.best >= q.tau_comb));
      if (v.is_rotor) CHECK(*v.omega == ref.omega);
    }
  }

  TEST_CASE("decisions are scale invariant")
  {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 100; ++trial) {
      const auto P = event_spectrum(rng, 512);
      const auto base = classify_pixel(P, DetectorParams{});
      for (double c : {1e-3, 0.5, 3.0, 1e3}) {
        auto Q = P;
        for (auto & v : Q.power) v *= c;
        const auto scaled = classify_pixel(Q, DetectorParams{});
        CHECK(scaled.is_rotor == base.is_rotor);
        CHECK(scaled.omega == base.omega);
      }
    }
  }

  TEST_CASE("thresholds are monotone")
  {
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 100; ++trial) {
      const auto P = event_spectrum(rng, 512);
      DetectorParams q;
      bool prev = true;
      for (double tc : {1.0, 1.5, 2.5, 4.0, 8.0}) {
        q.tau_comb = tc;
        const bool r = classify_pixel(P, q).is_rotor;
        CHECK((prev || !r));
        prev = r;
      }
      q = DetectorParams{};
      prev = true;
      for (double ts : {1.0, 0.95, 0.89, 0.7, 0.4}) {
        q.tau_sf = ts;
        const bool r = classify_pixel(P, q).is_rotor;
        CHECK((prev || !r));
        prev = r;
      }
      CHECK(classify_pixel(P, DetectorParams{}).omega == classify_pixel(P, DetectorParams{}).omega);
    }
  }

  TEST_CASE("median baseline tolerates a second comb")
  {
    DetectorParams q;
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> floor(0.5, 1.5);
    auto disjoint = [&](std::size_t w1, std::size_t w2) {
      for (const auto & a : harmonic_windows(w1, q).windows) {
        for (const auto & b : harmonic_windows(w2, q).windows) {
          if (!(a.hi < b.lo || b.hi < a.lo)) return false;
        }
      }
      return true;
    };
    std::size_t tested = 0;
    for (std::size_t w1 : {5, 7, 12, 20, 41}) {
      for (std::size_t w2 = 2; w2 < 120; ++w2) {
        if (w2 == w1 || harmonic_windows(w2, q).m_valid < q.h_min || !disjoint(w1, w2)) continue;
        ++tested;
        PowerSpectrum single = flat(512);
        for (auto & v : single.power) v = floor(rng);
        for (std::size_t m = 1; m <= q.M; ++m) single.power[m * w1] = 10.0;
        auto both = single;
        for (std::size_t m = 1; m <= q.M; ++m) both.power[m * w2] = 10.0;
        const double alone = rotor_snr(single, w1, q).value();
        const double shared = rotor_snr(both, w1, q).value();
        CHECK(shared >= 0.8 * alone);
      }
    }
    CHECK(tested > 100);
  }
}
