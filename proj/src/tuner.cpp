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

#include "rotorscope/tuner.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "rotorscope/errors.h"
#include "rotorscope/eval.h"
#include "rotorscope/pipeline.h"

namespace rotorscope
{
namespace
{
const nlohmann::json & default_params_json()
{
  static const nlohmann::json j = DetectorParams{};
  return j;
}

std::vector<double> uniform_point(std::size_t dims, std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(dims);
  for (auto & v : x) v = u(rng);
  return x;
}

constexpr double kLengthGrid[] = {0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2, 6.4};

}  // namespace

SearchSpace SearchSpace::defaults()
{
  return {{
    {"tau_sf", 0.3, 0.98, false},
    {"tau_comb", 1.5, 6.0, false},
    {"M", 4, 16, true},
    {"delta_k", 0, 4, true},
    {"h_min", 2, 8, true},
    {"n_min", 2, 10, true},
    {"A_min", 9, 196, true},
    {"alpha", 3.0, 20.0, false},
  }};
}

void SearchSpace::validate() const
{
  if (bounds.empty()) throw ValidationError("search space has no parameters");
  for (const auto & b : bounds) {
    if (!default_params_json().contains(b.name)) throw ValidationError("unknown search parameter '" + b.name + "'");
    if (!(b.lo <= b.hi)) throw ValidationError("search bounds for " + b.name + " are not ordered");
  }
}

std::vector<double> SearchSpace::values(const std::vector<double> & unit) const
{
  std::vector<double> v(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const auto & b = bounds[i];
    const double u = std::clamp(unit.at(i), 0.0, 1.0);
    v[i] = b.lo + u * (b.hi - b.lo);
    if (b.integer) v[i] = std::round(v[i]);
  }
  return v;
}

std::vector<double> SearchSpace::snap(const std::vector<double> & unit) const
{
  const auto v = values(unit);
  std::vector<double> out(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const auto & b = bounds[i];
    out[i] = b.hi > b.lo ? (v[i] - b.lo) / (b.hi - b.lo) : 0.0;
  }
  return out;
}

DetectorParams SearchSpace::to_params(const std::vector<double> & unit, const DetectorParams & base) const
{
  nlohmann::json j = base;
  const auto v = values(unit);
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (bounds[i].integer) {
      j[bounds[i].name] = static_cast<std::uint64_t>(std::max(0.0, v[i]));
    } else {
      j[bounds[i].name] = v[i];
    }
  }
  return j.get<DetectorParams>();
}

SearchSpace load_search_space(const std::string & path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error & e) {
    throw ParseError(std::string("search space JSON: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw ValidationError("search space must be a JSON object");
  SearchSpace space;
  for (const auto & b : SearchSpace::defaults().bounds) {
    if (!j.contains(b.name)) continue;
    const auto & r = j[b.name];
    if (!r.is_array() || r.size() != 2) throw ValidationError("bounds for " + b.name + " must be [lo, hi]");
    space.bounds.push_back({b.name, r[0].get<double>(), r[1].get<double>(), b.integer});
  }
  if (space.bounds.size() != j.size()) throw ValidationError("search space names an unsupported parameter");
  space.validate();
  return space;
}

struct GaussianProcess::Impl
{
  Eigen::MatrixXd x;  // n x d
  Eigen::VectorXd inv_length;
  Eigen::LLT<Eigen::MatrixXd> chol;
  Eigen::VectorXd alpha;
  double y_mean{0.0};
  double y_scale{1.0};

  double kernel(const Eigen::VectorXd & a, const Eigen::VectorXd & b) const
  {
    return std::exp(-0.5 * (a - b).cwiseProduct(inv_length).squaredNorm());
  }
};

bool GaussianProcess::fit(
  const std::vector<std::vector<double>> & x, const std::vector<double> & y,
  const std::vector<double> & length_scales, double noise)
{
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n == 0 || y.size() != x.size()) return false;
  const auto d = static_cast<Eigen::Index>(length_scales.size());
  auto impl = std::make_shared<Impl>();
  impl->x.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) impl->x(i, k) = x[i][k];
  }
  impl->inv_length.resize(d);
  for (Eigen::Index k = 0; k < d; ++k) impl->inv_length[k] = 1.0 / length_scales[k];

  Eigen::VectorXd ys(n);
  for (Eigen::Index i = 0; i < n; ++i) ys[i] = y[i];
  impl->y_mean = ys.mean();
  const double var = (ys.array() - impl->y_mean).square().mean();
  impl->y_scale = var > 0.0 ? std::sqrt(var) : 1.0;
  ys = (ys.array() - impl->y_mean) / impl->y_scale;

  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0 + noise;
    for (Eigen::Index j = 0; j < i; ++j) {
      k(i, j) = k(j, i) = impl->kernel(impl->x.row(i).transpose(), impl->x.row(j).transpose());
    }
  }
  impl->chol.compute(k);
  if (impl->chol.info() != Eigen::Success) return false;
  impl->alpha = impl->chol.solve(ys);
  const Eigen::MatrixXd l = impl->chol.matrixL();
  lml_ = -0.5 * ys.dot(impl->alpha) - l.diagonal().array().log().sum() -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (!std::isfinite(lml_)) return false;
  impl_ = std::move(impl);
  return true;
}

std::pair<double, double> GaussianProcess::predict(const std::vector<double> & x) const
{
  const auto & m = *impl_;
  const auto n = m.x.rows();
  Eigen::VectorXd q(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) q[static_cast<Eigen::Index>(k)] = x[k];
  Eigen::VectorXd ks(n);
  for (Eigen::Index i = 0; i < n; ++i) ks[i] = m.kernel(m.x.row(i).transpose(), q);
  const double mean = ks.dot(m.alpha);
  const Eigen::VectorXd v = m.chol.matrixL().solve(ks);
  const double var = std::max(1.0 - v.squaredNorm(), 1e-12);
  return {mean * m.y_scale + m.y_mean, std::sqrt(var) * m.y_scale};
}

double expected_improvement(double mean, double sd, double best)
{
  const double gain = mean - best;
  if (!(sd > 0.0)) return std::max(gain, 0.0);
  const double z = gain / sd;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return gain * cdf + sd * pdf;
}

std::vector<double> propose(
  const TrialHistory & history, std::size_t dims, std::size_t n_random, std::mt19937_64 & rng,
  const GpOptions & options, bool * used_gp)
{
  if (used_gp) *used_gp = false;
  if (history.size() < std::max<std::size_t>(n_random, 1)) return uniform_point(dims, rng);

  std::vector<std::vector<double>> x;
  std::vector<double> y;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto & t : history) {
    x.push_back(t.point);
    y.push_back(t.objective);
    best = std::max(best, t.objective);
  }

  std::vector<double> scales(dims, options.fixed_length_scale);
  GaussianProcess gp;
  bool ok = gp.fit(x, y, scales, options.noise);
  if (ok && options.fit_length_scales) {
    // coordinate search over a log grid, two sweeps
    double best_lml = gp.log_marginal_likelihood();
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (std::size_t d = 0; d < dims; ++d) {
        const double keep = scales[d];
        double chosen = keep;
        for (double s : kLengthGrid) {
          if (s == keep) continue;
          scales[d] = s;
          GaussianProcess trial;
          if (trial.fit(x, y, scales, options.noise) && trial.log_marginal_likelihood() > best_lml) {
            best_lml = trial.log_marginal_likelihood();
            chosen = s;
          }
        }
        scales[d] = chosen;
      }
    }
    ok = gp.fit(x, y, scales, options.noise);
  }
  if (!ok) {
    std::clog << "rotorscope: GP fit failed on " << history.size() << " trials, sampling uniformly\n";
    return uniform_point(dims, rng);
  }

  std::vector<double> argmax;
  double best_ei = -1.0;
  for (std::size_t c = 0; c < options.candidates; ++c) {
    auto cand = uniform_point(dims, rng);
    const auto [mean, sd] = gp.predict(cand);
    const double ei = expected_improvement(mean, sd, best);
    if (ei > best_ei) {
      best_ei = ei;
      argmax = std::move(cand);
    }
  }
  if (used_gp) *used_gp = true;
  return argmax;
}

BoResult run_bo(
  const SearchSpace & space, std::size_t n_random, std::size_t n_bo, const UnitObjective & objective,
  std::uint64_t seed, const GpOptions & options)
{
  if (n_random < 1) throw ContractViolation("run_bo needs at least one random trial");
  space.validate();
  std::mt19937_64 rng(seed);
  BoResult out;
  out.best_objective = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_random + n_bo; ++i) {
    bool used_gp = false;
    const auto point = space.snap(propose(out.history, space.dims(), n_random, rng, options, &used_gp));
    const double f = objective(point);
    out.history.push_back({point, f, !used_gp});
    if (f > out.best_objective) {
      out.best_objective = f;
      out.best_point = point;
    }
  }
  return out;
}

double evaluate_objective(
  const DetectorParams & params, const std::vector<LabeledRecording> & dataset, double iou_thresh,
  std::size_t workers)
{
  if (dataset.empty()) throw ContractViolation("evaluate_objective needs a non-empty dataset");
  MatchReport total;
  for (const auto & rec : dataset) {
    const Detector detector(rec.stream.geometry, params, workers);
    timestamp_us end = rec.truth.size() * rec.window_us;
    if (!rec.stream.events.empty()) end = std::max(end, rec.stream.events.back().t + 1);
    const auto result = detector.detect_stream(rec.stream.events, rec.window_us, end);
    total += score_windows(to_window_boxes(result.detections), rec.truth, iou_thresh);
  }
  return total.f1;
}

UnitObjective dataset_objective(
  const SearchSpace & space, const DetectorParams & base, const std::vector<LabeledRecording> & dataset,
  double iou_thresh, std::size_t workers)
{
  return [&space, base, &dataset, iou_thresh, workers](const std::vector<double> & unit) {
    const auto params = space.to_params(unit, base);
    try {
      params.validate();
    } catch (const ValidationError &) {
      return 0.0;
    }
    return evaluate_objective(params, dataset, iou_thresh, workers);
  };
}

std::vector<LabeledRecording> load_dataset(const std::string & dir, timestamp_us window_us)
{
  namespace fs = std::filesystem;
  std::vector<fs::path> evbs;
  for (const auto & entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".evb") evbs.push_back(entry.path());
  }
  std::sort(evbs.begin(), evbs.end());
  std::vector<LabeledRecording> out;
  for (const auto & evb : evbs) {
    auto truth = evb;
    truth.replace_extension(".jsonl");
    if (!fs::exists(truth)) continue;
    out.push_back({read_event_file(evb.string(), EventFormat::evb, {}), read_box_file(truth.string()), window_us});
  }
  if (out.empty()) throw ValidationError("no (evb, jsonl) pairs in " + dir);
  return out;
}

void write_history_csv(std::ostream & out, const SearchSpace & space, const TrialHistory & history)
{
  out << "iter";
  for (const auto & b : space.bounds) out << ',' << b.name;
  out << ",f1\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    out << i;
    for (double v : space.values(history[i].point)) out << ',' << v;
    out << ',' << history[i].objective << '\n';
  }
}

}  // namespace rotorscope
