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
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "rotorscope/box_io.h"
#include "rotorscope/events.h"
#include "rotorscope/params.h"

namespace rotorscope
{
struct ParamBound
{
  std::string name;  // DetectorParams field
  double lo{0.0};
  double hi{1.0};
  bool integer{false};
};

// Uniform box over the tuned DetectorParams fields. K and omega_min are not searched.
struct SearchSpace
{
  std::vector<ParamBound> bounds;

  static SearchSpace defaults();
  std::size_t dims() const { return bounds.size(); }
  // throws ValidationError on unordered bounds or unknown names
  void validate() const;

  // Maps a point of [0,1]^d onto params (integers rounded to nearest), starting from `base`.
  DetectorParams to_params(const std::vector<double> & unit, const DetectorParams & base) const;
  // The unit-cube point that `to_params` reproduces exactly for integer fields.
  std::vector<double> snap(const std::vector<double> & unit) const;
  std::vector<double> values(const std::vector<double> & unit) const;
};

// {"tau_sf": [lo, hi], ...}; a field's integrality comes from DetectorParams.
SearchSpace load_search_space(const std::string & path);

struct Trial
{
  std::vector<double> point;  // unit cube, snapped
  double objective{0.0};
  bool random{true};  // uniform draw (random phase or GP fallback)
};

using TrialHistory = std::vector<Trial>;

struct GpOptions
{
  bool fit_length_scales{true};  // maximum marginal likelihood; otherwise fixed
  double fixed_length_scale{0.2};
  double noise{1e-4};
  std::size_t candidates{1024};
};

/// Squared-exponential GP on unit-cube inputs with standardised targets.
class GaussianProcess
{
public:
  // returns false when the kernel matrix is not positive definite
  bool fit(const std::vector<std::vector<double>> & x, const std::vector<double> & y,
           const std::vector<double> & length_scales, double noise);
  // mean and standard deviation in the original objective units
  std::pair<double, double> predict(const std::vector<double> & x) const;
  double log_marginal_likelihood() const { return lml_; }

private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  double lml_{0.0};
};

double expected_improvement(double mean, double sd, double best);

/// Next point to evaluate in [0,1]^dims: uniform while fewer than
/// `n_random` trials exist, else the EI maximiser over `candidates`
/// uniform draws under a GP fitted to the history. A failed GP fit falls
/// back to a uniform draw.
std::vector<double> propose(
  const TrialHistory & history, std::size_t dims, std::size_t n_random, std::mt19937_64 & rng,
  const GpOptions & options = {}, bool * used_gp = nullptr);

struct BoResult
{
  std::vector<double> best_point;
  double best_objective{0.0};
  TrialHistory history;
};

using UnitObjective = std::function<double(const std::vector<double> &)>;

// n_random uniform trials, then n_bo sequential GP/EI trials. Reproducible from seed.
BoResult run_bo(
  const SearchSpace & space, std::size_t n_random, std::size_t n_bo, const UnitObjective & objective,
  std::uint64_t seed, const GpOptions & options = {});

struct LabeledRecording
{
  EventStream stream;
  std::vector<WindowBoxes> truth;
  timestamp_us window_us{kDefaultWindowUs};
};

// Micro-averaged F1 at the given IoU over every recording's windows.
double evaluate_objective(
  const DetectorParams & params, const std::vector<LabeledRecording> & dataset, double iou_thresh = 0.5,
  std::size_t workers = 0);

// Loads every <name>.evb with a sibling <name>.jsonl from a directory, sorted by name.
// Objective over the unit cube: F1 of the mapped params, 0 for points that violate
// a DetectorParams invariant (for example M < h_min).
UnitObjective dataset_objective(
  const SearchSpace & space, const DetectorParams & base, const std::vector<LabeledRecording> & dataset,
  double iou_thresh = 0.5, std::size_t workers = 0);

std::vector<LabeledRecording> load_dataset(const std::string & dir, timestamp_us window_us = kDefaultWindowUs);

// iter,<param names...>,f1 with parameter values in natural units.
void write_history_csv(std::ostream & out, const SearchSpace & space, const TrialHistory & history);

}  // namespace rotorscope
