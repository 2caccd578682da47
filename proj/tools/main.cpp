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

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rotorscope/box_io.h"
#include "rotorscope/errors.h"
#include "rotorscope/eval.h"
#include "rotorscope/events.h"
#include "rotorscope/params.h"
#include "rotorscope/pipeline.h"
#include "rotorscope/render.h"
#include "rotorscope/spectral.h"
#include "rotorscope/synth.h"
#include "rotorscope/tuner.h"

namespace
{
using namespace rotorscope;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitContract = 4;

class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct InputOptions
{
  std::string path;
  std::string format{"evb"};
  std::uint32_t width{0};
  std::uint32_t height{0};
};

void add_input_options(CLI::App & cmd, InputOptions & in)
{
  cmd.add_option("--input", in.path, "event file")->required();
  cmd.add_option("--format", in.format, "csv or evb")->capture_default_str();
  cmd.add_option("--width", in.width, "sensor width, required for csv");
  cmd.add_option("--height", in.height, "sensor height, required for csv");
}

EventStream load_input(const InputOptions & in)
{
  const auto format = parse_event_format(in.format);
  ParseOptions options;
  if (in.width > 0 || in.height > 0) options.geometry = SensorGeometry{in.width, in.height};
  if (format == EventFormat::csv && !options.geometry) {
    throw UsageError("csv input needs --width and --height");
  }
  return read_event_file(in.path, format, options);
}

struct ParamOptions
{
  std::string config;
  std::vector<std::string> overrides;
};

void add_param_options(CLI::App & cmd, ParamOptions & p)
{
  cmd.add_option("--config", p.config, "DetectorParams JSON");
  cmd.add_option("--set", p.overrides, "override one field, key=value")->take_all();
}

DetectorParams load_param_options(const ParamOptions & p)
{
  DetectorParams params = p.config.empty() ? DetectorParams{} : load_params(p.config);
  for (const auto & kv : p.overrides) params.set(kv);
  params.validate();
  return params;
}

nlohmann::json box_json(const Box & b)
{
  return {{"x_min", b.x_min}, {"y_min", b.y_min}, {"x_max", b.x_max}, {"y_max", b.y_max}};
}

int run_detect(const InputOptions & in, const ParamOptions & po, const std::string & out_path,
               const std::string & frames_dir, timestamp_us window_us)
{
  const DetectorParams params = load_param_options(po);
  if (window_us <= 0) throw UsageError("--window-us must be positive");
  const auto stream = load_input(in);
  const Detector detector(stream.geometry, params);

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  if (!frames_dir.empty()) std::filesystem::create_directories(frames_dir);

  std::vector<double> latencies;
  for (const auto & window : window_events(stream.events, window_us)) {
    const auto d = detector.detect(window);
    nlohmann::json boxes = nlohmann::json::array();
    for (const auto & b : d.boxes) boxes.push_back(box_json(b));
    out << nlohmann::json{{"window", d.window_index}, {"boxes", boxes}, {"rotor_pixels", d.freq_map.size()},
                          {"latency_ms", d.latency_ms}}
             .dump()
        << '\n';
    latencies.push_back(d.latency_ms);
    if (!frames_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof name, "frame_%06zu.ppm", d.window_index);
      write_ppm_file((std::filesystem::path(frames_dir) / name).string(), render_frame(window, d, stream.geometry));
    }
  }
  nlohmann::json summary{{"windows", latencies.size()}};
  if (!latencies.empty()) summary["latency"] = to_json(latency_summary(latencies));
  std::cerr << summary.dump() << '\n';
  return kExitOk;
}

std::pair<std::uint16_t, std::uint16_t> parse_pixel(const std::string & text)
{
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--pixel expects X,Y");
  try {
    std::size_t used_x = 0;
    std::size_t used_y = 0;
    const int x = std::stoi(text.substr(0, comma), &used_x);
    const int y = std::stoi(text.substr(comma + 1), &used_y);
    if (used_x != comma || used_y != text.size() - comma - 1 || x < 0 || y < 0 || x > 65535 || y > 65535) {
      throw UsageError("--pixel expects non-negative integers X,Y");
    }
    return {static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y)};
  } catch (const std::logic_error &) {
    throw UsageError("--pixel expects X,Y");
  }
}

int run_spectrum(const InputOptions & in, const ParamOptions & po, const std::string & pixel_text,
                 std::size_t window_index, timestamp_us window_us)
{
  const DetectorParams params = load_param_options(po);
  const auto [x, y] = parse_pixel(pixel_text);
  const auto stream = load_input(in);
  if (!stream.geometry.contains(x, y)) throw UsageError("--pixel lies outside the sensor");
  const auto windows = window_events(stream.events, window_us);
  if (window_index >= windows.size()) {
    throw UsageError("--window " + std::to_string(window_index) + " out of range (" +
                     std::to_string(windows.size()) + " windows)");
  }
  const auto & window = windows[window_index];
  std::vector<std::int8_t> polarities;
  std::vector<timestamp_us> times;
  for (const auto & e : window.events) {
    if (e.x != x || e.y != y) continue;
    polarities.push_back(e.p);
    times.push_back(e.t);
  }
  const double bin_hz = bin_hz_for(window.t_len);
  std::cout << "k,hz,power\n";
  if (polarities.empty()) {
    for (std::size_t k = 0; k < params.K; ++k) std::cout << k << ',' << k * bin_hz << ",0\n";
    return kExitOk;
  }
  const auto phases = normalize_timestamps(times, window.t_start, window.t_len);
  const auto spectrum = power_spectrum(ndft(polarities, phases, params.K), bin_hz);
  std::cout.precision(17);
  for (std::size_t k = 0; k < spectrum.power.size(); ++k) {
    std::cout << k << ',' << static_cast<double>(k) * bin_hz << ',' << spectrum.power[k] << '\n';
  }
  return kExitOk;
}

int run_synth(const std::string & spec_path, const std::string & out_path, const std::string & gt_path,
              const std::string & format_name)
{
  std::ifstream in(spec_path);
  if (!in) throw std::runtime_error("cannot open " + spec_path);
  SceneSpec spec;
  try {
    spec = nlohmann::json::parse(in).get<SceneSpec>();
  } catch (const nlohmann::json::exception & e) {
    throw FormatError(std::string("scene spec: ") + e.what());
  }
  const auto scene = gen_scene(spec);
  write_event_file(out_path, parse_event_format(format_name), scene.stream.geometry, scene.stream.events);
  if (!gt_path.empty()) write_box_file(gt_path, scene.truth);
  std::cerr << nlohmann::json{{"events", scene.stream.events.size()}, {"windows", scene.truth.size()}}.dump() << '\n';
  return kExitOk;
}

int run_eval(const std::string & pred_path, const std::string & gt_path, double iou_thresh)
{
  if (!(iou_thresh > 0.0 && iou_thresh <= 1.0)) throw UsageError("--iou must lie in (0, 1]");
  const auto report = score_windows(read_box_file(pred_path), read_box_file(gt_path), iou_thresh);
  std::cout << to_json(report).dump() << '\n';
  return kExitOk;
}

int run_tune(const std::string & data_dir, const std::string & space_path, std::size_t n_random, std::size_t n_iters,
             std::uint64_t seed, const std::string & out_path, std::string history_path, const ParamOptions & po,
             double iou_thresh)
{
  const DetectorParams base = load_param_options(po);
  const SearchSpace space = space_path.empty() ? SearchSpace::defaults() : load_search_space(space_path);
  space.validate();
  const auto dataset = load_dataset(data_dir);
  if (dataset.empty()) throw UsageError("no (evb, jsonl) pairs found in " + data_dir);

  const auto result = run_bo(space, n_random, n_iters, dataset_objective(space, base, dataset, iou_thresh), seed);
  save_params(out_path, space.to_params(result.best_point, base));

  if (history_path.empty()) history_path = out_path + ".history.csv";
  std::ofstream history(history_path);
  if (!history) throw std::runtime_error("cannot write " + history_path);
  write_history_csv(history, space, result.history);
  std::cerr << nlohmann::json{{"best_f1", result.best_objective}, {"trials", result.history.size()}}.dump() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"rotorscope: rotor detection in event-camera streams"};
  app.require_subcommand(1);

  InputOptions detect_in;
  ParamOptions detect_params;
  std::string detect_out;
  std::string frames_dir;
  timestamp_us detect_window = kDefaultWindowUs;
  auto * detect = app.add_subcommand("detect", "detect rotors window by window, one JSON line per window");
  add_input_options(*detect, detect_in);
  add_param_options(*detect, detect_params);
  detect->add_option("--out", detect_out, "detections JSONL")->required();
  detect->add_option("--frames", frames_dir, "directory for PPM overlays");
  detect->add_option("--window-us", detect_window, "window length in microseconds")->capture_default_str();

  InputOptions spectrum_in;
  ParamOptions spectrum_params;
  std::string pixel;
  std::size_t spectrum_window = 0;
  timestamp_us spectrum_window_us = kDefaultWindowUs;
  auto * spectrum = app.add_subcommand("spectrum", "print one pixel's power spectrum as k,hz,power");
  add_input_options(*spectrum, spectrum_in);
  add_param_options(*spectrum, spectrum_params);
  spectrum->add_option("--pixel", pixel, "X,Y")->required();
  spectrum->add_option("--window", spectrum_window, "window index")->required();
  spectrum->add_option("--window-us", spectrum_window_us, "window length in microseconds")->capture_default_str();

  std::string scene_path;
  std::string synth_out;
  std::string synth_gt;
  std::string synth_format = "evb";
  auto * synth = app.add_subcommand("synth", "render a synthetic scene to events and ground truth");
  synth->add_option("--spec", scene_path, "scene JSON")->required();
  synth->add_option("--out", synth_out, "event file")->required();
  synth->add_option("--gt", synth_gt, "ground-truth JSONL");
  synth->add_option("--format", synth_format, "csv or evb")->capture_default_str();

  std::string pred_path;
  std::string gt_path;
  double eval_iou = 0.5;
  auto * eval = app.add_subcommand("eval", "score detections against ground truth");
  eval->add_option("--pred", pred_path, "detections JSONL")->required();
  eval->add_option("--gt", gt_path, "ground-truth JSONL")->required();
  eval->add_option("--iou", eval_iou, "IoU threshold")->capture_default_str();

  std::string data_dir;
  std::string space_path;
  std::size_t n_random = 50;
  std::size_t n_iters = 300;
  std::uint64_t seed = 0;
  std::string tune_out;
  std::string history_path;
  double tune_iou = 0.5;
  ParamOptions tune_params;
  auto * tune = app.add_subcommand("tune", "Bayesian optimisation of detector parameters");
  tune->add_option("--data", data_dir, "directory of <name>.evb + <name>.jsonl pairs")->required();
  tune->add_option("--space", space_path, "search space JSON; built-in space when omitted");
  tune->add_option("--random", n_random, "uniform trials")->capture_default_str();
  tune->add_option("--iters", n_iters, "GP/EI trials")->capture_default_str();
  tune->add_option("--seed", seed, "random seed")->capture_default_str();
  tune->add_option("--out", tune_out, "best params JSON")->required();
  tune->add_option("--history", history_path, "trial history CSV; defaults to <out>.history.csv");
  tune->add_option("--iou", tune_iou, "IoU threshold")->capture_default_str();
  add_param_options(*tune, tune_params);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*detect) return run_detect(detect_in, detect_params, detect_out, frames_dir, detect_window);
    if (*spectrum) return run_spectrum(spectrum_in, spectrum_params, pixel, spectrum_window, spectrum_window_us);
    if (*synth) return run_synth(scene_path, synth_out, synth_gt, synth_format);
    if (*eval) return run_eval(pred_path, gt_path, eval_iou);
    if (*tune) {
      return run_tune(data_dir, space_path, n_random, n_iters, seed, tune_out, history_path, tune_params, tune_iou);
    }
  } catch (const UsageError & e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ContractViolation & e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitContract;
  } catch (const ValidationError & e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitInput;
  } catch (const ParseError & e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitInput;
  } catch (const FormatError & e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitInput;
  } catch (const nlohmann::json::exception & e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::runtime_error & e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception & e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitContract;
  }
  return kExitUsage;
}
