// pfnmf/onsets.hpp

// Copyright 2026  The pfnmf authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "pfnmf/common.hpp"
#include "pfnmf/dictionary.hpp"

namespace pfnmf {

/// Onset times in seconds for one drum component, strictly increasing.
/// Used both for ground-truth annotations and for detections.
struct OnsetList {
  std::string component;
  std::vector<double> times;
};

struct EvalCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
};

/// Parameters of the signal-adaptive median threshold detector and of
/// onset matching. offset_coefficients maps instrument labels to the
/// per-instrument offset added to the windowed median.
struct MedianThresholdConfig {
  double window_seconds = 0.1;
  std::map<std::string, double> offset_coefficients = {
      {"hihat", 0.05}, {"snare", 0.1}, {"kick", 0.15}};
  double match_tolerance_seconds = 0.05;
};

using DetectionMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Ground truth projected onto the frame grid: per-frame total hit counts
/// p_j plus a per-(component, frame) mask. Row order follows the input
/// annotation order.
struct FrameAnnotations {
  std::vector<long> hit_counts;
  DetectionMask mask;
  std::vector<std::string> labels;
};

/// Maps annotation times onto frames via floor(time / time_resolution).
/// Every annotation must fall before frame_count * time_resolution.
inline FrameAnnotations annotations_to_frame_counts(
    const std::vector<OnsetList>& annotations, Index frame_count,
    double time_resolution) {
  if (frame_count < 1) throw config_error("frame count must be positive");
  if (!(time_resolution > 0)) throw config_error("time resolution must be positive");

  FrameAnnotations out;
  out.hit_counts.assign(static_cast<std::size_t>(frame_count), 0);
  out.mask = DetectionMask::Constant(static_cast<Index>(annotations.size()),
                                     frame_count, false);
  const double duration = static_cast<double>(frame_count) * time_resolution;
  for (std::size_t c = 0; c < annotations.size(); ++c) {
    out.labels.push_back(annotations[c].component);
    for (double time : annotations[c].times) {
      if (time < 0 || time >= duration)
        throw data_error("annotation at " + detail::format_number(time) +
                         " s for '" + annotations[c].component +
                         "' lies beyond the audio duration");
      const Index frame =
          std::min(static_cast<Index>(std::floor(time / time_resolution)),
                   frame_count - 1);
      ++out.hit_counts[static_cast<std::size_t>(frame)];
      out.mask(static_cast<Index>(c), frame) = true;
    }
  }
  return out;
}

/// Ground-truth-count protocol: in each frame j, mark the hit_counts[j]
/// components with the largest activation. Ties go to the lower component
/// index. Frames with a zero count yield no detections.
inline DetectionMask detect_topk(const Matrix& drum_activations,
                                 const std::vector<long>& hit_counts) {
  const Index components = drum_activations.rows();
  const Index frames = drum_activations.cols();
  if (static_cast<Index>(hit_counts.size()) != frames)
    throw data_error("per-frame hit counts do not match the activation frame count");

  DetectionMask detected = DetectionMask::Constant(components, frames, false);
  std::vector<Index> order(static_cast<std::size_t>(components));
  for (Index j = 0; j < frames; ++j) {
    const long k = hit_counts[static_cast<std::size_t>(j)];
    if (k == 0) continue;
    if (k < 0 || k > components)
      throw data_error("frame " + std::to_string(j) + " requests " + std::to_string(k) +
                       " detections but there are only " + std::to_string(components) +
                       " components");
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return drum_activations(a, j) > drum_activations(b, j);
    });
    for (long i = 0; i < k; ++i) detected(order[static_cast<std::size_t>(i)], j) = true;
  }
  return detected;
}

/// Frame-exact TP/FP/FN per component row between two masks.
inline std::vector<EvalCounts> counts_topk(const DetectionMask& detected,
                                           const DetectionMask& truth) {
  if (detected.rows() != truth.rows() || detected.cols() != truth.cols())
    throw data_error("detection and ground-truth masks have different shapes");
  std::vector<EvalCounts> out(static_cast<std::size_t>(detected.rows()));
  for (Index i = 0; i < detected.rows(); ++i) {
    for (Index j = 0; j < detected.cols(); ++j) {
      if (detected(i, j) && truth(i, j))
        ++out[static_cast<std::size_t>(i)].tp;
      else if (detected(i, j))
        ++out[static_cast<std::size_t>(i)].fp;
      else if (truth(i, j))
        ++out[static_cast<std::size_t>(i)].fn;
    }
  }
  return out;
}

namespace detail {

// Median of activation[lo, hi); the window is materialized and sorted.
// Even-length windows (possible only after boundary clipping) average the
// two middle values.
inline double window_median(const Vector& values, Index lo, Index hi) {
  std::vector<double> window(values.data() + lo, values.data() + hi);
  std::sort(window.begin(), window.end());
  const std::size_t size = window.size();
  if (size % 2 == 1) return window[size / 2];
  return 0.5 * (window[size / 2 - 1] + window[size / 2]);
}

}  // namespace detail

/// Signal-adaptive median threshold detector for one activation row.
///
/// The row is normalized to peak 1 (an all-zero row detects nothing), then
/// each frame is compared against the median of a centered window (length
/// round(window_seconds / time_resolution), forced odd by rounding up,
/// clipped at the boundaries) plus the per-instrument offset. Frames that
/// are strictly above threshold and are local maxima become candidates;
/// candidates closer than match_tolerance_seconds to the previously emitted
/// onset are suppressed, earliest first.
inline OnsetList detect_median(const Vector& activation_row,
                               const MedianThresholdConfig& config,
                               const std::string& label, double time_resolution) {
  if (activation_row.size() < 1) throw data_error("activation row is empty");
  if (!(time_resolution > 0)) throw config_error("time resolution must be positive");
  if (!(config.window_seconds > 0)) throw config_error("median window must be positive");
  if (!(config.match_tolerance_seconds > 0))
    throw config_error("match tolerance must be positive");
  const auto offset_it = config.offset_coefficients.find(label);
  if (offset_it == config.offset_coefficients.end())
    throw config_error("no offset coefficient configured for label '" + label + "'");
  if (!activation_row.allFinite())
    throw numeric_error("activation row for '" + label + "' has non-finite values");

  OnsetList onsets;
  onsets.component = label;

  const double peak = activation_row.maxCoeff();
  if (peak <= 0) return onsets;
  const Vector normalized = activation_row / peak;

  const Index frames = normalized.size();
  const double window_frames = config.window_seconds / time_resolution;
  if (!(window_frames < 1e9))
    throw config_error("median window spans an implausible number of frames");
  Index window = static_cast<Index>(std::llround(window_frames));
  if (window < 1) window = 1;
  if (window % 2 == 0) ++window;
  const Index half = window / 2;

  for (Index j = 0; j < frames; ++j) {
    const Index lo = std::max(Index{0}, j - half);
    const Index hi = std::min(frames, j + half + 1);
    const double threshold = detail::window_median(normalized, lo, hi) + offset_it->second;
    if (!(normalized[j] > threshold)) continue;
    if (j > 0 && normalized[j] < normalized[j - 1]) continue;
    if (j + 1 < frames && normalized[j] < normalized[j + 1]) continue;
    const double time = static_cast<double>(j) * time_resolution;
    if (!onsets.times.empty() &&
        time - onsets.times.back() < config.match_tolerance_seconds)
      continue;
    onsets.times.push_back(time);
  }
  return onsets;
}

namespace detail {

inline void require_sorted(const OnsetList& list, const char* role) {
  for (std::size_t i = 1; i < list.times.size(); ++i)
    if (!(list.times[i] > list.times[i - 1]))
      throw data_error(std::string(role) + " onset list for '" + list.component +
                       "' is not strictly increasing");
}

}  // namespace detail

/// Greedy chronological one-to-one matching: each detection, in time order,
/// matches the earliest still-unmatched reference onset within the
/// tolerance. TP = matches, FP = unmatched detections, FN = unmatched
/// references.
inline EvalCounts match_onsets(const OnsetList& detected, const OnsetList& reference,
                               double tolerance_seconds) {
  if (!(tolerance_seconds >= 0)) throw config_error("match tolerance must be nonnegative");
  detail::require_sorted(detected, "detected");
  detail::require_sorted(reference, "reference");

  EvalCounts counts;
  std::size_t next_reference = 0;
  for (double time : detected.times) {
    while (next_reference < reference.times.size() &&
           reference.times[next_reference] < time - tolerance_seconds) {
      ++counts.fn;  // too early to match this or any later detection
      ++next_reference;
    }
    if (next_reference < reference.times.size() &&
        reference.times[next_reference] <= time + tolerance_seconds) {
      ++counts.tp;
      ++next_reference;
    } else {
      ++counts.fp;
    }
  }
  counts.fn += static_cast<long>(reference.times.size() - next_reference);
  return counts;
}

/// F = 2TP / (2TP + FP + FN). The degenerate all-zero case is defined as a
/// perfect 1.0: nothing to detect and nothing detected.
inline double f_score(const EvalCounts& counts) {
  if (counts.tp < 0 || counts.fp < 0 || counts.fn < 0)
    throw config_error("evaluation counts must be nonnegative");
  if (counts.tp == 0 && counts.fp == 0 && counts.fn == 0) return 1.0;
  return 2.0 * static_cast<double>(counts.tp) /
         static_cast<double>(2 * counts.tp + counts.fp + counts.fn);
}

/// Reads the annotation format: one onset per line as
/// "<time_seconds>\t<label>", '#' comment lines and blank lines ignored.
/// Components are returned in first-appearance order with sorted times.
inline std::vector<OnsetList> read_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open annotation file: " + path);

  std::vector<OnsetList> lists;
  std::map<std::string, std::size_t> index_of;
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    auto bad = [&](const std::string& why) {
      return data_error("bad annotation in " + path + " line " +
                        std::to_string(line_number) + ": " + why);
    };
    if (tab == std::string::npos) throw bad("expected '<time>\\t<label>'");
    const std::string time_text = line.substr(0, tab);
    const std::string label = line.substr(tab + 1);
    if (label.empty()) throw bad("empty label");
    double time = 0.0;
    try {
      std::size_t consumed = 0;
      time = std::stod(time_text, &consumed);
      if (consumed != time_text.size()) throw std::invalid_argument(time_text);
    } catch (const std::exception&) {
      throw bad("cannot parse time '" + time_text + "'");
    }
    if (!(time >= 0)) throw bad("time must be nonnegative");
    auto [it, inserted] = index_of.try_emplace(label, lists.size());
    if (inserted) lists.push_back({label, {}});
    lists[it->second].times.push_back(time);
  }
  for (auto& list : lists) {
    std::sort(list.times.begin(), list.times.end());
    const auto dup = std::adjacent_find(list.times.begin(), list.times.end());
    if (dup != list.times.end())
      throw data_error("duplicate onset at " + detail::format_number(*dup) +
                       " s for '" + list.component + "' in " + path);
  }
  return lists;
}

/// Writes annotations in the same format, merged chronologically.
inline void write_annotations(const std::vector<OnsetList>& lists,
                              const std::string& path) {
  std::vector<std::pair<double, const std::string*>> merged;
  for (const auto& list : lists) {
    detail::require_sorted(list, "output");
    for (double time : list.times) merged.emplace_back(time, &list.component);
  }
  std::stable_sort(merged.begin(), merged.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::ofstream out(path);
  if (!out) throw data_error("cannot open annotation file for writing: " + path);
  for (const auto& [time, label] : merged)
    out << detail::format_number(time) << '\t' << *label << '\n';
  if (!out) throw data_error("failed writing annotation file: " + path);
}

}  // namespace pfnmf
