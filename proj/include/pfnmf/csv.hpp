// pfnmf/csv.hpp

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

#include <fstream>
#include <string>
#include <vector>

#include "pfnmf/common.hpp"
#include "pfnmf/dictionary.hpp"
#include "pfnmf/onsets.hpp"

// CSV file formats emitted by the tools: drum activation matrices,
// solver convergence traces, and evaluation score tables. Each format has a
// reader so that every emitted file can be consumed back. All numbers use
// '.' decimals and shortest-round-trip formatting; lines end with LF.

namespace pfnmf {

/// A drum activation matrix with its component labels and frame times, as
/// stored in the activations CSV (header "component,<t0>,<t1>,...", one row
/// per component).
struct ActivationTable {
  Matrix drum_activations;          // components x frames
  std::vector<std::string> labels;  // row labels
  std::vector<double> frame_times;  // seconds, frame k at k * resolution

  double time_resolution() const {
    if (frame_times.size() < 2)
      throw data_error("activation table has fewer than 2 frames; time resolution unknown");
    return frame_times[1] - frame_times[0];
  }
};

inline void write_activations_csv(const Matrix& drum_activations,
                                  const std::vector<std::string>& labels,
                                  double time_resolution, const std::string& path) {
  if (static_cast<Index>(labels.size()) != drum_activations.rows())
    throw data_error("activation rows and labels differ in count");
  if (!(time_resolution > 0)) throw config_error("time resolution must be positive");
  std::ofstream out(path);
  if (!out) throw data_error("cannot open activations CSV for writing: " + path);

  out << "component";
  for (Index j = 0; j < drum_activations.cols(); ++j)
    out << ',' << detail::format_number(static_cast<double>(j) * time_resolution);
  out << '\n';
  for (Index i = 0; i < drum_activations.rows(); ++i) {
    out << labels[static_cast<std::size_t>(i)];
    for (Index j = 0; j < drum_activations.cols(); ++j)
      out << ',' << detail::format_number(drum_activations(i, j));
    out << '\n';
  }
  if (!out) throw data_error("failed writing activations CSV: " + path);
}

inline ActivationTable read_activations_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open activations CSV: " + path);
  auto bad = [&](const std::string& why) {
    return data_error("bad activations CSV " + path + ": " + why);
  };

  std::string line;
  if (!std::getline(in, line)) throw bad("empty file");
  std::vector<std::string> cells = detail::split(line, ',');
  if (cells.empty() || cells[0] != "component")
    throw bad("header must start with 'component'");

  ActivationTable table;
  for (std::size_t j = 1; j < cells.size(); ++j)
    table.frame_times.push_back(detail::parse_double(cells[j], "header of " + path));
  const std::size_t frames = table.frame_times.size();
  if (frames == 0) throw bad("no frame columns");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    cells = detail::split(line, ',');
    if (cells.size() != frames + 1)
      throw bad("row " + std::to_string(rows.size() + 1) + " has " +
                std::to_string(cells.size() - 1) + " values, expected " +
                std::to_string(frames));
    table.labels.push_back(cells[0]);
    rows.emplace_back();
    for (std::size_t j = 1; j < cells.size(); ++j)
      rows.back().push_back(detail::parse_double(cells[j], path));
  }
  if (rows.empty()) throw bad("no component rows");

  table.drum_activations.resize(static_cast<Index>(rows.size()),
                                static_cast<Index>(frames));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < frames; ++j)
      table.drum_activations(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return table;
}

/// One row of the solver benchmark trace. budget_units puts both solvers on
/// a comparable axis: the iteration index for MUR, and the inner iteration
/// count times the outer index for NeNMF. squared_frobenius_error is the
/// full squared Frobenius reconstruction error (twice the internal loss).
struct BenchRow {
  std::string solver;
  long budget_units = 0;
  double elapsed_seconds = 0.0;
  double squared_frobenius_error = 0.0;
};

inline void write_trace_csv(const std::vector<BenchRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open trace CSV for writing: " + path);
  out << "solver,budget_units,elapsed_seconds,squared_frobenius_error\n";
  for (const BenchRow& row : rows)
    out << row.solver << ',' << row.budget_units << ','
        << detail::format_number(row.elapsed_seconds) << ','
        << detail::format_number(row.squared_frobenius_error) << '\n';
  if (!out) throw data_error("failed writing trace CSV: " + path);
}

inline std::vector<BenchRow> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open trace CSV: " + path);
  auto bad = [&](const std::string& why) {
    return data_error("bad trace CSV " + path + ": " + why);
  };

  std::string line;
  if (!std::getline(in, line) ||
      line != "solver,budget_units,elapsed_seconds,squared_frobenius_error")
    throw bad("unexpected header");
  std::vector<BenchRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = detail::split(line, ',');
    if (cells.size() != 4) throw bad("expected 4 columns");
    BenchRow row;
    row.solver = cells[0];
    row.budget_units = static_cast<long>(detail::parse_double(cells[1], path));
    row.elapsed_seconds = detail::parse_double(cells[2], path);
    row.squared_frobenius_error = detail::parse_double(cells[3], path);
    rows.push_back(row);
  }
  return rows;
}

/// One row of an evaluation score table. The trailing "mean" row carries
/// the summed counts and the unweighted mean F across components.
struct ScoreRow {
  std::string component;
  EvalCounts counts;
  double f = 0.0;
};

inline void write_scores_csv(const std::vector<ScoreRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open scores CSV for writing: " + path);
  out << "component,tp,fp,fn,f_score\n";
  for (const ScoreRow& row : rows)
    out << row.component << ',' << row.counts.tp << ',' << row.counts.fp << ','
        << row.counts.fn << ',' << detail::format_number(row.f) << '\n';
  if (!out) throw data_error("failed writing scores CSV: " + path);
}

inline std::vector<ScoreRow> read_scores_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open scores CSV: " + path);
  auto bad = [&](const std::string& why) {
    return data_error("bad scores CSV " + path + ": " + why);
  };

  std::string line;
  if (!std::getline(in, line) || line != "component,tp,fp,fn,f_score")
    throw bad("unexpected header");
  std::vector<ScoreRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = detail::split(line, ',');
    if (cells.size() != 5) throw bad("expected 5 columns");
    ScoreRow row;
    row.component = cells[0];
    row.counts.tp = static_cast<long>(detail::parse_double(cells[1], path));
    row.counts.fp = static_cast<long>(detail::parse_double(cells[2], path));
    row.counts.fn = static_cast<long>(detail::parse_double(cells[3], path));
    row.f = detail::parse_double(cells[4], path);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pfnmf
