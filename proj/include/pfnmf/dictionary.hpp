// pfnmf/dictionary.hpp

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

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pfnmf/common.hpp"
#include "pfnmf/stft.hpp"

namespace pfnmf {

/// Fixed drum basis: one nonnegative spectral column per drum component,
/// labeled by instrument name. The basis never changes during solving.
struct Dictionary {
  Matrix basis;                     // bins x components
  std::vector<std::string> labels;  // one per column

  Index bins() const { return basis.rows(); }
  Index components() const { return basis.cols(); }
};

namespace detail {

inline void validate_label(const std::string& label) {
  if (label.empty()) throw config_error("component label must not be empty");
  if (label.find_first_of(",\t\n\r") != std::string::npos)
    throw config_error("component label must not contain commas, tabs or newlines: '" +
                       label + "'");
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t consumed = 0;
    const double v = std::stod(s, &consumed);
    if (consumed != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw data_error("cannot parse number '" + s + "' in " + context);
  }
}

}  // namespace detail

/// Averages a hit spectrogram over the time axis, yielding one basis column.
inline Vector build_component(const Spectrogram& hit) {
  if (hit.frames() < 1 || hit.bins() < 1)
    throw data_error("cannot build a dictionary component from an empty spectrogram");
  return hit.magnitudes.rowwise().mean();
}

/// Stacks labeled columns into a Dictionary. Labels must be distinct and
/// every column must have at least one positive entry; an all-zero column
/// would put zeros in multiplicative-update denominators.
inline Dictionary assemble_dictionary(const std::vector<Vector>& columns,
                                      const std::vector<std::string>& labels) {
  if (columns.empty()) throw config_error("dictionary needs at least one component");
  if (columns.size() != labels.size())
    throw config_error("dictionary has " + std::to_string(columns.size()) +
                       " columns but " + std::to_string(labels.size()) + " labels");
  std::set<std::string> seen;
  for (const auto& label : labels) {
    detail::validate_label(label);
    if (!seen.insert(label).second)
      throw config_error("duplicate component label '" + label + "'");
  }

  const Index bins = columns.front().size();
  Dictionary dict;
  dict.labels = labels;
  dict.basis.resize(bins, static_cast<Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].size() != bins)
      throw data_error("dictionary column '" + labels[i] + "' has " +
                       std::to_string(columns[i].size()) + " bins, expected " +
                       std::to_string(bins));
    if ((columns[i].array() < 0).any())
      throw data_error("dictionary column '" + labels[i] + "' has negative entries");
    if ((columns[i].array() == 0).all())
      throw data_error("dictionary column '" + labels[i] + "' is all zero");
    dict.basis.col(static_cast<Index>(i)) = columns[i];
  }
  return dict;
}

/// Writes the v1 text format:
///   pfnmf-dict v1
///   bins=<m> components=<r>
///   <comma-separated labels>
///   <m rows of r comma-separated values>
inline void write_dictionary(const Dictionary& dict, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open dictionary file for writing: " + path);
  out << "pfnmf-dict v1\n";
  out << "bins=" << dict.bins() << " components=" << dict.components() << "\n";
  for (Index c = 0; c < dict.components(); ++c)
    out << (c ? "," : "") << dict.labels[static_cast<std::size_t>(c)];
  out << "\n";
  for (Index b = 0; b < dict.bins(); ++b) {
    for (Index c = 0; c < dict.components(); ++c)
      out << (c ? "," : "") << detail::format_number(dict.basis(b, c));
    out << "\n";
  }
  if (!out) throw data_error("failed writing dictionary file: " + path);
}

inline Dictionary read_dictionary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open dictionary file: " + path);
  auto bad = [&](const std::string& why) {
    return data_error("bad dictionary file " + path + ": " + why);
  };

  std::string line;
  if (!std::getline(in, line) || line != "pfnmf-dict v1")
    throw bad("expected header 'pfnmf-dict v1'");

  long bins = 0, components = 0;
  if (!std::getline(in, line) ||
      std::sscanf(line.c_str(), "bins=%ld components=%ld", &bins, &components) != 2 ||
      bins < 1 || components < 1)
    throw bad("expected 'bins=<m> components=<r>'");

  if (!std::getline(in, line)) throw bad("missing label line");
  const std::vector<std::string> labels = detail::split(line, ',');
  if (static_cast<long>(labels.size()) != components)
    throw bad("expected " + std::to_string(components) + " labels, got " +
              std::to_string(labels.size()));

  Matrix basis(bins, components);
  for (long b = 0; b < bins; ++b) {
    if (!std::getline(in, line)) throw bad("missing value row " + std::to_string(b));
    const std::vector<std::string> cells = detail::split(line, ',');
    if (static_cast<long>(cells.size()) != components)
      throw bad("row " + std::to_string(b) + " has " + std::to_string(cells.size()) +
                " values, expected " + std::to_string(components));
    for (long c = 0; c < components; ++c) {
      const double v = detail::parse_double(cells[static_cast<std::size_t>(c)],
                                            "dictionary file " + path);
      if (!std::isfinite(v) || v < 0) throw bad("values must be finite and nonnegative");
      basis(b, c) = v;
    }
  }
  while (std::getline(in, line))
    if (!line.empty()) throw bad("trailing content after value rows");

  std::vector<Vector> columns;
  for (long c = 0; c < components; ++c) columns.push_back(basis.col(c));
  try {
    return assemble_dictionary(columns, labels);
  } catch (const config_error& e) {
    throw bad(e.what());
  }
}

}  // namespace pfnmf
