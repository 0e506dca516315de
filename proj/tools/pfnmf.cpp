// tools/pfnmf.cpp

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

// Command-line front end: dictionary training (dict), transcription
// (transcribe), F-score evaluation (eval), and the MUR-vs-NeNMF convergence
// benchmark (bench).
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 numeric failure.

#include <algorithm>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pfnmf/pfnmf.hpp"

namespace {

using pfnmf::Index;
using pfnmf::Matrix;

struct StftOptions {
  int window = 2048;
  int hop = 512;
};

struct SolverOptions {
  std::string solver = "nenmf";
  int iterations = 0;  // 0: pick the solver's default (MUR 100, NeNMF 10)
  int inner = 10;
  int harmonic_rank = 5;
  std::uint64_t seed = 0;
  double epsilon = 1e-12;
};

struct MedianOptions {
  double window_seconds = 0.1;
  std::vector<std::string> offsets;  // LABEL=COEFF entries
  double tolerance = 0.05;
};

void add_stft_options(CLI::App* cmd, StftOptions* opts) {
  cmd->add_option("--window", opts->window, "STFT window length in samples")
      ->default_val(2048);
  cmd->add_option("--hop", opts->hop, "STFT hop size in samples")->default_val(512);
}

void add_solver_options(CLI::App* cmd, SolverOptions* opts, bool with_solver_choice) {
  if (with_solver_choice)
    cmd->add_option("--solver", opts->solver, "Solver: mur or nenmf")
        ->check(CLI::IsMember({"mur", "nenmf"}))
        ->default_val("nenmf");
  cmd->add_option("--iters", opts->iterations,
                  "Iteration count (MUR iterations, or NeNMF outer iterations)");
  cmd->add_option("--inner", opts->inner, "NeNMF inner OGM iterations per subproblem")
      ->default_val(10);
  cmd->add_option("--rank-h", opts->harmonic_rank, "Harmonic rank r_H")->default_val(5);
  cmd->add_option("--seed", opts->seed, "Seed for the random initialization")
      ->default_val(0);
  cmd->add_option("--epsilon", opts->epsilon, "MUR denominator guard")
      ->default_val(1e-12);
}

void add_median_options(CLI::App* cmd, MedianOptions* opts) {
  cmd->add_option("--median-window", opts->window_seconds,
                  "Median threshold window in seconds")
      ->default_val(0.1);
  cmd->add_option("--offset", opts->offsets,
                  "Per-instrument threshold offset as LABEL=COEFF (repeatable)");
  cmd->add_option("--tolerance", opts->tolerance,
                  "Onset match tolerance / minimum separation in seconds")
      ->default_val(0.05);
}

std::pair<std::string, std::string> split_assignment(const std::string& text,
                                                     const char* what) {
  const std::size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
    throw pfnmf::config_error(std::string(what) + " must have the form NAME=VALUE: '" +
                              text + "'");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

pfnmf::MedianThresholdConfig resolve_median_config(const MedianOptions& opts) {
  pfnmf::MedianThresholdConfig config;
  config.window_seconds = opts.window_seconds;
  config.match_tolerance_seconds = opts.tolerance;
  for (const std::string& entry : opts.offsets) {
    const auto [label, value] = split_assignment(entry, "--offset");
    try {
      config.offset_coefficients[label] = std::stod(value);
    } catch (const std::exception&) {
      throw pfnmf::config_error("cannot parse offset coefficient '" + value + "'");
    }
    if (!(config.offset_coefficients[label] > 0))
      throw pfnmf::config_error("offset coefficient for '" + label +
                                "' must be positive");
  }
  return config;
}

int resolved_iterations(const SolverOptions& opts) {
  if (opts.iterations > 0) return opts.iterations;
  if (opts.iterations < 0)
    throw pfnmf::config_error("--iters must be positive");
  return opts.solver == "mur" ? 100 : 10;
}

pfnmf::Spectrogram load_spectrogram(const std::string& wav_path,
                                    const StftOptions& stft) {
  const pfnmf::AudioBuffer audio = pfnmf::load_wav(wav_path);
  return pfnmf::stft_magnitude(audio, stft.window, stft.hop);
}

pfnmf::Dictionary load_dictionary_checked(const std::string& path,
                                          const StftOptions& stft) {
  const pfnmf::Dictionary dict = pfnmf::read_dictionary(path);
  const Index expected = static_cast<Index>(stft.window) / 2 + 1;
  if (dict.bins() != expected)
    throw pfnmf::data_error(
        "dictionary " + path + " has " + std::to_string(dict.bins()) +
        " bins but window " + std::to_string(stft.window) + " produces " +
        std::to_string(expected) + "; rebuild the dictionary or change --window");
  return dict;
}

// ---------------------------------------------------------------------------
// dict

struct DictArgs {
  std::vector<std::string> hits;
  std::string out;
  StftOptions stft;
};

int run_dict(const DictArgs& args) {
  std::vector<pfnmf::Vector> columns;
  std::vector<std::string> labels;
  for (const std::string& entry : args.hits) {
    const auto [label, path] = split_assignment(entry, "hit argument");
    labels.push_back(label);
    columns.push_back(pfnmf::build_component(load_spectrogram(path, args.stft)));
  }
  const pfnmf::Dictionary dict = pfnmf::assemble_dictionary(columns, labels);
  pfnmf::write_dictionary(dict, args.out);

  std::cout << "wrote " << args.out << ": bins=" << dict.bins()
            << " components=" << dict.components() << " labels=";
  for (std::size_t i = 0; i < dict.labels.size(); ++i)
    std::cout << (i ? "," : "") << dict.labels[i];
  std::cout << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// transcribe

struct TranscribeArgs {
  std::string song;
  std::string dict_path;
  std::string out_prefix;
  StftOptions stft;
  SolverOptions solver;
  MedianOptions median;
};

int run_transcribe(const TranscribeArgs& args) {
  const pfnmf::Dictionary dict = load_dictionary_checked(args.dict_path, args.stft);
  const pfnmf::Spectrogram spec = load_spectrogram(args.song, args.stft);

  const pfnmf::FactorState init =
      pfnmf::random_init(spec.bins(), spec.frames(), dict.components(),
                         args.solver.harmonic_rank, args.solver.seed);
  const int iterations = resolved_iterations(args.solver);

  pfnmf::FactorState solved;
  if (args.solver.solver == "mur") {
    pfnmf::MurConfig config;
    config.iterations = iterations;
    config.epsilon = args.solver.epsilon;
    auto result = pfnmf::run_mur(spec, dict, init, config);
    solved = std::move(result.state);
    std::cout << "mur: iterations=" << iterations
              << " final_loss=" << pfnmf::detail::format_number(
                     result.trace.entries.back().loss)
              << "\n";
  } else {
    pfnmf::NenmfConfig config;
    config.outer_iterations = iterations;
    config.ogm.inner_iterations = args.solver.inner;
    auto result = pfnmf::run_nenmf(spec, dict, init, config);
    solved = std::move(result.state);
    for (const std::string& warning : result.warnings)
      std::cerr << "warning: " << warning << "\n";
    std::cout << "nenmf: outer=" << iterations << " inner=" << args.solver.inner
              << " final_loss=" << pfnmf::detail::format_number(
                     result.trace.entries.back().loss)
              << "\n";
  }

  const std::string activations_path = args.out_prefix + ".activations.csv";
  pfnmf::write_activations_csv(solved.drum_activations, dict.labels,
                               spec.time_resolution, activations_path);
  std::cout << "wrote " << activations_path << "\n";

  const pfnmf::MedianThresholdConfig median = resolve_median_config(args.median);
  const bool covered = std::all_of(
      dict.labels.begin(), dict.labels.end(), [&](const std::string& label) {
        return median.offset_coefficients.count(label) > 0;
      });
  if (!covered) {
    std::cerr << "note: no offset coefficient for some labels; skipping onset "
                 "detection (pass --offset LABEL=COEFF)\n";
    return 0;
  }
  std::vector<pfnmf::OnsetList> detected;
  for (Index i = 0; i < dict.components(); ++i)
    detected.push_back(pfnmf::detect_median(
        solved.drum_activations.row(i).transpose(), median,
        dict.labels[static_cast<std::size_t>(i)], spec.time_resolution));
  const std::string onsets_path = args.out_prefix + ".onsets.tsv";
  pfnmf::write_annotations(detected, onsets_path);
  std::cout << "wrote " << onsets_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string mode;
  std::string detected;
  std::string reference;
  std::string out;
  MedianOptions median;
};

// The annotation format cannot express "component present, zero onsets", so
// one side defines the component universe and the other may omit labels it
// has nothing for: omitted labels score as empty lists. A label outside the
// universe is a genuine mismatch.
void require_label_subset(const std::vector<std::string>& subset,
                          const std::vector<std::string>& universe,
                          const std::string& subset_role,
                          const std::string& universe_role) {
  for (const std::string& label : subset) {
    if (std::find(universe.begin(), universe.end(), label) == universe.end())
      throw pfnmf::data_error("component labels do not match: " + subset_role +
                              " has '" + label + "' which is absent from the " +
                              universe_role);
  }
}

int report_scores(const std::vector<std::string>& labels,
                  const std::vector<pfnmf::EvalCounts>& counts,
                  const std::string& out_path) {
  std::vector<pfnmf::ScoreRow> rows;
  pfnmf::EvalCounts totals;
  double f_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double f = pfnmf::f_score(counts[i]);
    rows.push_back({labels[i], counts[i], f});
    totals.tp += counts[i].tp;
    totals.fp += counts[i].fp;
    totals.fn += counts[i].fn;
    f_sum += f;
    std::cout << labels[i] << ": TP=" << counts[i].tp << " FP=" << counts[i].fp
              << " FN=" << counts[i].fn << " F=" << pfnmf::detail::format_number(f)
              << "\n";
  }
  const double mean_f = f_sum / static_cast<double>(labels.size());
  rows.push_back({"mean", totals, mean_f});
  std::cout << "mean F=" << pfnmf::detail::format_number(mean_f) << "\n";
  if (!out_path.empty()) {
    pfnmf::write_scores_csv(rows, out_path);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int run_eval(const EvalArgs& args) {
  const std::vector<pfnmf::OnsetList> reference = pfnmf::read_annotations(args.reference);
  std::vector<std::string> reference_labels;
  for (const auto& list : reference) reference_labels.push_back(list.component);

  if (args.mode == "topk-frames") {
    // The activation table defines the component universe.
    const pfnmf::ActivationTable table = pfnmf::read_activations_csv(args.detected);
    require_label_subset(reference_labels, table.labels, "reference",
                         "activation table");

    // Align annotation rows with the activation row order; components the
    // reference never mentions have no hits.
    std::vector<pfnmf::OnsetList> aligned;
    for (const std::string& label : table.labels) {
      pfnmf::OnsetList list{label, {}};
      for (const auto& reference_list : reference)
        if (reference_list.component == label) list = reference_list;
      aligned.push_back(std::move(list));
    }

    const pfnmf::FrameAnnotations truth = pfnmf::annotations_to_frame_counts(
        aligned, table.drum_activations.cols(), table.time_resolution());
    const pfnmf::DetectionMask detected =
        pfnmf::detect_topk(table.drum_activations, truth.hit_counts);
    return report_scores(table.labels, pfnmf::counts_topk(detected, truth.mask),
                         args.out);
  }

  // median-onsets: the reference defines the component universe, and a
  // component with no detections at all is simply absent on the detected side.
  const std::vector<pfnmf::OnsetList> detected = pfnmf::read_annotations(args.detected);
  std::vector<std::string> detected_labels;
  for (const auto& list : detected) detected_labels.push_back(list.component);
  require_label_subset(detected_labels, reference_labels, "detected", "reference");

  std::vector<pfnmf::EvalCounts> counts;
  for (const auto& reference_list : reference) {
    pfnmf::OnsetList detected_list{reference_list.component, {}};
    for (const auto& list : detected)
      if (list.component == reference_list.component) detected_list = list;
    counts.push_back(
        pfnmf::match_onsets(detected_list, reference_list, args.median.tolerance));
  }
  return report_scores(reference_labels, counts, args.out);
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string song;
  std::string dict_path;
  std::string out;
  StftOptions stft;
  SolverOptions solver;
};

int run_bench(const BenchArgs& args) {
  const pfnmf::Dictionary dict = load_dictionary_checked(args.dict_path, args.stft);
  const pfnmf::Spectrogram spec = load_spectrogram(args.song, args.stft);

  const int mur_iterations = args.solver.iterations > 0 ? args.solver.iterations : 100;
  const int inner = args.solver.inner;
  const int outer = std::max(1, (mur_iterations + inner / 2) / inner);

  const pfnmf::FactorState init =
      pfnmf::random_init(spec.bins(), spec.frames(), dict.components(),
                         args.solver.harmonic_rank, args.solver.seed);

  // Both solvers must consume the identical initialization.
  const pfnmf::FactorState init_mur = init;
  const pfnmf::FactorState init_nenmf = init;
  if (pfnmf::state_hash(init_mur) != pfnmf::state_hash(init_nenmf))
    throw std::logic_error("solver initializations diverged");

  pfnmf::MurConfig mur_config;
  mur_config.iterations = mur_iterations;
  mur_config.epsilon = args.solver.epsilon;
  const pfnmf::MurResult mur = pfnmf::run_mur(spec, dict, init_mur, mur_config);

  pfnmf::NenmfConfig nenmf_config;
  nenmf_config.outer_iterations = outer;
  nenmf_config.ogm.inner_iterations = inner;
  const pfnmf::NenmfResult nenmf = pfnmf::run_nenmf(spec, dict, init_nenmf, nenmf_config);
  for (const std::string& warning : nenmf.warnings)
    std::cerr << "warning: " << warning << "\n";

  std::vector<pfnmf::BenchRow> rows;
  for (const pfnmf::TracePoint& point : mur.trace.entries)
    rows.push_back({"mur", point.iteration, point.elapsed_seconds, 2.0 * point.loss});
  for (const pfnmf::TracePoint& point : nenmf.trace.entries)
    rows.push_back({"nenmf", static_cast<long>(point.iteration) * inner,
                    point.elapsed_seconds, 2.0 * point.loss});
  pfnmf::write_trace_csv(rows, args.out);

  std::cout << "wrote " << args.out << "\n";
  std::cout << "mur: iterations=" << mur_iterations << " final_error="
            << pfnmf::detail::format_number(2.0 * mur.trace.entries.back().loss) << "\n";
  std::cout << "nenmf: outer=" << outer << " inner=" << inner << " final_error="
            << pfnmf::detail::format_number(2.0 * nenmf.trace.entries.back().loss)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drum transcription by partially fixed nonnegative matrix factorization"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read option defaults from an INI file");

  DictArgs dict_args;
  CLI::App* dict_cmd =
      app.add_subcommand("dict", "Build a drum dictionary from isolated hit recordings");
  dict_cmd->add_option("hits", dict_args.hits, "Hit recordings as LABEL=WAV")
      ->required()
      ->expected(-1);
  dict_cmd->add_option("--out", dict_args.out, "Output dictionary path")->required();
  add_stft_options(dict_cmd, &dict_args.stft);

  TranscribeArgs transcribe_args;
  CLI::App* transcribe_cmd =
      app.add_subcommand("transcribe", "Transcribe a song against a drum dictionary");
  transcribe_cmd->add_option("song", transcribe_args.song, "Song WAV file")->required();
  transcribe_cmd->add_option("--dict", transcribe_args.dict_path, "Dictionary file")
      ->required();
  transcribe_cmd->add_option("--out", transcribe_args.out_prefix, "Output path prefix")
      ->required();
  add_stft_options(transcribe_cmd, &transcribe_args.stft);
  add_solver_options(transcribe_cmd, &transcribe_args.solver, true);
  add_median_options(transcribe_cmd, &transcribe_args.median);

  EvalArgs eval_args;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Score detections against reference annotations");
  eval_cmd->add_option("--mode", eval_args.mode, "topk-frames or median-onsets")
      ->check(CLI::IsMember({"topk-frames", "median-onsets"}))
      ->required();
  eval_cmd
      ->add_option("--detected", eval_args.detected,
                   "Activations CSV (topk-frames) or detected onsets TSV (median-onsets)")
      ->required();
  eval_cmd->add_option("--ref", eval_args.reference, "Reference annotation TSV")
      ->required();
  eval_cmd->add_option("--out", eval_args.out, "Optional scores CSV output path");
  add_median_options(eval_cmd, &eval_args.median);

  BenchArgs bench_args;
  CLI::App* bench_cmd = app.add_subcommand(
      "bench", "Compare MUR and NeNMF convergence from one shared initialization");
  bench_cmd->add_option("song", bench_args.song, "Song WAV file")->required();
  bench_cmd->add_option("--dict", bench_args.dict_path, "Dictionary file")->required();
  bench_cmd->add_option("--out", bench_args.out, "Output trace CSV path")->required();
  add_stft_options(bench_cmd, &bench_args.stft);
  add_solver_options(bench_cmd, &bench_args.solver, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (dict_cmd->parsed()) return run_dict(dict_args);
    if (transcribe_cmd->parsed()) return run_transcribe(transcribe_args);
    if (eval_cmd->parsed()) return run_eval(eval_args);
    if (bench_cmd->parsed()) return run_bench(bench_args);
  } catch (const pfnmf::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const pfnmf::data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pfnmf::numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
