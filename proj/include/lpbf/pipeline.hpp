/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef LPBF_PIPELINE_HPP
#define LPBF_PIPELINE_HPP

#include <lpbf/coax.hpp>
#include <lpbf/ffcontrol.hpp>
#include <lpbf/meltmodel.hpp>
#include <lpbf/scanpath.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lpbf
{
/// Process and evaluation settings shared by the commands.
struct PipelineConfig
{
  double sample_rate = default_sample_rate;
  double hatch_spacing = 0.09;
  double speed = 800.;
  double power = 200.;
  double angle = 0.;
  double p_min = model_power_min;
  double p_max = model_power_max;
  double c_ref = default_c_ref;
  int filter_window = trend_window;
  std::uint64_t seed = 0;
  double sigma = 175.;
  double jump_speed = default_jump_speed;
  int layer_id = 0;
};

enum ExitCode : int
{
  exit_ok = 0,
  exit_input_error = 2,
  exit_identification_error = 3,
  exit_optimization_error = 4
};

/**
 * Regression samples of one layer: every valid sample on line n >= 1 that
 * follows line n - 1 without a jump is paired with the length of line n - 1,
 * the length that drives the exponential term. Samples whose previous line
 * is shorter than min_line_length are dropped as well.
 */
std::vector<FitSample> fit_samples(LayerScan const &scan,
                                   std::vector<SignalSample> const &samples);

/// One simulated or measured layer.
struct LayerRecord
{
  LayerScan scan;
  std::vector<SignalSample> samples;
};

/// Static exponential fit on the pooled samples of a chunk of layers.
ExpFit identify_chunk(std::vector<LayerRecord> const &layers, double power);

struct LayerValidation
{
  std::vector<double> observed_trend;
  std::vector<double> predicted;
  FitMetrics metrics;
};

/**
 * Compare the model with the median filtered C1 of the valid samples of one
 * layer. The prediction is the per-line eval_dynamic value of each sample.
 */
LayerValidation validate_layer(PowerModel const &model, LayerRecord const &layer,
                               int window = trend_window);

/// Manifest row: chunk label, power label, scan file, signal CSV.
struct ManifestEntry
{
  std::string chunk;
  double power = 0.;
  std::filesystem::path scan;
  std::filesystem::path signal;
};

/// CSV with header `chunk,power_w,scan,signal`; relative paths are resolved
/// against the manifest's directory.
std::vector<ManifestEntry> parse_manifest(std::string_view text,
                                          std::filesystem::path const &base_dir);

struct IdentifyResult
{
  std::vector<std::string> chunk_labels;
  std::vector<ExpFit> chunk_fits;
  PowerModelFit power_fit;
  std::vector<double> validation_r2;
  std::optional<double> mean_validation_r2;
};

IdentifyResult identify(std::vector<ManifestEntry> const &training,
                        std::vector<ManifestEntry> const &validation,
                        int window = trend_window);

std::string identify_report_json(IdentifyResult const &result);

/// C1 of every sample that lies on a scan line, in time order.
std::vector<double> on_line_c1(std::vector<SignalSample> const &samples);

struct EvaluationResult
{
  double baseline_sigma = 0.;
  double controlled_sigma = 0.;
  double ratio = 0.;
};

EvaluationResult evaluate(std::vector<SignalSample> const &baseline,
                          std::vector<SignalSample> const &controlled,
                          int window = trend_window);

// Command entry points of the `lpbf` tool. Each returns an ExitCode and
// reports diagnostics on \p log.

int cmd_shape(std::string const &name, std::filesystem::path const &out,
              std::ostream &log);

int cmd_model(std::filesystem::path const &out, std::ostream &log);

int cmd_hatch(std::filesystem::path const &polygon, PipelineConfig const &config,
              std::filesystem::path const &out, std::ostream &log);

/// An empty model path selects the built-in default model.
int cmd_simulate(std::filesystem::path const &scan,
                 std::filesystem::path const &model, PipelineConfig const &config,
                 std::filesystem::path const &out,
                 std::filesystem::path const &frames, std::ostream &log);

int cmd_identify(std::filesystem::path const &manifest,
                 std::filesystem::path const &validation_manifest,
                 PipelineConfig const &config, std::filesystem::path const &out,
                 std::filesystem::path const &report, std::ostream &log);

/// Writes the profile CSV to \p out and the re-powered scan to \p out_scan.
int cmd_optimize(std::filesystem::path const &scan,
                 std::filesystem::path const &model, PipelineConfig const &config,
                 std::filesystem::path const &out,
                 std::filesystem::path const &out_scan, std::ostream &log);

/// Writes a JSON report to \p out and SVG plots next to it.
int cmd_evaluate(std::filesystem::path const &baseline,
                 std::filesystem::path const &controlled,
                 PipelineConfig const &config, std::filesystem::path const &out,
                 std::ostream &log);
} // namespace lpbf

#endif
