/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

// Command line front end: lpbf <command> [options]

#include <lpbf/pipeline.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace
{
void add_process_flags(CLI::App &cmd, lpbf::PipelineConfig &c)
{
  cmd.add_option("--spacing", c.hatch_spacing, "hatch spacing [mm]")->capture_default_str();
  cmd.add_option("--speed", c.speed, "scan speed [mm/s]")->capture_default_str();
  cmd.add_option("--power", c.power, "laser power [W]")->capture_default_str();
}

void add_bounds_flags(CLI::App &cmd, lpbf::PipelineConfig &c)
{
  cmd.add_option("--cref", c.c_ref, "reference footprint [px]")->capture_default_str();
  cmd.add_option("--pmin", c.p_min, "lower power bound [W]")->capture_default_str();
  cmd.add_option("--pmax", c.p_max, "upper power bound [W]")->capture_default_str();
}
} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Scan path generation, coaxial signal simulation, melt pool model "
               "identification and feedforward power control for LPBF layers"};
  app.require_subcommand(1);

  lpbf::PipelineConfig config;
  std::string out, model, frames, validate, report, out_scan, name;
  std::string input, second;

  auto *shape = app.add_subcommand("shape", "write a built-in test polygon");
  shape->add_option("name", name, "square, cube, triangle, star or wave")->required();
  shape->add_option("--out", out, "polygon file")->required();

  auto *model_cmd = app.add_subcommand("model", "write the default power model");
  model_cmd->add_option("--out", out, "model JSON")->required();

  auto *hatch = app.add_subcommand("hatch", "hatch a polygon into a meander scan");
  hatch->add_option("polygon", input, "polygon file")->required()->check(CLI::ExistingFile);
  hatch->add_option("--angle", config.angle, "hatch angle [deg]")->capture_default_str();
  add_process_flags(*hatch, config);
  hatch->add_option("--layer-id", config.layer_id, "layer id")->capture_default_str();
  hatch->add_option("--out", out, "scan file")->required();

  auto *simulate = app.add_subcommand("simulate", "simulate the coaxial signal of a scan");
  simulate->add_option("scan", input, "scan file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--model", model, "model JSON (default model if omitted)");
  simulate->add_option("--seed", config.seed, "noise seed")->capture_default_str();
  simulate->add_option("--sigma", config.sigma, "C1 noise sd [px]")->capture_default_str();
  simulate->add_option("--rate", config.sample_rate, "sample rate [Hz]")->capture_default_str();
  simulate->add_option("--frames", frames, "also write rendered frames (binary)");
  simulate->add_option("--out", out, "signal CSV")->required();

  auto *identify = app.add_subcommand("identify", "identify a power model");
  identify->add_option("manifest", input, "training manifest CSV")
      ->required()
      ->check(CLI::ExistingFile);
  identify->add_option("--validate", validate, "validation manifest CSV")
      ->check(CLI::ExistingFile);
  identify->add_option("--window", config.filter_window, "median filter window")
      ->capture_default_str();
  identify->add_option("--report", report, "JSON report");
  identify->add_option("--out", out, "model JSON")->required();

  auto *optimize = app.add_subcommand("optimize", "optimize the line powers of a scan");
  optimize->add_option("scan", input, "scan file")->required()->check(CLI::ExistingFile);
  optimize->add_option("--model", model, "model JSON (default model if omitted)");
  add_bounds_flags(*optimize, config);
  optimize->add_option("--out-scan", out_scan, "scan file with optimized powers");
  optimize->add_option("--out", out, "profile CSV")->required();

  auto *evaluate = app.add_subcommand("evaluate", "compare baseline and controlled signals");
  evaluate->add_option("baseline", input, "baseline signal CSV")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("controlled", second, "controlled signal CSV")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--window", config.filter_window, "median filter window")
      ->capture_default_str();
  evaluate->add_option("--out", out, "JSON report; SVG plots are written next to it")
      ->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::ParseError const &e)
  {
    int const code = app.exit(e);
    return code == 0 ? 0 : lpbf::exit_input_error;
  }

  auto &log = std::cerr;
  if (shape->parsed())
    return lpbf::cmd_shape(name, out, log);
  if (model_cmd->parsed())
    return lpbf::cmd_model(out, log);
  if (hatch->parsed())
    return lpbf::cmd_hatch(input, config, out, log);
  if (simulate->parsed())
    return lpbf::cmd_simulate(input, model, config, out, frames, log);
  if (identify->parsed())
    return lpbf::cmd_identify(input, validate, config, out, report, log);
  if (optimize->parsed())
    return lpbf::cmd_optimize(input, model, config, out, out_scan, log);
  return lpbf::cmd_evaluate(input, second, config, out, log);
}
