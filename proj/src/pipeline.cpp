/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include <lpbf/pipeline.hpp>
#include <lpbf/shapes.hpp>
#include <lpbf/simulate.hpp>
#include <lpbf/svg.hpp>
#include <lpbf/textio.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace lpbf
{
namespace fs = std::filesystem;

namespace
{
// Runs a command body and maps library errors onto exit codes.
template <typename Body>
int run_command(char const *name, std::ostream &log, Body &&body)
{
  try
  {
    return body();
  }
  catch (IdentificationError const &e)
  {
    log << name << ": identification error: " << e.what() << '\n';
    return exit_identification_error;
  }
  catch (Error const &e)
  {
    log << name << ": " << e.what() << '\n';
    return exit_input_error;
  }
  catch (std::exception const &e)
  {
    log << name << ": " << e.what() << '\n';
    return exit_input_error;
  }
}

PowerModel load_model(fs::path const &path)
{
  if (path.empty())
    return PowerModel::nominal();
  return parse_power_model(read_file(path));
}

nlohmann::json summary_json(RegressionSummary const &s)
{
  nlohmann::json j;
  j["coefficients"] = s.coefficients;
  j["standard_errors"] = s.standard_errors;
  j["r2"] = std::isfinite(s.r2) ? nlohmann::json(s.r2) : nlohmann::json();
  j["used"] = s.used;
  j["rejected"] = s.rejected;
  return j;
}

nlohmann::json number_or_null(double v)
{
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json();
}
} // namespace

std::vector<FitSample> fit_samples(LayerScan const &scan,
                                   std::vector<SignalSample> const &samples)
{
  auto const lengths = line_lengths(scan);
  auto const jumps = jump_flags(scan);
  std::vector<FitSample> out;
  for (auto const &s : samples)
  {
    if (!s.valid || !s.line_index)
      continue;
    auto const n = static_cast<std::size_t>(*s.line_index);
    if (n >= lengths.size())
      throw InvalidArgument(fmt::format("sample refers to line {} of a {}-line scan",
                                        n, lengths.size()));
    if (n == 0 || jumps[n] || lengths[n - 1] < min_line_length)
      continue;
    out.push_back({lengths[n - 1], static_cast<double>(s.c1)});
  }
  return out;
}

ExpFit identify_chunk(std::vector<LayerRecord> const &layers, double power)
{
  std::vector<FitSample> pooled;
  for (auto const &layer : layers)
  {
    auto const s = fit_samples(layer.scan, layer.samples);
    pooled.insert(pooled.end(), s.begin(), s.end());
  }
  ExpFit fit = fit_exponential(pooled);
  fit.power = power;
  return fit;
}

LayerValidation validate_layer(PowerModel const &model, LayerRecord const &layer,
                               int window)
{
  auto const per_line = eval_dynamic(model, line_powers(layer.scan),
                                     line_lengths(layer.scan), jump_flags(layer.scan));
  std::vector<double> observed;
  LayerValidation out;
  for (auto const &s : layer.samples)
  {
    if (!s.valid || !s.line_index)
      continue;
    if (static_cast<std::size_t>(*s.line_index) >= per_line.size())
      throw InvalidArgument("sample refers to a line outside the scan");
    observed.push_back(s.c1);
    out.predicted.push_back(per_line[*s.line_index]);
  }
  if (observed.empty())
    throw InvalidArgument("validation layer has no valid samples");
  out.observed_trend = median_filter(observed, window);
  out.metrics = fit_metrics(out.observed_trend, out.predicted);
  return out;
}

std::vector<ManifestEntry> parse_manifest(std::string_view text,
                                          fs::path const &base_dir)
{
  auto const lines = split_lines(text);
  if (lines.empty() || trim(lines.front()) != "chunk,power_w,scan,signal")
    throw ParseError(1, "expected header 'chunk,power_w,scan,signal'");
  std::vector<ManifestEntry> out;
  for (std::size_t i = 1; i < lines.size(); ++i)
  {
    std::string_view const line = trim(lines[i]);
    if (line.empty() || line.front() == '#')
      continue;
    auto const f = split_char(line, ',');
    if (f.size() != 4)
      throw ParseError(i + 1, "expected 4 fields");
    auto const power = parse_double(trim(f[1]));
    if (!power)
      throw ParseError(i + 1, "power label is not a number");
    auto resolve = [&](std::string_view p)
    {
      fs::path path{std::string(trim(p))};
      return path.is_absolute() ? path : base_dir / path;
    };
    out.push_back({std::string(trim(f[0])), *power, resolve(f[2]), resolve(f[3])});
  }
  return out;
}

IdentifyResult identify(std::vector<ManifestEntry> const &training,
                        std::vector<ManifestEntry> const &validation, int window)
{
  std::vector<std::string> order;
  std::map<std::string, std::vector<ManifestEntry const *>> chunks;
  for (auto const &e : training)
  {
    if (!chunks.contains(e.chunk))
      order.push_back(e.chunk);
    chunks[e.chunk].push_back(&e);
  }
  IdentifyResult result;
  for (auto const &label : order)
  {
    auto const &entries = chunks[label];
    double const power = entries.front()->power;
    std::vector<LayerRecord> layers;
    for (auto const *e : entries)
    {
      if (e->power != power)
        throw InvalidArgument(fmt::format(
            "chunk '{}' mixes power labels {} and {}", label, power, e->power));
      layers.push_back({parse_scanfile(read_file(e->scan)),
                        parse_signal_csv(read_file(e->signal))});
    }
    result.chunk_labels.push_back(label);
    result.chunk_fits.push_back(identify_chunk(layers, power));
  }
  result.power_fit = fit_power_model(result.chunk_fits);

  if (!validation.empty())
  {
    double sum = 0.;
    std::size_t defined = 0;
    for (auto const &e : validation)
    {
      LayerRecord const layer{parse_scanfile(read_file(e.scan)),
                              parse_signal_csv(read_file(e.signal))};
      auto const v = validate_layer(result.power_fit.model, layer, window);
      double const r2 = v.metrics.r2.value_or(std::nan(""));
      result.validation_r2.push_back(r2);
      if (std::isfinite(r2))
      {
        sum += r2;
        ++defined;
      }
    }
    if (defined > 0)
      result.mean_validation_r2 = sum / static_cast<double>(defined);
  }
  return result;
}

std::string identify_report_json(IdentifyResult const &result)
{
  nlohmann::json j;
  auto &chunks = j["chunks"] = nlohmann::json::array();
  for (std::size_t i = 0; i < result.chunk_fits.size(); ++i)
  {
    auto const &f = result.chunk_fits[i];
    chunks.push_back({{"chunk", result.chunk_labels[i]},
                      {"power_w", f.power},
                      {"c_inf", f.c_inf},
                      {"delta_c", f.delta_c},
                      {"r", f.r},
                      {"rmse", number_or_null(f.rmse)},
                      {"r2", number_or_null(f.r2)}});
  }
  j["regressions"]["c_inf"] = summary_json(result.power_fit.c_inf);
  j["regressions"]["delta_c"] = summary_json(result.power_fit.delta_c);
  j["regressions"]["r"] = summary_json(result.power_fit.r);
  j["model"] = nlohmann::json::parse(write_power_model(result.power_fit.model));
  auto &val = j["validation"];
  val["r2_per_layer"] = nlohmann::json::array();
  for (double r2 : result.validation_r2)
    val["r2_per_layer"].push_back(number_or_null(r2));
  val["mean_r2"] = result.mean_validation_r2
                       ? nlohmann::json(*result.mean_validation_r2)
                       : nlohmann::json();
  return j.dump(2) + "\n";
}

std::vector<double> on_line_c1(std::vector<SignalSample> const &samples)
{
  std::vector<double> out;
  out.reserve(samples.size());
  for (auto const &s : samples)
    if (s.line_index)
      out.push_back(s.c1);
  return out;
}

EvaluationResult evaluate(std::vector<SignalSample> const &baseline,
                          std::vector<SignalSample> const &controlled, int window)
{
  EvaluationResult r;
  r.baseline_sigma = trend_sigma(on_line_c1(baseline), window);
  r.controlled_sigma = trend_sigma(on_line_c1(controlled), window);
  if (!(r.baseline_sigma > 0.))
    throw InvalidArgument("baseline trend has zero spread; ratio undefined");
  r.ratio = r.controlled_sigma / r.baseline_sigma;
  return r;
}

int cmd_shape(std::string const &name, fs::path const &out, std::ostream &log)
{
  return run_command("shape", log,
                     [&]
                     {
                       write_file(out, shapes::write_polygon(shapes::by_name(name)));
                       return exit_ok;
                     });
}

int cmd_model(fs::path const &out, std::ostream &log)
{
  return run_command("model", log,
                     [&]
                     {
                       write_file(out, write_power_model(PowerModel::nominal()));
                       return exit_ok;
                     });
}

int cmd_hatch(fs::path const &polygon, PipelineConfig const &config,
              fs::path const &out, std::ostream &log)
{
  return run_command(
      "hatch", log,
      [&]
      {
        auto const poly = shapes::parse_polygon(read_file(polygon));
        LayerScan scan = hatch_polygon(poly, config.angle, config.hatch_spacing,
                                       config.power, config.speed);
        scan.layer_id = config.layer_id;
        write_file(out, write_scanfile(scan));
        auto const jumps = jump_flags(scan);
        log << fmt::format("hatch: {} lines, {} jumps\n", scan.size(),
                           std::count(jumps.begin(), jumps.end(), true));
        return exit_ok;
      });
}

int cmd_simulate(fs::path const &scan_path, fs::path const &model_path,
                 PipelineConfig const &config, fs::path const &out,
                 fs::path const &frames, std::ostream &log)
{
  return run_command(
      "simulate", log,
      [&]
      {
        auto const scan = parse_scanfile(read_file(scan_path));
        auto const model = load_model(model_path);
        NoiseConfig noise;
        noise.sigma_c1 = config.sigma;
        noise.seed = config.seed;
        SimOptions options;
        options.sample_rate = config.sample_rate;
        options.jump_speed = config.jump_speed;
        auto const sim = simulate_layer(scan, model, noise, options);
        write_file(out, write_signal_csv(sim.samples));
        if (!frames.empty())
        {
          auto const rendered = render_frames(sim.samples);
          write_file(frames, write_frames(rendered));
          fs::path sidecar = frames;
          sidecar.replace_extension(".times.csv");
          write_file(sidecar, write_frame_times_csv(rendered));
        }
        log << fmt::format("simulate: {} samples\n", sim.samples.size());
        return exit_ok;
      });
}

int cmd_identify(fs::path const &manifest, fs::path const &validation_manifest,
                 PipelineConfig const &config, fs::path const &out,
                 fs::path const &report, std::ostream &log)
{
  return run_command(
      "identify", log,
      [&]
      {
        auto const training =
            parse_manifest(read_file(manifest), manifest.parent_path());
        std::vector<ManifestEntry> validation;
        if (!validation_manifest.empty())
          validation = parse_manifest(read_file(validation_manifest),
                                      validation_manifest.parent_path());
        auto const result = identify(training, validation, config.filter_window);
        write_file(out, write_power_model(result.power_fit.model));
        if (!report.empty())
          write_file(report, identify_report_json(result));
        auto const &m = result.power_fit.model;
        log << fmt::format(
            "identify: {} chunks; c_inf = {:.4g} p + {:.4g} (R2 {:.3f}), "
            "delta_c = {:.4g} p^2 + {:.4g} p + {:.4g} (R2 {:.3f}), "
            "r = {:.4g} p (R2 {:.3f})\n",
            result.chunk_fits.size(), m.c_inf_slope, m.c_inf_intercept, m.dc_quad,
            m.dc_lin, m.dc_intercept, m.r_slope, result.power_fit.c_inf.r2,
            result.power_fit.delta_c.r2, result.power_fit.r.r2);
        if (result.mean_validation_r2)
          log << fmt::format("identify: mean validation R2 on filtered trend {:.3f}\n",
                             *result.mean_validation_r2);
        return exit_ok;
      });
}

int cmd_optimize(fs::path const &scan_path, fs::path const &model_path,
                 PipelineConfig const &config, fs::path const &out,
                 fs::path const &out_scan, std::ostream &log)
{
  return run_command(
      "optimize", log,
      [&]
      {
        auto const scan = parse_scanfile(read_file(scan_path));
        auto const model = load_model(model_path);
        auto const problem =
            problem_from_scan(scan, model, config.c_ref, config.p_min, config.p_max);
        auto const profile = optimize_powers(problem);
        write_file(out, write_profile_csv(profile, predicted_c1(problem, profile.powers)));
        if (!out_scan.empty())
          write_file(out_scan, write_scanfile(apply_profile(scan, profile)));
        auto const saturated = std::count_if(
            profile.powers.begin(), profile.powers.end(), [&](double p)
            { return p <= problem.p_min + 1e-9 || p >= problem.p_max - 1e-9; });
        if (saturated > 0)
          log << fmt::format("optimize: warning: {} of {} lines at a power bound; "
                             "the reference is not attainable there\n",
                             saturated, profile.powers.size());
        log << fmt::format("optimize: cost {:.6g} after {} iterations\n",
                           profile.cost, profile.iterations);
        if (!profile.converged)
        {
          log << "optimize: solver did not converge\n";
          return exit_optimization_error;
        }
        return exit_ok;
      });
}

int cmd_evaluate(fs::path const &baseline, fs::path const &controlled,
                 PipelineConfig const &config, fs::path const &out,
                 std::ostream &log)
{
  return run_command(
      "evaluate", log,
      [&]
      {
        auto const base = parse_signal_csv(read_file(baseline));
        auto const ctrl = parse_signal_csv(read_file(controlled));
        auto const result = evaluate(base, ctrl, config.filter_window);
        nlohmann::json j{{"baseline_trend_sigma", result.baseline_sigma},
                         {"controlled_trend_sigma", result.controlled_sigma},
                         {"ratio", result.ratio},
                         {"window", config.filter_window}};
        write_file(out, j.dump(2) + "\n");

        fs::path stem = out;
        stem.replace_extension();
        auto const base_c1 = on_line_c1(base);
        auto const ctrl_c1 = on_line_c1(ctrl);
        write_file(stem.string() + "_baseline_map.svg",
                   svg::spatial_map(base, "Baseline C1 spatial map"));
        write_file(stem.string() + "_controlled_map.svg",
                   svg::spatial_map(ctrl, "Controlled C1 spatial map"));
        write_file(stem.string() + "_trend.svg",
                   svg::line_plot({{"baseline raw", "#bbbbdd", base_c1},
                                   {"controlled raw", "#ddbbbb", ctrl_c1},
                                   {"baseline median filtered", "#1f3fbf",
                                    median_filter(base_c1, config.filter_window)},
                                   {"controlled median filtered", "#bf1f1f",
                                    median_filter(ctrl_c1, config.filter_window)}},
                                  "C1 trend, baseline vs controlled", "C1 [px]"));
        log << fmt::format("evaluate: trend sigma baseline {:.2f}, controlled "
                           "{:.2f}, ratio {:.3f}\n",
                           result.baseline_sigma, result.controlled_sigma,
                           result.ratio);
        return exit_ok;
      });
}
} // namespace lpbf
