/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef LPBF_SIMULATE_HPP
#define LPBF_SIMULATE_HPP

#include <lpbf/coax.hpp>
#include <lpbf/meltmodel.hpp>
#include <lpbf/scanpath.hpp>

#include <cstdint>
#include <vector>

namespace lpbf
{
/// Ratio of the mean hot spot area to the footprint area in synthetic data.
inline constexpr double hot_spot_fraction = 0.03;

struct NoiseConfig
{
  double sigma_c1 = 175.;
  double sigma_c100 = 5.;
  std::uint64_t seed = 0;
};

/**
 * Counter based generator: SplitMix64 finalizer applied to a key derived
 * from (seed, stream, counter). Every (line, sample) pair owns an independent
 * stream, so draws do not depend on evaluation order.
 */
class CounterRng
{
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

  std::uint64_t next();
  /// Uniform in (0, 1].
  double uniform();
  /// Standard normal (Box-Muller).
  double normal();

private:
  std::uint64_t _state;
};

struct SimOutput
{
  std::vector<SignalSample> samples;
  /// Noiseless C1 per scan line.
  std::vector<double> truth_per_line;
};

struct SimOptions
{
  double sample_rate = default_sample_rate;
  double t0 = 0.;
  double jump_speed = default_jump_speed;
};

/**
 * Synthetic coaxial signal for one layer. Every frame on line n reports the
 * line's eval_dynamic value plus Gaussian noise, rounded and clamped to
 * [0, 4096]; the hot spot count is clamped to [0, c1]. Frames taken during a
 * jump see no emission. Frames are taken at t0 + i / sample_rate up to the
 * end of the scan program.
 */
SimOutput simulate_layer(LayerScan const &scan, PowerModel const &model,
                         NoiseConfig const &noise, SimOptions const &options = {});

/**
 * Frame with exactly c1_target pixels >= 1 and c100_target pixels >= 100,
 * filled as concentric disks around the image centre. Throws InvalidArgument
 * unless 0 <= c100_target <= c1_target <= 4096.
 */
CoaxFrame render_frame(int c1_target, int c100_target);

/// Frames for every simulated sample, stamped with the sample time.
std::vector<CoaxFrame> render_frames(std::vector<SignalSample> const &samples);
} // namespace lpbf

#endif
