/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include <lpbf/error.hpp>
#include <lpbf/simulate.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lpbf
{
namespace
{
std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Pixel indices sorted by distance from the image centre, ties by row then
// column.
std::array<std::uint16_t, frame_pixels> const &fill_order()
{
  static auto const order = []
  {
    std::array<std::uint16_t, frame_pixels> idx{};
    for (std::size_t i = 0; i < frame_pixels; ++i)
      idx[i] = static_cast<std::uint16_t>(i);
    auto radius2 = [](std::size_t i)
    {
      double const c = 0.5 * (static_cast<double>(frame_side) - 1.);
      double const dr = static_cast<double>(i / frame_side) - c;
      double const dc = static_cast<double>(i % frame_side) - c;
      return dr * dr + dc * dc;
    };
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::uint16_t a, std::uint16_t b)
                     { return radius2(a) < radius2(b); });
    return idx;
  }();
  return order;
}

enum Stream : std::uint64_t
{
  footprint_stream = 1,
  hot_spot_stream = 2
};
} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t counter)
    : _state(splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter))
{
}

std::uint64_t CounterRng::next()
{
  _state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = _state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double CounterRng::uniform()
{
  return (static_cast<double>(next() >> 11) + 1.) * 0x1.0p-53;
}

double CounterRng::normal()
{
  double const u1 = uniform();
  double const u2 = uniform();
  return std::sqrt(-2. * std::log(u1)) * std::cos(2. * std::numbers::pi * u2);
}

SimOutput simulate_layer(LayerScan const &scan, PowerModel const &model,
                         NoiseConfig const &noise, SimOptions const &options)
{
  if (!(noise.sigma_c1 >= 0.) || !(noise.sigma_c100 >= 0.))
    throw InvalidArgument("noise sigmas must be >= 0");
  if (!(options.sample_rate > 0.))
    throw InvalidArgument("sample rate must be > 0");

  SimOutput out;
  out.truth_per_line =
      eval_dynamic(model, line_powers(scan), line_lengths(scan), jump_flags(scan));

  ScanTimeline const timeline(scan, options.jump_speed);
  // The small slack keeps a frame that lands on the final instant.
  auto const count = static_cast<std::size_t>(
      std::floor(timeline.duration() * options.sample_rate * (1. + 1e-12))) + 1;
  std::vector<RawSample> raw(count);
  for (std::size_t i = 0; i < count; ++i)
    raw[i].t = options.t0 + static_cast<double>(i) / options.sample_rate;

  out.samples = map_to_positions(raw, scan, options.t0,
                                 MappingConfig{options.jump_speed, min_line_length});
  for (std::size_t i = 0; i < out.samples.size(); ++i)
  {
    SignalSample &s = out.samples[i];
    if (!s.line_index)
    {
      s.c1 = 0;
      s.c100 = 0;
      continue;
    }
    auto const line = static_cast<std::uint64_t>(*s.line_index);
    double const truth = out.truth_per_line[*s.line_index];
    CounterRng rng_c1(noise.seed, (line << 2) | footprint_stream, i);
    CounterRng rng_c100(noise.seed, (line << 2) | hot_spot_stream, i);
    double const c1 = std::round(truth + noise.sigma_c1 * rng_c1.normal());
    s.c1 = static_cast<int>(std::clamp(c1, 0., static_cast<double>(frame_pixels)));
    double const c100 = std::round(hot_spot_fraction * truth +
                                   noise.sigma_c100 * rng_c100.normal());
    s.c100 = static_cast<int>(std::clamp(c100, 0., static_cast<double>(s.c1)));
  }
  return out;
}

CoaxFrame render_frame(int c1_target, int c100_target)
{
  if (c100_target < 0 || c100_target > c1_target ||
      c1_target > static_cast<int>(frame_pixels))
    throw InvalidArgument(fmt::format(
        "infeasible frame targets c1={} c100={}", c1_target, c100_target));
  CoaxFrame frame;
  auto const &order = fill_order();
  int const dim = c1_target - c100_target;
  for (int k = 0; k < c100_target; ++k)
    frame.pixels[order[k]] =
        static_cast<std::uint8_t>(255 - (155 * k) / std::max(c100_target, 1));
  for (int k = 0; k < dim; ++k)
    frame.pixels[order[c100_target + k]] =
        static_cast<std::uint8_t>(99 - (98 * k) / std::max(dim, 1));
  return frame;
}

std::vector<CoaxFrame> render_frames(std::vector<SignalSample> const &samples)
{
  std::vector<CoaxFrame> frames;
  frames.reserve(samples.size());
  for (auto const &s : samples)
  {
    frames.push_back(render_frame(s.c1, s.c100));
    frames.back().timestamp = s.t;
  }
  return frames;
}
} // namespace lpbf
