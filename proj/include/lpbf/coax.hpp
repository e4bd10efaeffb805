/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef LPBF_COAX_HPP
#define LPBF_COAX_HPP

#include <lpbf/scanpath.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lpbf
{
inline constexpr std::size_t frame_side = 64;
inline constexpr std::size_t frame_pixels = frame_side * frame_side;

/// Footprint and hot spot thresholds.
inline constexpr int alpha_footprint = 1;
inline constexpr int alpha_hot_spot = 100;

/// Camera frame rate [Hz].
inline constexpr double default_sample_rate = 2000.;
/// Repositioning speed used for the time base of jumps [mm/s].
inline constexpr double default_jump_speed = 5000.;
/// Samples on lines shorter than this [mm] are excluded from identification.
inline constexpr double min_line_length = 0.5;

/**
 * One 64x64 8-bit coaxial melt pool image, stored row-major.
 */
struct CoaxFrame
{
  std::array<std::uint8_t, frame_pixels> pixels{};
  double timestamp = 0.;

  std::uint8_t operator()(std::size_t row, std::size_t col) const
  {
    return pixels[row * frame_side + col];
  }
  std::uint8_t &operator()(std::size_t row, std::size_t col)
  {
    return pixels[row * frame_side + col];
  }
};

/// Number of pixels with intensity >= alpha. Throws InvalidArgument unless
/// 1 <= alpha <= 255.
int c_alpha(CoaxFrame const &frame, int alpha);

/// Camera-side reduction of a frame before it is placed on the scan.
struct RawSample
{
  double t = 0.;
  int c1 = 0;
  int c100 = 0;
};

RawSample reduce_frame(CoaxFrame const &frame);

/**
 * A reduced frame mapped onto the nominal scan. Samples taken while the laser
 * jumps have no line index; samples on lines shorter than min_line_length
 * keep their line index but are invalid.
 */
struct SignalSample
{
  double t = 0.;
  int c1 = 0;
  int c100 = 0;
  Point2 pos;
  std::optional<int> line_index;
  bool valid = false;
};

struct MappingConfig
{
  double jump_speed = default_jump_speed;
  double min_line_length = lpbf::min_line_length;
};

/**
 * Nominal timing of a scan program: every line is traversed at its own speed,
 * every jump at the jump speed, meander turnarounds take no time.
 */
class ScanTimeline
{
public:
  struct Segment
  {
    double t_begin;
    double t_end;
    Point2 from;
    Point2 to;
    /// Line index, or nullopt for a jump.
    std::optional<int> line;
  };

  ScanTimeline(LayerScan const &scan, double jump_speed);

  /// Time from the start of the first line to the end of the last one [s].
  double duration() const { return _segments.back().t_end; }
  std::vector<Segment> const &segments() const { return _segments; }

  /// Segment containing \p tau (time since start); half-open except for the
  /// final segment.
  std::size_t locate(double tau, std::size_t hint = 0) const;

private:
  std::vector<Segment> _segments;
};

/**
 * Place time stamped samples on the nominal scan starting at t0. Throws
 * InvalidArgument if timestamps decrease or if any sample lies outside
 * [t0, t0 + duration].
 */
std::vector<SignalSample> map_to_positions(std::span<RawSample const> samples,
                                           LayerScan const &scan, double t0,
                                           MappingConfig const &config = {});

struct LineAggregate
{
  int line = 0;
  double mean_c1 = 0.;
  std::size_t count = 0;

  friend bool operator==(LineAggregate const &, LineAggregate const &) = default;
};

/// Mean C1 per line over valid samples, ordered by line index.
std::vector<LineAggregate> per_line_aggregate(std::span<SignalSample const> samples);

/// Signal CSV with header `t,c1,c100,x,y,line,valid`.
std::string write_signal_csv(std::span<SignalSample const> samples);
std::vector<SignalSample> parse_signal_csv(std::string_view text);

/// Binary frame container: "MLTF", uint32 little-endian frame count, then
/// 4096 bytes per frame, row-major. Timestamps are not stored.
std::string write_frames(std::span<CoaxFrame const> frames);
std::vector<CoaxFrame> parse_frames(std::string_view bytes);

/// Sidecar CSV with header `frame,t`.
std::string write_frame_times_csv(std::span<CoaxFrame const> frames);
void apply_frame_times_csv(std::string_view text, std::span<CoaxFrame> frames);
} // namespace lpbf

#endif
