/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include <lpbf/coax.hpp>
#include <lpbf/error.hpp>
#include <lpbf/textio.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <map>

namespace lpbf
{
namespace
{
constexpr std::string_view signal_header = "t,c1,c100,x,y,line,valid";
constexpr std::string_view frame_magic = "MLTF";
constexpr double time_slack = 1e-9;
} // namespace

int c_alpha(CoaxFrame const &frame, int alpha)
{
  if (alpha < 1 || alpha > 255)
    throw InvalidArgument(fmt::format("threshold {} outside [1, 255]", alpha));
  auto const threshold = static_cast<std::uint8_t>(alpha);
  return static_cast<int>(std::count_if(frame.pixels.begin(), frame.pixels.end(),
                                        [threshold](std::uint8_t v)
                                        { return v >= threshold; }));
}

RawSample reduce_frame(CoaxFrame const &frame)
{
  return {frame.timestamp, c_alpha(frame, alpha_footprint),
          c_alpha(frame, alpha_hot_spot)};
}

ScanTimeline::ScanTimeline(LayerScan const &scan, double jump_speed)
{
  if (scan.empty())
    throw GeometryError("scan has no lines");
  if (!(jump_speed > 0.))
    throw InvalidArgument("jump speed must be > 0");
  auto const jumps = jump_flags(scan);
  double t = 0.;
  for (std::size_t n = 0; n < scan.size(); ++n)
  {
    ScanLine const &line = scan.lines[n];
    if (jumps[n])
    {
      Point2 const from = scan.lines[n - 1].end;
      double const dt = distance(from, line.start) / jump_speed;
      _segments.push_back({t, t + dt, from, line.start, std::nullopt});
      t += dt;
    }
    double const dt = line.duration();
    _segments.push_back({t, t + dt, line.start, line.end, static_cast<int>(n)});
    t += dt;
  }
}

std::size_t ScanTimeline::locate(double tau, std::size_t hint) const
{
  std::size_t i = std::min(hint, _segments.size() - 1);
  if (_segments[i].t_begin > tau)
    i = 0;
  while (i + 1 < _segments.size() && tau >= _segments[i].t_end)
    ++i;
  return i;
}

std::vector<SignalSample> map_to_positions(std::span<RawSample const> samples,
                                           LayerScan const &scan, double t0,
                                           MappingConfig const &config)
{
  ScanTimeline const timeline(scan, config.jump_speed);
  double const duration = timeline.duration();

  std::vector<SignalSample> out;
  out.reserve(samples.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < samples.size(); ++i)
  {
    RawSample const &raw = samples[i];
    if (i > 0 && raw.t < samples[i - 1].t)
      throw InvalidArgument(fmt::format("timestamp of sample {} decreases", i));
    double tau = raw.t - t0;
    if (tau < -time_slack)
      throw InvalidArgument(
          fmt::format("sample {} at t={} precedes the scan start", i, raw.t));
    if (tau > duration + time_slack)
      throw InvalidArgument(fmt::format(
          "sample {} at t={} overruns the scan program by {} s", i, raw.t,
          tau - duration));
    tau = std::clamp(tau, 0., duration);
    seg = timeline.locate(tau, seg);
    auto const &s = timeline.segments()[seg];

    SignalSample mapped;
    mapped.t = raw.t;
    mapped.c1 = raw.c1;
    mapped.c100 = raw.c100;
    double const span = s.t_end - s.t_begin;
    double const f = span > 0. ? std::clamp((tau - s.t_begin) / span, 0., 1.) : 0.;
    mapped.pos = s.from + f * (s.to - s.from);
    mapped.line_index = s.line;
    if (s.line)
    {
      double const len = scan.lines[*s.line].length();
      mapped.valid = len >= config.min_line_length;
      // Exact arc length from the line start at the line speed.
      ScanLine const &line = scan.lines[*s.line];
      double const along = (tau - s.t_begin) * line.speed;
      mapped.pos = line.start + (std::min(along, len) / len) * (line.end - line.start);
    }
    out.push_back(mapped);
  }
  return out;
}

std::vector<LineAggregate> per_line_aggregate(std::span<SignalSample const> samples)
{
  std::map<int, std::pair<double, std::size_t>> acc;
  for (auto const &s : samples)
  {
    if (!s.valid || !s.line_index)
      continue;
    auto &[sum, count] = acc[*s.line_index];
    sum += s.c1;
    ++count;
  }
  std::vector<LineAggregate> out;
  out.reserve(acc.size());
  for (auto const &[line, sc] : acc)
    out.push_back({line, sc.first / static_cast<double>(sc.second), sc.second});
  return out;
}

std::string write_signal_csv(std::span<SignalSample const> samples)
{
  std::string out(signal_header);
  out += '\n';
  for (auto const &s : samples)
  {
    out += fmt::format("{:.9f},{},{},{},{},{},{}\n", s.t, s.c1, s.c100,
                       format_fixed6(s.pos.x), format_fixed6(s.pos.y),
                       s.line_index ? std::to_string(*s.line_index) : std::string(),
                       s.valid ? 1 : 0);
  }
  return out;
}

std::vector<SignalSample> parse_signal_csv(std::string_view text)
{
  auto const lines = split_lines(text);
  if (lines.empty() || trim(lines.front()) != signal_header)
    throw ParseError(1, fmt::format("expected header '{}'", signal_header));
  std::vector<SignalSample> out;
  for (std::size_t i = 1; i < lines.size(); ++i)
  {
    std::string_view const line = trim(lines[i]);
    if (line.empty())
      continue;
    auto const f = split_char(line, ',');
    if (f.size() != 7)
      throw ParseError(i + 1, fmt::format("expected 7 fields, found {}", f.size()));
    SignalSample s;
    auto const t = parse_double(f[0]);
    auto const c1 = parse_int(f[1]);
    auto const c100 = parse_int(f[2]);
    auto const x = parse_double(f[3]);
    auto const y = parse_double(f[4]);
    auto const valid = parse_int(f[6]);
    if (!t || !c1 || !c100 || !x || !y || !valid || (*valid != 0 && *valid != 1))
      throw ParseError(i + 1, "malformed signal record");
    if (*c1 < 0 || *c1 > static_cast<int>(frame_pixels) || *c100 < 0 ||
        *c100 > *c1)
      throw ParseError(i + 1, "pixel counts violate 0 <= c100 <= c1 <= 4096");
    s.t = *t;
    s.c1 = *c1;
    s.c100 = *c100;
    s.pos = {*x, *y};
    if (!trim(f[5]).empty())
    {
      auto const idx = parse_int(trim(f[5]));
      if (!idx || *idx < 0)
        throw ParseError(i + 1, "malformed line index");
      s.line_index = *idx;
    }
    s.valid = *valid == 1;
    out.push_back(s);
  }
  return out;
}

std::string write_frames(std::span<CoaxFrame const> frames)
{
  std::string out(frame_magic);
  auto const count = static_cast<std::uint32_t>(frames.size());
  for (int b = 0; b < 4; ++b)
    out += static_cast<char>((count >> (8 * b)) & 0xffu);
  out.reserve(out.size() + frames.size() * frame_pixels);
  for (auto const &f : frames)
    out.append(reinterpret_cast<char const *>(f.pixels.data()), frame_pixels);
  return out;
}

std::vector<CoaxFrame> parse_frames(std::string_view bytes)
{
  if (bytes.size() < 8 || bytes.substr(0, 4) != frame_magic)
    throw ParseError(0, "not a frame file (missing MLTF header)");
  std::uint32_t count = 0;
  for (int b = 0; b < 4; ++b)
    count |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 + b]))
             << (8 * b);
  if (bytes.size() != 8 + static_cast<std::size_t>(count) * frame_pixels)
    throw ParseError(0, fmt::format("frame file size does not match {} frames",
                                    count));
  std::vector<CoaxFrame> frames(count);
  for (std::uint32_t i = 0; i < count; ++i)
    std::copy_n(bytes.data() + 8 + static_cast<std::size_t>(i) * frame_pixels,
                frame_pixels,
                reinterpret_cast<char *>(frames[i].pixels.data()));
  return frames;
}

std::string write_frame_times_csv(std::span<CoaxFrame const> frames)
{
  std::string out = "frame,t\n";
  for (std::size_t i = 0; i < frames.size(); ++i)
    out += fmt::format("{},{:.9f}\n", i, frames[i].timestamp);
  return out;
}

void apply_frame_times_csv(std::string_view text, std::span<CoaxFrame> frames)
{
  auto const lines = split_lines(text);
  if (lines.empty() || trim(lines.front()) != "frame,t")
    throw ParseError(1, "expected header 'frame,t'");
  std::size_t seen = 0;
  for (std::size_t i = 1; i < lines.size(); ++i)
  {
    std::string_view const line = trim(lines[i]);
    if (line.empty())
      continue;
    auto const f = split_char(line, ',');
    if (f.size() != 2)
      throw ParseError(i + 1, "expected 2 fields");
    auto const idx = parse_int(f[0]);
    auto const t = parse_double(f[1]);
    if (!idx || !t || *idx < 0 || static_cast<std::size_t>(*idx) >= frames.size())
      throw ParseError(i + 1, "malformed frame time record");
    frames[*idx].timestamp = *t;
    ++seen;
  }
  if (seen != frames.size())
    throw ParseError(0, fmt::format("{} timestamps for {} frames", seen,
                                    frames.size()));
}
} // namespace lpbf
