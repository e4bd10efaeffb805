/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include <lpbf/error.hpp>
#include <lpbf/scanpath.hpp>
#include <lpbf/textio.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lpbf
{
namespace
{
double deg2rad(double angle_deg) { return angle_deg * std::numbers::pi / 180.; }

// Proper or touching intersection of segments [a, b] and [c, d].
bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d)
{
  auto orient = [](Point2 p, Point2 q, Point2 r) { return cross(q - p, r - p); };
  auto on_segment = [](Point2 p, Point2 q, Point2 r)
  {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
           std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
  };
  double const d1 = orient(c, d, a);
  double const d2 = orient(c, d, b);
  double const d3 = orient(a, b, c);
  double const d4 = orient(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(c, d, a))
    return true;
  if (d2 == 0 && on_segment(c, d, b))
    return true;
  if (d3 == 0 && on_segment(a, b, c))
    return true;
  if (d4 == 0 && on_segment(a, b, d))
    return true;
  return false;
}

// One interior interval of a hatch row, in hatch coordinates: s along the
// hatch normal, t along the hatch direction.
struct RowInterval
{
  std::size_t row;
  double s;
  double t0;
  double t1;
  bool visited = false;
};

bool overlaps(RowInterval const &a, RowInterval const &b)
{
  return std::max(a.t0, b.t0) < std::min(a.t1, b.t1);
}
} // namespace

Point2 rotate(Point2 p, double angle_deg)
{
  double const a = deg2rad(angle_deg);
  double const c = std::cos(a);
  double const s = std::sin(a);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

bool in_build_envelope(Point2 p)
{
  return std::isfinite(p.x) && std::isfinite(p.y) &&
         std::abs(p.x) <= build_half_extent &&
         std::abs(p.y) <= build_half_extent;
}

void validate(ScanLine const &line)
{
  if (!in_build_envelope(line.start) || !in_build_envelope(line.end))
    throw InvalidArgument("scan line endpoint outside the build envelope");
  if (!(line.length() > 0.))
    throw InvalidArgument("scan line has zero length");
  if (!(line.power >= 0.) || !std::isfinite(line.power))
    throw InvalidArgument("scan line power must be >= 0");
  if (!(line.speed > 0.) || !std::isfinite(line.speed))
    throw InvalidArgument("scan line speed must be > 0");
}

double signed_area(Polygon const &poly)
{
  auto const &v = poly.vertices;
  double area = 0.;
  for (std::size_t i = 0; i < v.size(); ++i)
    area += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * area;
}

bool is_simple(Polygon const &poly)
{
  auto const &v = poly.vertices;
  std::size_t const n = v.size();
  if (n < 3)
    return false;
  for (std::size_t i = 0; i < n; ++i)
  {
    Point2 const a = v[i];
    Point2 const b = v[(i + 1) % n];
    if (a == b)
      return false;
    for (std::size_t j = i + 1; j < n; ++j)
    {
      Point2 const c = v[j];
      Point2 const d = v[(j + 1) % n];
      bool const adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent)
      {
        // Adjacent edges share one vertex; they must not overlap collinearly
        // in opposite directions.
        Point2 const shared = (j == i + 1) ? b : a;
        Point2 const p = (j == i + 1) ? a : b;
        Point2 const q = (j == i + 1) ? d : c;
        if (cross(p - shared, q - shared) == 0. && dot(p - shared, q - shared) > 0.)
          return false;
        continue;
      }
      if (segments_intersect(a, b, c, d))
        return false;
    }
  }
  return true;
}

void validate(Polygon const &poly)
{
  if (poly.vertices.size() < 3)
    throw GeometryError("polygon needs at least 3 vertices");
  for (auto const &p : poly.vertices)
    if (!in_build_envelope(p))
      throw GeometryError(fmt::format(
          "polygon vertex ({}, {}) outside the build envelope", p.x, p.y));
  if (!(std::abs(signed_area(poly)) > 1e-12))
    throw GeometryError("polygon is degenerate (zero area)");
  if (!is_simple(poly))
    throw GeometryError("polygon is not simple");
}

bool contains(Polygon const &poly, Point2 p)
{
  auto const &v = poly.vertices;
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++)
  {
    if ((v[i].y > p.y) != (v[j].y > p.y))
    {
      double const x =
          v[j].x + (p.y - v[j].y) / (v[i].y - v[j].y) * (v[i].x - v[j].x);
      if (p.x < x)
        inside = !inside;
    }
  }
  return inside;
}

Polygon rotate(Polygon const &poly, double angle_deg)
{
  Polygon out;
  out.vertices.reserve(poly.vertices.size());
  for (auto const &p : poly.vertices)
    out.vertices.push_back(rotate(p, angle_deg));
  return out;
}

LayerScan parse_scanfile(std::string_view text)
{
  LayerScan scan;
  std::size_t line_no = 0;
  for (std::string_view raw : split_lines(text))
  {
    ++line_no;
    std::string_view const line = trim(raw);
    if (line.empty())
      continue;
    if (line.front() == '#')
    {
      auto const tokens = split_whitespace(line.substr(1));
      if (tokens.size() == 2 && tokens[0] == "layer_id")
      {
        auto const id = parse_int(tokens[1]);
        if (!id)
          throw ParseError(line_no, "invalid layer_id");
        scan.layer_id = *id;
      }
      continue;
    }
    auto const tokens = split_whitespace(line);
    if (tokens.size() != 6)
      throw ParseError(line_no, fmt::format("expected 6 fields, found {}",
                                            tokens.size()));
    double v[6];
    for (std::size_t i = 0; i < 6; ++i)
    {
      auto const x = parse_double(tokens[i]);
      if (!x)
        throw ParseError(line_no, fmt::format("field {} is not a number: '{}'",
                                              i + 1, tokens[i]));
      v[i] = *x;
    }
    ScanLine const sl{{v[0], v[1]}, {v[2], v[3]}, v[4], v[5]};
    try
    {
      validate(sl);
    }
    catch (InvalidArgument const &e)
    {
      throw ParseError(line_no, e.what());
    }
    scan.lines.push_back(sl);
  }
  if (scan.lines.empty())
    throw ParseError(0, "no scan lines");
  return scan;
}

std::string write_scanfile(LayerScan const &scan)
{
  if (scan.empty())
    throw GeometryError("refusing to write a layer without scan lines");
  std::string out = fmt::format("# layer_id {}\n# x0 y0 x1 y1 power speed\n",
                                scan.layer_id);
  for (auto const &l : scan.lines)
  {
    out += fmt::format("{} {} {} {} {} {}\n", format_fixed6(l.start.x),
                       format_fixed6(l.start.y), format_fixed6(l.end.x),
                       format_fixed6(l.end.y), format_fixed6(l.power),
                       format_fixed6(l.speed));
  }
  return out;
}

LayerScan hatch_polygon(Polygon const &poly, double angle_deg,
                        double hatch_spacing, double power, double speed)
{
  if (!(hatch_spacing > 0.) || !std::isfinite(hatch_spacing))
    throw InvalidArgument("hatch spacing must be > 0");
  if (!(power >= 0.) || !(speed > 0.))
    throw InvalidArgument("hatch power must be >= 0 and speed > 0");
  validate(poly);

  double const a = deg2rad(angle_deg);
  Point2 const dir{std::cos(a), std::sin(a)};
  Point2 const normal{-std::sin(a), std::cos(a)};

  auto const &v = poly.vertices;
  std::size_t const n = v.size();
  std::vector<double> s(n);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    s[i] = dot(v[i], normal);
    t[i] = dot(v[i], dir);
  }
  double const s_min = *std::min_element(s.begin(), s.end());
  double const s_max = *std::max_element(s.begin(), s.end());

  std::vector<RowInterval> intervals;
  std::vector<std::vector<std::size_t>> rows;
  std::vector<double> crossings;
  for (std::size_t k = 0;; ++k)
  {
    double const row_s = s_min + (static_cast<double>(k) + 0.5) * hatch_spacing;
    if (row_s >= s_max)
      break;
    crossings.clear();
    for (std::size_t i = 0; i < n; ++i)
    {
      std::size_t const j = (i + 1) % n;
      // Half-open rule: a vertex exactly on the row counts for one edge only.
      if ((s[i] > row_s) != (s[j] > row_s))
      {
        double const f = (row_s - s[i]) / (s[j] - s[i]);
        crossings.push_back(t[i] + f * (t[j] - t[i]));
      }
    }
    std::sort(crossings.begin(), crossings.end());
    auto &row = rows.emplace_back();
    for (std::size_t c = 0; c + 1 < crossings.size(); c += 2)
    {
      // Rows grazing a vertex give zero-length intervals.
      if (crossings[c + 1] - crossings[c] <= 1e-12)
        continue;
      row.push_back(intervals.size());
      intervals.push_back({k, row_s, crossings[c], crossings[c + 1]});
    }
  }
  if (intervals.empty())
    throw GeometryError("no hatch coverage: spacing exceeds polygon extent");

  auto to_xy = [&](double row_s, double row_t)
  { return row_s * normal + row_t * dir; };

  LayerScan scan;
  scan.lines.reserve(intervals.size());
  auto emit = [&](RowInterval &iv, bool forward)
  {
    iv.visited = true;
    Point2 const p0 = to_xy(iv.s, iv.t0);
    Point2 const p1 = to_xy(iv.s, iv.t1);
    scan.lines.push_back(forward ? ScanLine{p0, p1, power, speed}
                                 : ScanLine{p1, p0, power, speed});
  };

  auto unvisited_neighbour = [&](RowInterval const &iv, long row) -> bool
  {
    if (row < 0 || row >= static_cast<long>(rows.size()))
      return false;
    for (std::size_t idx : rows[row])
      if (!intervals[idx].visited && overlaps(intervals[idx], iv))
        return true;
    return false;
  };

  // First band starts at the lowest row, leftmost interval, running along
  // +dir.
  std::size_t current = 0;
  bool forward = true;
  long band_step = 1;
  std::size_t remaining = intervals.size();
  while (true)
  {
    emit(intervals[current], forward);
    --remaining;
    if (remaining == 0)
      break;
    RowInterval const &cur = intervals[current];
    double const cur_end_t = forward ? cur.t1 : cur.t0;

    // Meander continuation into the adjacent row of the same band.
    long const next_row = static_cast<long>(cur.row) + band_step;
    std::size_t best = intervals.size();
    double best_gap = std::numeric_limits<double>::infinity();
    if (next_row >= 0 && next_row < static_cast<long>(rows.size()))
    {
      for (std::size_t idx : rows[next_row])
      {
        RowInterval const &cand = intervals[idx];
        if (cand.visited || !overlaps(cand, cur))
          continue;
        double const gap = std::abs((forward ? cand.t1 : cand.t0) - cur_end_t);
        if (gap < best_gap)
        {
          best_gap = gap;
          best = idx;
        }
      }
    }
    if (best != intervals.size())
    {
      current = best;
      forward = !forward;
      continue;
    }

    // Band exhausted: jump to the nearest unvisited endpoint.
    Point2 const here = to_xy(cur.s, cur_end_t);
    double best_dist = std::numeric_limits<double>::infinity();
    bool best_forward = true;
    for (std::size_t idx = 0; idx < intervals.size(); ++idx)
    {
      RowInterval const &cand = intervals[idx];
      if (cand.visited)
        continue;
      double const d0 = distance(here, to_xy(cand.s, cand.t0));
      double const d1 = distance(here, to_xy(cand.s, cand.t1));
      if (d0 < best_dist)
      {
        best_dist = d0;
        best = idx;
        best_forward = true;
      }
      if (d1 < best_dist)
      {
        best_dist = d1;
        best = idx;
        best_forward = false;
      }
    }
    current = best;
    forward = best_forward;
    long const row = static_cast<long>(intervals[current].row);
    if (unvisited_neighbour(intervals[current], row + 1))
      band_step = 1;
    else if (unvisited_neighbour(intervals[current], row - 1))
      band_step = -1;
    else
      band_step = 1;
  }
  return scan;
}

std::vector<double> line_lengths(LayerScan const &scan)
{
  std::vector<double> out;
  out.reserve(scan.size());
  for (auto const &l : scan.lines)
    out.push_back(l.length());
  return out;
}

std::vector<double> line_powers(LayerScan const &scan)
{
  std::vector<double> out;
  out.reserve(scan.size());
  for (auto const &l : scan.lines)
    out.push_back(l.power);
  return out;
}

std::vector<bool> jump_flags(LayerScan const &scan)
{
  std::vector<bool> jumps(scan.size(), false);
  for (std::size_t i = 1; i < scan.size(); ++i)
  {
    ScanLine const &prev = scan.lines[i - 1];
    ScanLine const &cur = scan.lines[i];
    if (distance(prev.end, cur.start) <= jump_tolerance)
      continue;
    double const lp = prev.length();
    double const lc = cur.length();
    Point2 const u = (1. / lp) * (prev.end - prev.start);
    Point2 const w = (1. / lc) * (cur.end - cur.start);
    bool turnaround = false;
    if (dot(u, w) < -0.999)
    {
      double const offset = std::abs(cross(u, cur.start - prev.start));
      double const a = dot(u, cur.start - prev.start);
      double const b = dot(u, cur.end - prev.start);
      double const lo = std::max(0., std::min(a, b));
      double const hi = std::min(lp, std::max(a, b));
      turnaround = offset <= turnaround_max_offset && lo < hi;
    }
    jumps[i] = !turnaround;
  }
  return jumps;
}
} // namespace lpbf
