/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef LPBF_SCANPATH_HPP
#define LPBF_SCANPATH_HPP

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace lpbf
{
/// Half width of the square build envelope in mm.
inline constexpr double build_half_extent = 25.;

/// Two consecutive scan lines whose endpoints are closer than this are
/// continuous.
inline constexpr double jump_tolerance = 1e-6;

/// Largest perpendicular offset between antiparallel neighbouring lines that
/// still counts as a meander turnaround rather than a jump.
inline constexpr double turnaround_max_offset = 0.5;

struct Point2
{
  double x = 0.;
  double y = 0.;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2, Point2) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Point2 a, Point2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

/// Rotate \p p about the origin by \p angle_deg degrees.
Point2 rotate(Point2 p, double angle_deg);

/// Finite and inside the build envelope.
bool in_build_envelope(Point2 p);

/**
 * A single straight scan vector. The laser travels from start to end at
 * constant speed [mm/s] with constant power [W].
 */
struct ScanLine
{
  Point2 start;
  Point2 end;
  double power = 0.;
  double speed = 0.;

  double length() const { return distance(start, end); }
  /// Scan duration in seconds.
  double duration() const { return length() / speed; }

  friend bool operator==(ScanLine const &, ScanLine const &) = default;
};

/// Throws InvalidArgument if the line violates its invariants.
void validate(ScanLine const &line);

/**
 * An ordered layer scan program. The order of lines is the execution order.
 */
struct LayerScan
{
  std::vector<ScanLine> lines;
  int layer_id = 0;

  std::size_t size() const { return lines.size(); }
  bool empty() const { return lines.empty(); }
};

/**
 * Closed simple polygon; the edge from the last vertex back to the first one
 * is implicit.
 */
struct Polygon
{
  std::vector<Point2> vertices;
};

/// Signed area (positive for counter-clockwise vertex order).
double signed_area(Polygon const &poly);

/// True if no two non-adjacent edges intersect and no adjacent edges fold
/// back onto each other.
bool is_simple(Polygon const &poly);

/// Throws GeometryError unless the polygon has at least 3 vertices, nonzero
/// area, lies inside the build envelope and is simple.
void validate(Polygon const &poly);

/// Point-in-polygon test (even-odd rule).
bool contains(Polygon const &poly, Point2 p);

Polygon rotate(Polygon const &poly, double angle_deg);

/**
 * Parse a scan file: one `x0 y0 x1 y1 power speed` record per line, `#`
 * comments, blank lines ignored, LF or CRLF. A `# layer_id <n>` comment sets
 * the layer id. Throws ParseError with the 1-based line number.
 */
LayerScan parse_scanfile(std::string_view text);

/// Inverse of parse_scanfile. Fixed six decimals; throws GeometryError on an
/// empty scan.
std::string write_scanfile(LayerScan const &scan);

/**
 * Meander hatching of a simple polygon. Rows are perpendicular to the hatch
 * normal at offsets (k + 0.5) * hatch_spacing from the minimal extent of the
 * polygon along that normal. A row crossing the interior in several intervals
 * yields one line per interval; intervals are grouped into contiguous bands
 * that alternate direction, bands are chained by greedy nearest endpoint.
 */
LayerScan hatch_polygon(Polygon const &poly, double angle_deg,
                        double hatch_spacing, double power, double speed);

std::vector<double> line_lengths(LayerScan const &scan);

/**
 * Element n is true iff the laser repositions (laser off) before line n.
 * Line 0 is never preceded by a jump. A transition is continuous when the
 * endpoints coincide within jump_tolerance, or when line n + 1 is the
 * antiparallel neighbour of line n (overlapping projections, perpendicular
 * offset at most turnaround_max_offset), i.e. a meander turnaround.
 */
std::vector<bool> jump_flags(LayerScan const &scan);

std::vector<double> line_powers(LayerScan const &scan);
} // namespace lpbf

#endif
