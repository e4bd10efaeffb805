/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef LPBF_SHAPES_HPP
#define LPBF_SHAPES_HPP

#include <lpbf/scanpath.hpp>

#include <string>
#include <string_view>

// Test part cross-sections and the polygon text format.
namespace lpbf::shapes
{
/// Axis-aligned square with lower-left corner at \p origin.
Polygon square(double side, Point2 origin = {0., 0.});

/// Square centred on the origin.
Polygon centered_square(double side);

/// Right triangle with the right angle at the origin and legs along +x, +y.
Polygon right_triangle(double leg);

/**
 * Four-pointed star with concave curved sides, sampled from
 * (R sgn(cos u)|cos u|^e, R sgn(sin u)|sin u|^e). The sample count is a
 * multiple of 4 so the vertex set is invariant under 90 degree rotation.
 */
Polygon star(double radius = 7., double exponent = 2.5,
             std::size_t samples = 240);

/**
 * Band with a cosine profile along x: the half height swings between
 * \p outer_half_height (at both ends and x = +-L/3) and \p neck_half_height
 * (at x = 0 and x = +-2L/3), L the half length.
 */
Polygon wave(double half_length = 9., double neck_half_height = 0.8,
             double outer_half_height = 4., std::size_t samples_per_side = 60);

/// One `x y` vertex per line in mm; `#` comments and blank lines ignored.
Polygon parse_polygon(std::string_view text);
std::string write_polygon(Polygon const &poly);

/// Build a named fixture: square, cube, triangle, star, wave.
Polygon by_name(std::string_view name);
} // namespace lpbf::shapes

#endif
