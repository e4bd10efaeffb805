/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include <lpbf/error.hpp>
#include <lpbf/shapes.hpp>
#include <lpbf/textio.hpp>

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace lpbf::shapes
{
Polygon square(double side, Point2 origin)
{
  return Polygon{{origin,
                  {origin.x + side, origin.y},
                  {origin.x + side, origin.y + side},
                  {origin.x, origin.y + side}}};
}

Polygon centered_square(double side)
{
  return square(side, {-0.5 * side, -0.5 * side});
}

Polygon right_triangle(double leg)
{
  return Polygon{{{0., 0.}, {leg, 0.}, {0., leg}}};
}

Polygon star(double radius, double exponent, std::size_t samples)
{
  Polygon poly;
  poly.vertices.reserve(samples);
  auto signed_pow = [exponent](double v)
  { return std::copysign(std::pow(std::abs(v), exponent), v); };
  for (std::size_t i = 0; i < samples; ++i)
  {
    double const u = 2. * std::numbers::pi * static_cast<double>(i) /
                     static_cast<double>(samples);
    poly.vertices.push_back(
        {radius * signed_pow(std::cos(u)), radius * signed_pow(std::sin(u))});
  }
  return poly;
}

Polygon wave(double half_length, double neck_half_height,
             double outer_half_height, std::size_t samples_per_side)
{
  auto half_height = [&](double x)
  {
    double const w = 0.5 * (1. - std::cos(3. * std::numbers::pi * x / half_length));
    return neck_half_height + (outer_half_height - neck_half_height) * w;
  };
  Polygon poly;
  std::size_t const n = samples_per_side;
  // Bottom edge left to right, then top edge right to left.
  for (std::size_t i = 0; i <= n; ++i)
  {
    double const x = -half_length + 2. * half_length * static_cast<double>(i) /
                                        static_cast<double>(n);
    poly.vertices.push_back({x, -half_height(x)});
  }
  for (std::size_t i = 0; i <= n; ++i)
  {
    double const x = half_length - 2. * half_length * static_cast<double>(i) /
                                       static_cast<double>(n);
    poly.vertices.push_back({x, half_height(x)});
  }
  return poly;
}

Polygon parse_polygon(std::string_view text)
{
  Polygon poly;
  std::size_t line_no = 0;
  for (std::string_view raw : split_lines(text))
  {
    ++line_no;
    std::string_view const line = trim(raw);
    if (line.empty() || line.front() == '#')
      continue;
    auto const tokens = split_whitespace(line);
    if (tokens.size() != 2)
      throw ParseError(line_no, fmt::format("expected 2 fields, found {}",
                                            tokens.size()));
    auto const x = parse_double(tokens[0]);
    auto const y = parse_double(tokens[1]);
    if (!x || !y)
      throw ParseError(line_no, "vertex coordinate is not a number");
    poly.vertices.push_back({*x, *y});
  }
  return poly;
}

std::string write_polygon(Polygon const &poly)
{
  std::string out = "# x y [mm]\n";
  for (auto const &p : poly.vertices)
    out += fmt::format("{:.9f} {:.9f}\n", p.x, p.y);
  return out;
}

Polygon by_name(std::string_view name)
{
  if (name == "square")
    return square(5.);
  if (name == "cube")
    return centered_square(7.5);
  if (name == "triangle")
    return right_triangle(10.);
  if (name == "star")
    return star();
  if (name == "wave")
    return wave();
  throw InvalidArgument(fmt::format("unknown shape '{}'", name));
}
} // namespace lpbf::shapes
