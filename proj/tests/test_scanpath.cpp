/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "support.hpp"

#include <lpbf/scanpath.hpp>
#include <lpbf/shapes.hpp>
#include <lpbf/textio.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace lpbf;

namespace
{
Point2 direction(ScanLine const &l)
{
  return (1. / l.length()) * (l.end - l.start);
}

std::vector<Polygon> fixtures()
{
  return {shapes::by_name("square"), shapes::by_name("cube"),
          shapes::by_name("triangle"), shapes::by_name("star"),
          shapes::by_name("wave")};
}
} // namespace

TEST_CASE("parse a single record")
{
  auto const scan = parse_scanfile("0 0 5 0 225 800\n");
  REQUIRE(scan.size() == 1);
  CHECK(scan.lines[0].start == Point2{0., 0.});
  CHECK(scan.lines[0].end == Point2{5., 0.});
  CHECK(scan.lines[0].power == 225.);
  CHECK(scan.lines[0].speed == 800.);
}

TEST_CASE("parse keeps record order, comments, CRLF")
{
  auto const scan =
      parse_scanfile("# layer_id 3\r\n0 0 5 0 225 800\r\n\r\n5 0.09 0 0.09 150.5 800\r\n");
  REQUIRE(scan.size() == 2);
  CHECK(scan.lines[1].start == Point2{5., 0.09});
  CHECK(scan.lines[1].power == 150.5);
  CHECK(scan.layer_id == 3);
}

TEST_CASE("parse errors carry the record line")
{
  try
  {
    parse_scanfile("0 0 5 0 225\n");
    FAIL("expected ParseError");
  }
  catch (ParseError const &e)
  {
    CHECK(e.line() == 1);
  }
  try
  {
    parse_scanfile("# c\n0 0 5 0 225 800\n0 0 x 0 225 800\n");
    FAIL("expected ParseError");
  }
  catch (ParseError const &e)
  {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_WITH_AS(parse_scanfile(""), doctest::Contains("no scan lines"),
                       ParseError);
  CHECK_THROWS_AS(parse_scanfile("0 0 0 0 200 800\n"), ParseError);
}

TEST_CASE("write one record with six fields")
{
  LayerScan s;
  s.lines.push_back({{0., 0.}, {5., 0.}, 225., 800.});
  auto const text = write_scanfile(s);
  std::size_t records = 0;
  for (auto line : split_lines(text))
  {
    if (line.empty() || line.front() == '#')
      continue;
    ++records;
    CHECK(split_whitespace(line).size() == 6);
  }
  CHECK(records == 1);
  CHECK_THROWS_AS(write_scanfile(LayerScan{}), GeometryError);
}

TEST_CASE("write keeps jumps implicit")
{
  LayerScan s;
  s.lines.push_back({{0., 0.}, {5., 0.}, 200., 800.});
  s.lines.push_back({{10., 3.}, {12., 3.}, 200., 800.});
  auto const back = parse_scanfile(write_scanfile(s));
  REQUIRE(back.size() == 2);
  CHECK(jump_flags(back) == std::vector<bool>{false, true});
}

TEST_CASE("round trip on random scans")
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-24.9, 24.9), power(0., 400.),
      speed(10., 3000.);
  for (int trial = 0; trial < 50; ++trial)
  {
    LayerScan s;
    s.layer_id = trial;
    for (int i = 0; i < 20; ++i)
      s.lines.push_back({{coord(rng), coord(rng)}, {coord(rng), coord(rng)},
                         power(rng), speed(rng)});
    auto const back = parse_scanfile(write_scanfile(s));
    REQUIRE(back.size() == s.size());
    CHECK(back.layer_id == s.layer_id);
    for (std::size_t i = 0; i < s.size(); ++i)
    {
      CHECK(std::abs(back.lines[i].start.x - s.lines[i].start.x) <= 1e-6);
      CHECK(std::abs(back.lines[i].start.y - s.lines[i].start.y) <= 1e-6);
      CHECK(std::abs(back.lines[i].end.x - s.lines[i].end.x) <= 1e-6);
      CHECK(std::abs(back.lines[i].end.y - s.lines[i].end.y) <= 1e-6);
      CHECK(std::abs(back.lines[i].power - s.lines[i].power) <= 1e-6);
    }
  }
}

TEST_CASE("line lengths")
{
  LayerScan s;
  s.lines.push_back({{0., 0.}, {3., 4.}, 200., 800.});
  s.lines.push_back({{1., 1.}, {1., 1.4}, 200., 800.});
  auto const l = line_lengths(s);
  CHECK(l[0] == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(l[1] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(line_lengths(LayerScan{}).empty());
}

TEST_CASE("square at 0 degrees gives 56 alternating rows")
{
  auto const scan = hatch_polygon(shapes::square(5.), 0., 0.09, 200., 800.);
  // Row oracle: offsets (k + 0.5) * spacing while inside the 5 mm extent.
  std::vector<double> rows;
  for (int k = 0; (k + 0.5) * 0.09 < 5.; ++k)
    rows.push_back((k + 0.5) * 0.09);
  REQUIRE(rows.size() == 56);
  REQUIRE(scan.size() == rows.size());
  for (std::size_t i = 0; i < scan.size(); ++i)
  {
    auto const &l = scan.lines[i];
    CHECK(l.length() == doctest::Approx(5.).epsilon(1e-12));
    CHECK(l.start.y == doctest::Approx(rows[i]).epsilon(1e-12));
    CHECK(l.end.y == doctest::Approx(rows[i]).epsilon(1e-12));
    if (i > 0)
      CHECK(dot(direction(l), direction(scan.lines[i - 1])) < -0.999999);
  }
  auto const j = jump_flags(scan);
  CHECK(std::count(j.begin(), j.end(), true) == 0);
}

TEST_CASE("square at 90 degrees has the same length multiset")
{
  auto const a = hatch_polygon(shapes::square(5.), 0., 0.09, 200., 800.);
  auto const b = hatch_polygon(shapes::square(5.), 90., 0.09, 200., 800.);
  auto la = line_lengths(a), lb = line_lengths(b);
  REQUIRE(la.size() == lb.size());
  std::sort(la.begin(), la.end());
  std::sort(lb.begin(), lb.end());
  for (std::size_t i = 0; i < la.size(); ++i)
    CHECK(la[i] == doctest::Approx(lb[i]).epsilon(1e-12));
  for (auto const &l : b.lines)
    CHECK(std::abs(l.end.x - l.start.x) < 1e-12);
}

TEST_CASE("triangle lines shrink toward the apex")
{
  auto const scan = hatch_polygon(shapes::right_triangle(10.), 0., 0.09, 225., 800.);
  auto const l = line_lengths(scan);
  REQUIRE(l.size() == 111);
  for (std::size_t i = 0; i < l.size(); ++i)
  {
    // Row y = (i + 0.5) h meets the hypotenuse x + y = 10.
    CHECK(l[i] == doctest::Approx(10. - (i + 0.5) * 0.09).epsilon(1e-12));
    if (i > 0)
      CHECK(l[i] < l[i - 1]);
  }
}

TEST_CASE("hatch errors")
{
  Polygon const flat{{{0., 0.}, {1., 0.}, {2., 0.}}};
  CHECK_THROWS_AS(hatch_polygon(flat, 0., 0.09, 200., 800.), GeometryError);
  CHECK_THROWS_WITH_AS(hatch_polygon(shapes::square(0.05), 0., 0.2, 200., 800.),
                       doctest::Contains("no hatch coverage"), GeometryError);
  CHECK_THROWS_AS(hatch_polygon(shapes::square(5.), 0., 0., 200., 800.),
                  InvalidArgument);
  Polygon const bowtie{{{0., 0.}, {2., 2.}, {2., 0.}, {0., 2.}}};
  CHECK_THROWS_AS(hatch_polygon(bowtie, 0., 0.09, 200., 800.), GeometryError);
}

TEST_CASE("non-convex wave splits rows into regions")
{
  auto const scan = hatch_polygon(shapes::wave(), 45., 0.09, 200., 800.);
  auto const j = jump_flags(scan);
  CHECK(std::count(j.begin(), j.end(), true) >= 1);
}

TEST_CASE("property: segments lie inside with endpoints on the boundary")
{
  for (auto const &poly : fixtures())
    for (double angle : {0., 17., 45., 90., 133.})
    {
      auto const scan = hatch_polygon(poly, angle, 0.09, 200., 800.);
      for (auto const &l : scan.lines)
      {
        CHECK(test::boundary_distance(poly, l.start) <= 1e-9);
        CHECK(test::boundary_distance(poly, l.end) <= 1e-9);
        CHECK(test::inside(poly, 0.5 * (l.start + l.end)));
      }
    }
}

TEST_CASE("property: exact spacing and meander within bands")
{
  for (auto const &poly : fixtures())
    for (double angle : {0., 30., 45., 90., 161.})
    {
      double const t = angle * std::numbers::pi / 180.;
      Point2 const normal{-std::sin(t), std::cos(t)};
      auto const scan = hatch_polygon(poly, angle, 0.09, 200., 800.);
      auto const jumps = jump_flags(scan);
      for (std::size_t i = 1; i < scan.size(); ++i)
      {
        if (jumps[i])
          continue;
        auto const &a = scan.lines[i - 1];
        auto const &b = scan.lines[i];
        double const gap = std::abs(dot(b.start, normal) - dot(a.start, normal));
        CHECK(std::abs(gap - 0.09) <= 1e-9);
        CHECK(dot(direction(a), direction(b)) < 0.);
      }
    }
}

TEST_CASE("property: Monte-Carlo coverage of at least 99 percent")
{
  std::uint64_t seed = 1;
  for (auto const &poly : fixtures())
    for (double angle : {0., 45., 100.})
    {
      auto const scan = hatch_polygon(poly, angle, 0.09, 200., 800.);
      CHECK(test::hatch_coverage(poly, scan, 0.09, 100000, seed++) >= 0.99);
    }
}

TEST_CASE("property: rotation equivariance")
{
  for (auto const &poly : fixtures())
    for (double angle : {0., 45., 70.})
      for (double theta : {13., 90., 200.})
      {
        auto const a = hatch_polygon(rotate(poly, theta), angle + theta, 0.09, 200., 800.);
        auto const b = hatch_polygon(poly, angle, 0.09, 200., 800.);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i)
        {
          CHECK(distance(a.lines[i].start, rotate(b.lines[i].start, theta)) <= 1e-9);
          CHECK(distance(a.lines[i].end, rotate(b.lines[i].end, theta)) <= 1e-9);
        }
      }
}

TEST_CASE("polygon file round trip")
{
  auto const star = shapes::star();
  auto const back = shapes::parse_polygon(shapes::write_polygon(star));
  REQUIRE(back.vertices.size() == star.vertices.size());
  for (std::size_t i = 0; i < star.vertices.size(); ++i)
    CHECK(distance(back.vertices[i], star.vertices[i]) <= 1e-6);
  CHECK_THROWS_AS(shapes::parse_polygon("0 0\n1\n"), ParseError);
}
