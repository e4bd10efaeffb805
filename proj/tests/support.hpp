/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

// Independent oracles and fixtures shared by the test suites and the
// acceptance runner. Nothing here calls into the code it checks.

#ifndef LPBF_TESTS_SUPPORT_HPP
#define LPBF_TESTS_SUPPORT_HPP

#include <lpbf/coax.hpp>
#include <lpbf/ffcontrol.hpp>
#include <lpbf/meltmodel.hpp>
#include <lpbf/pipeline.hpp>
#include <lpbf/scanpath.hpp>
#include <lpbf/shapes.hpp>
#include <lpbf/simulate.hpp>
#include <lpbf/textio.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <limits>
#include <random>
#include <vector>

namespace lpbf::test
{
inline int brute_count(CoaxFrame const &frame, int alpha)
{
  int n = 0;
  for (std::size_t r = 0; r < frame_side; ++r)
    for (std::size_t c = 0; c < frame_side; ++c)
      if (frame(r, c) >= alpha)
        ++n;
  return n;
}

inline CoaxFrame random_frame(std::mt19937_64 &rng)
{
  CoaxFrame f;
  // Mix sparse, dense and uniform frames so both thresholds see edge cases.
  int const kind = static_cast<int>(rng() % 3);
  for (auto &px : f.pixels)
  {
    auto const u = rng();
    if (kind == 0)
      px = static_cast<std::uint8_t>(u % 256);
    else if (kind == 1)
      px = (u % 7 == 0) ? static_cast<std::uint8_t>(u % 256) : 0;
    else
      px = static_cast<std::uint8_t>(95 + u % 11);
  }
  return f;
}

inline double segment_distance(Point2 p, Point2 a, Point2 b)
{
  Point2 const d = b - a;
  double const len2 = dot(d, d);
  double t = len2 > 0. ? dot(p - a, d) / len2 : 0.;
  t = std::clamp(t, 0., 1.);
  return distance(p, a + t * d);
}

inline double boundary_distance(Polygon const &poly, Point2 p)
{
  double best = std::numeric_limits<double>::infinity();
  auto const &v = poly.vertices;
  for (std::size_t i = 0; i < v.size(); ++i)
    best = std::min(best, segment_distance(p, v[i], v[(i + 1) % v.size()]));
  return best;
}

/// Even-odd ray casting, written independently of scanpath::contains.
inline bool inside(Polygon const &poly, Point2 p)
{
  bool in = false;
  auto const &v = poly.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++)
    if ((v[i].y > p.y) != (v[j].y > p.y) &&
        p.x < (v[j].x - v[i].x) * (p.y - v[i].y) / (v[j].y - v[i].y) + v[i].x)
      in = !in;
  return in;
}

/// Fraction of Monte-Carlo points inside \p poly that lie within
/// spacing / 2 of some hatch line.
inline double hatch_coverage(Polygon const &poly, LayerScan const &scan,
                             double spacing, int points, std::uint64_t seed)
{
  double xmin = 1e9, xmax = -1e9, ymin = 1e9, ymax = -1e9;
  for (auto const &p : poly.vertices)
  {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(xmin, xmax), uy(ymin, ymax);
  int hit = 0, total = 0;
  while (total < points)
  {
    Point2 const p{ux(rng), uy(rng)};
    if (!inside(poly, p))
      continue;
    ++total;
    for (auto const &l : scan.lines)
      if (segment_distance(p, l.start, l.end) <= 0.5 * spacing + 1e-12)
      {
        ++hit;
        break;
      }
  }
  return static_cast<double>(hit) / total;
}

/// Exhaustive search over a power grid, for chains of at most a few lines.
inline double exhaustive_cost(ControlProblem const &problem, double step,
                              std::vector<double> *argmin = nullptr)
{
  std::vector<double> grid;
  for (double p = problem.p_min; p <= problem.p_max + 1e-9; p += step)
    grid.push_back(p);
  std::size_t const n = problem.lengths.size();
  std::vector<std::size_t> idx(n, 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> p(n);
  while (true)
  {
    for (std::size_t i = 0; i < n; ++i)
      p[i] = grid[idx[i]];
    // Direct evaluation of the line model, independent of predicted_c1.
    double cost = 0.;
    auto const &m = problem.model;
    for (std::size_t i = 0; i < n; ++i)
    {
      double c = m.c_inf_slope * p[i] + m.c_inf_intercept;
      if (i > 0 && !problem.jumps[i])
      {
        double const q = p[i - 1];
        c += (m.dc_quad * q * q + m.dc_lin * q + m.dc_intercept) *
             std::exp(-problem.lengths[i - 1] / (m.r_slope * q));
      }
      cost += (c - problem.c_ref) * (c - problem.c_ref);
    }
    if (cost < best)
    {
      best = cost;
      if (argmin)
        *argmin = p;
    }
    std::size_t k = 0;
    while (k < n && ++idx[k] == grid.size())
      idx[k++] = 0;
    if (k == n)
      break;
  }
  return best;
}

inline ControlProblem random_problem(std::mt19937_64 &rng, std::size_t max_lines)
{
  std::uniform_int_distribution<std::size_t> count(1, max_lines);
  std::uniform_real_distribution<double> length(0.2, 15.), ref(1300., 1900.),
      coin(0., 1.);
  ControlProblem pr;
  pr.model = PowerModel::nominal();
  std::size_t const n = count(rng);
  for (std::size_t i = 0; i < n; ++i)
  {
    pr.lengths.push_back(length(rng));
    pr.jumps.push_back(i > 0 && coin(rng) < 0.2);
  }
  pr.c_ref = ref(rng);
  return pr;
}

/// Hatch angle of global layer k: 67 degree rotation between layers.
inline double layer_angle(int k) { return std::fmod(67. * k, 180.); }

inline LayerRecord simulated_layer(Polygon const &poly, int k, double power,
                                   double sigma, std::uint64_t seed)
{
  LayerScan scan = hatch_polygon(poly, layer_angle(k), 0.09, power, 800.);
  scan.layer_id = k;
  NoiseConfig noise;
  noise.sigma_c1 = sigma;
  noise.seed = seed;
  auto sim = simulate_layer(scan, PowerModel::nominal(), noise);
  return {std::move(scan), std::move(sim.samples)};
}

inline std::vector<double> identification_powers() { return {150., 175., 200., 225.}; }

/// Training layer k alternates the triangle and cube fixtures.
inline Polygon training_shape(int k)
{
  return k % 2 == 0 ? shapes::by_name("triangle") : shapes::by_name("cube");
}
struct Dataset
{
  std::filesystem::path training;
  std::filesystem::path validation;
};

/**
 * Write a simulated identification data set under \p dir: for every power,
 * \p chunks chunks of \p layers layers, then \p held_out cube layers per
 * power for validation. Layer k uses hatch angle layer_angle(k) and noise
 * seed base_seed + k.
 */
inline Dataset write_dataset(std::filesystem::path const &dir, int chunks, int layers,
                             int held_out, std::uint64_t base_seed, double sigma = 175.)
{
  std::filesystem::create_directories(dir);
  std::string train = "chunk,power_w,scan,signal\n";
  std::string valid = train;
  int k = 0;
  auto emit = [&](Polygon const &poly, double power, std::string &manifest,
                  std::string const &label)
  {
    auto const layer = simulated_layer(poly, k, power, sigma, base_seed + k);
    auto const scan = "layer" + std::to_string(k) + ".scan";
    auto const csv = "layer" + std::to_string(k) + ".csv";
    write_file(dir / scan, write_scanfile(layer.scan));
    write_file(dir / csv, write_signal_csv(layer.samples));
    manifest += label + "," + std::to_string(static_cast<int>(power)) + "," + scan + "," +
                csv + "\n";
    ++k;
  };
  for (double power : identification_powers())
    for (int c = 0; c < chunks; ++c)
    {
      auto const label = "p" + std::to_string(static_cast<int>(power)) + "c" + std::to_string(c);
      for (int l = 0; l < layers; ++l)
        emit(training_shape(k), power, train, label);
    }
  for (double power : identification_powers())
    for (int v = 0; v < held_out; ++v)
      emit(shapes::by_name("cube"), power, valid, "validation");
  write_file(dir / "training.csv", train);
  write_file(dir / "validation.csv", valid);
  return {dir / "training.csv", dir / "validation.csv"};
}

inline std::filesystem::path scratch_dir(std::string const &name)
{
  auto const dir = std::filesystem::temp_directory_path() / ("lpbf_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}
} // namespace lpbf::test

#endif
