/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef LPBF_FFCONTROL_HPP
#define LPBF_FFCONTROL_HPP

#include <lpbf/meltmodel.hpp>
#include <lpbf/scanpath.hpp>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lpbf
{
/// Footprint reference: the average C1 of the nominal scan.
inline constexpr double default_c_ref = 1500.;

/**
 * Line-by-line power regulation problem: minimize
 * sum_n (C1(n) - c_ref)^2 over p_n in [p_min, p_max], with C1 from
 * eval_dynamic.
 */
struct ControlProblem
{
  std::vector<double> lengths;
  std::vector<bool> jumps;
  PowerModel model;
  double c_ref = default_c_ref;
  double p_min = model_power_min;
  double p_max = model_power_max;
};

void validate(ControlProblem const &problem);

ControlProblem problem_from_scan(LayerScan const &scan, PowerModel const &model,
                                 double c_ref = default_c_ref,
                                 double p_min = model_power_min,
                                 double p_max = model_power_max);

struct PowerProfile
{
  std::vector<double> powers;
  double cost = 0.;
  int iterations = 0;
  bool converged = false;
};

std::vector<double> predicted_c1(ControlProblem const &problem,
                                 std::span<double const> powers);
double control_cost(ControlProblem const &problem, std::span<double const> powers);

/// Gradient of control_cost with respect to the powers.
std::vector<double> control_gradient(ControlProblem const &problem,
                                     std::span<double const> powers);

/// Norm of p - clamp(p - grad), zero exactly at a KKT point.
double projected_gradient_norm(ControlProblem const &problem,
                               std::span<double const> powers);

struct SolverOptions
{
  int max_iterations = 10000;
  /// Stop when the projected gradient norm is below tolerance * (1 + cost).
  double tolerance = 1e-6;
};

/**
 * Projected Gauss-Newton on the box constrained problem. The Jacobian of the
 * residuals is lower bidiagonal, so each step solves a tridiagonal system on
 * the free variables; steps are accepted by an Armijo rule along the
 * projection arc. Starts from the steady-state power c_inf(p) = c_ref.
 * A run that hits the iteration cap comes back with converged = false.
 */
PowerProfile optimize_powers(ControlProblem const &problem,
                             SolverOptions const &options = {});

/**
 * Exact minimizer over the power grid p_min + k * grid_step (plus p_max) by
 * dynamic programming along the line chain. Ties go to the lower power.
 */
PowerProfile brute_force_powers(ControlProblem const &problem, double grid_step);

/// Copy of the scan with per-line powers replaced by the profile.
LayerScan apply_profile(LayerScan const &scan, PowerProfile const &profile);

/// CSV with header `line,power_w,predicted_c1`.
std::string write_profile_csv(PowerProfile const &profile,
                              std::span<double const> predicted);
PowerProfile parse_profile_csv(std::string_view text);
} // namespace lpbf

#endif
