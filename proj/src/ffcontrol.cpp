/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include <lpbf/error.hpp>
#include <lpbf/ffcontrol.hpp>
#include <lpbf/textio.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace lpbf
{
namespace
{
// Value and derivative of the heat carried over from a line of length l
// scanned at power p.
struct Carryover
{
  double value;
  double derivative;
};

Carryover carryover(PowerModel const &m, double p, double l)
{
  double const r = m.r(p);
  double const e = std::exp(-l / r);
  double const dc = m.delta_c(p);
  return {dc * e,
          e * (m.delta_c_derivative(p) + dc * l * m.r_derivative(p) / (r * r))};
}

bool coupled(ControlProblem const &problem, std::size_t n)
{
  return n > 0 && !problem.jumps[n];
}

struct Linearization
{
  std::vector<double> residuals;
  // sub[n] = d residual_n / d p_{n-1}; zero when uncoupled.
  std::vector<double> sub;
  double diag = 0.;
};

Linearization linearize(ControlProblem const &problem, std::span<double const> p)
{
  std::size_t const n = p.size();
  Linearization lin;
  lin.residuals.resize(n);
  lin.sub.assign(n, 0.);
  lin.diag = problem.model.c_inf_slope;
  for (std::size_t i = 0; i < n; ++i)
  {
    lin.residuals[i] = problem.model.c_inf(p[i]) - problem.c_ref;
    if (coupled(problem, i))
    {
      auto const c = carryover(problem.model, p[i - 1], problem.lengths[i - 1]);
      lin.residuals[i] += c.value;
      lin.sub[i] = c.derivative;
    }
  }
  return lin;
}

double cost_of(std::vector<double> const &residuals)
{
  double c = 0.;
  for (double r : residuals)
    c += r * r;
  return c;
}

std::vector<double> gradient_of(Linearization const &lin)
{
  std::size_t const n = lin.residuals.size();
  std::vector<double> g(n);
  for (std::size_t m = 0; m < n; ++m)
  {
    g[m] = 2. * lin.diag * lin.residuals[m];
    if (m + 1 < n)
      g[m] += 2. * lin.sub[m + 1] * lin.residuals[m + 1];
  }
  return g;
}

// Solve a symmetric tridiagonal system in place (Thomas algorithm); diag is
// positive definite here.
void solve_tridiagonal(std::vector<double> diag, std::vector<double> off,
                       std::vector<double> &rhs)
{
  std::size_t const n = diag.size();
  for (std::size_t i = 1; i < n; ++i)
  {
    double const w = off[i - 1] / diag[i - 1];
    diag[i] -= w * off[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
}
} // namespace

void validate(ControlProblem const &problem)
{
  if (problem.lengths.empty())
    throw InvalidArgument("control problem has no lines");
  if (problem.jumps.size() != problem.lengths.size())
    throw InvalidArgument("control problem: jump flags and lengths differ in size");
  for (double l : problem.lengths)
    if (!(l >= 0.) || !std::isfinite(l))
      throw InvalidArgument("control problem: line lengths must be finite and >= 0");
  if (!(problem.p_min < problem.p_max))
    throw InvalidArgument("control problem: p_min must be below p_max");
  if (problem.p_min < model_power_min || problem.p_max > model_power_max)
    throw InvalidArgument(fmt::format(
        "control problem: bounds [{}, {}] W exceed the model range [{}, {}] W",
        problem.p_min, problem.p_max, model_power_min, model_power_max));
  if (!std::isfinite(problem.c_ref))
    throw InvalidArgument("control problem: c_ref must be finite");
  validate(problem.model);
}

ControlProblem problem_from_scan(LayerScan const &scan, PowerModel const &model,
                                 double c_ref, double p_min, double p_max)
{
  ControlProblem problem{line_lengths(scan), jump_flags(scan), model, c_ref,
                         p_min, p_max};
  validate(problem);
  return problem;
}

std::vector<double> predicted_c1(ControlProblem const &problem,
                                 std::span<double const> powers)
{
  return eval_dynamic(problem.model, powers, problem.lengths, problem.jumps);
}

double control_cost(ControlProblem const &problem, std::span<double const> powers)
{
  if (powers.size() != problem.lengths.size())
    throw InvalidArgument("control_cost: profile and problem differ in size");
  return cost_of(linearize(problem, powers).residuals);
}

std::vector<double> control_gradient(ControlProblem const &problem,
                                     std::span<double const> powers)
{
  if (powers.size() != problem.lengths.size())
    throw InvalidArgument("control_gradient: profile and problem differ in size");
  return gradient_of(linearize(problem, powers));
}

double projected_gradient_norm(ControlProblem const &problem,
                               std::span<double const> powers)
{
  auto const g = control_gradient(problem, powers);
  double s = 0.;
  for (std::size_t i = 0; i < g.size(); ++i)
  {
    double const d =
        powers[i] - std::clamp(powers[i] - g[i], problem.p_min, problem.p_max);
    s += d * d;
  }
  return std::sqrt(s);
}

PowerProfile optimize_powers(ControlProblem const &problem,
                             SolverOptions const &options)
{
  validate(problem);
  std::size_t const n = problem.lengths.size();
  double const lo = problem.p_min;
  double const hi = problem.p_max;
  auto clamp = [lo, hi](double v) { return std::clamp(v, lo, hi); };

  double const steady = clamp((problem.c_ref - problem.model.c_inf_intercept) /
                              problem.model.c_inf_slope);
  PowerProfile out;
  out.powers.assign(n, steady);

  Linearization lin = linearize(problem, out.powers);
  double cost = cost_of(lin.residuals);
  std::vector<double> trial(n);
  std::vector<double> hdiag(n);
  std::vector<double> hoff(n > 0 ? n - 1 : 0);
  std::vector<bool> active(n);
  constexpr double armijo = 1e-4;

  for (int iter = 0;; ++iter)
  {
    auto const grad = gradient_of(lin);
    double pg2 = 0.;
    for (std::size_t i = 0; i < n; ++i)
    {
      double const d = out.powers[i] - clamp(out.powers[i] - grad[i]);
      pg2 += d * d;
    }
    double const pg = std::sqrt(pg2);
    out.cost = cost;
    out.iterations = iter;
    if (pg < options.tolerance * (1. + cost))
    {
      out.converged = true;
      return out;
    }
    if (iter >= options.max_iterations)
      return out;

    // Variables within eps of a bound whose gradient pushes outward are held.
    double const eps = std::min(1e-3, pg);
    for (std::size_t i = 0; i < n; ++i)
      active[i] = (out.powers[i] <= lo + eps && grad[i] > 0.) ||
                  (out.powers[i] >= hi - eps && grad[i] < 0.);

    // Gauss-Newton Hessian 2 J^T J is tridiagonal.
    double const a = lin.diag;
    for (std::size_t m = 0; m < n; ++m)
    {
      double const s_next = m + 1 < n ? lin.sub[m + 1] : 0.;
      hdiag[m] = 2. * (a * a + s_next * s_next);
      if (m + 1 < n)
        hoff[m] = (active[m] || active[m + 1]) ? 0. : 2. * a * s_next;
    }
    std::vector<double> step(n);
    for (std::size_t i = 0; i < n; ++i)
      step[i] = -grad[i];
    std::vector<double> free_diag = hdiag;
    for (std::size_t i = 0; i < n; ++i)
      free_diag[i] *= 1. + 1e-12;
    solve_tridiagonal(free_diag, hoff, step);
    // Held variables take a diagonally scaled gradient step instead.
    for (std::size_t i = 0; i < n; ++i)
      if (active[i])
        step[i] = -grad[i] / hdiag[i];

    auto line_search = [&](std::vector<double> const &dir) -> bool
    {
      for (double alpha = 1.; alpha > 1e-20; alpha *= 0.5)
      {
        double decrease = 0.;
        for (std::size_t i = 0; i < n; ++i)
        {
          trial[i] = clamp(out.powers[i] + alpha * dir[i]);
          decrease += grad[i] * (trial[i] - out.powers[i]);
        }
        if (decrease >= 0.)
          continue;
        Linearization next = linearize(problem, trial);
        double const next_cost = cost_of(next.residuals);
        if (next_cost <= cost + armijo * decrease)
        {
          out.powers = trial;
          lin = std::move(next);
          cost = next_cost;
          return true;
        }
      }
      return false;
    };

    if (!line_search(step))
    {
      std::vector<double> descent(n);
      for (std::size_t i = 0; i < n; ++i)
        descent[i] = -grad[i] / hdiag[i];
      if (!line_search(descent))
      {
        // No representable descent left; report the KKT residual honestly.
        out.iterations = iter + 1;
        out.converged = false;
        return out;
      }
    }
  }
}

PowerProfile brute_force_powers(ControlProblem const &problem, double grid_step)
{
  validate(problem);
  double const span = problem.p_max - problem.p_min;
  if (!(grid_step > 0.) || grid_step > span)
    throw InvalidArgument(fmt::format(
        "grid step {} W cannot bracket the bounds [{}, {}] W", grid_step,
        problem.p_min, problem.p_max));
  std::vector<double> grid;
  auto const steps = static_cast<std::size_t>(std::floor(span / grid_step + 1e-9));
  for (std::size_t k = 0; k <= steps; ++k)
    grid.push_back(problem.p_min + static_cast<double>(k) * grid_step);
  if (grid.back() < problem.p_max - 1e-9)
    grid.push_back(problem.p_max);
  else
    grid.back() = problem.p_max;

  std::size_t const g = grid.size();
  std::size_t const n = problem.lengths.size();
  std::vector<double> base(g);
  for (std::size_t k = 0; k < g; ++k)
    base[k] = problem.model.c_inf(grid[k]) - problem.c_ref;

  std::vector<double> value(g);
  std::vector<double> next(g);
  std::vector<std::uint32_t> parent(n * g, 0);
  std::vector<double> carry(g);
  for (std::size_t k = 0; k < g; ++k)
    value[k] = base[k] * base[k];

  for (std::size_t i = 1; i < n; ++i)
  {
    std::uint32_t *par = parent.data() + i * g;
    if (!coupled(problem, i))
    {
      auto const best = static_cast<std::uint32_t>(
          std::min_element(value.begin(), value.end()) - value.begin());
      for (std::size_t k = 0; k < g; ++k)
      {
        next[k] = value[best] + base[k] * base[k];
        par[k] = best;
      }
    }
    else
    {
      for (std::size_t j = 0; j < g; ++j)
        carry[j] = carryover(problem.model, grid[j], problem.lengths[i - 1]).value;
      for (std::size_t k = 0; k < g; ++k)
      {
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t arg = 0;
        double const b = base[k];
        for (std::size_t j = 0; j < g; ++j)
        {
          double const res = b + carry[j];
          double const v = value[j] + res * res;
          if (v < best)
          {
            best = v;
            arg = static_cast<std::uint32_t>(j);
          }
        }
        next[k] = best;
        par[k] = arg;
      }
    }
    value.swap(next);
  }

  PowerProfile out;
  out.powers.resize(n);
  auto k = static_cast<std::uint32_t>(
      std::min_element(value.begin(), value.end()) - value.begin());
  for (std::size_t i = n; i-- > 0;)
  {
    out.powers[i] = grid[k];
    k = parent[i * g + k];
  }
  out.cost = control_cost(problem, out.powers);
  out.iterations = static_cast<int>(n);
  out.converged = true;
  return out;
}

LayerScan apply_profile(LayerScan const &scan, PowerProfile const &profile)
{
  if (profile.powers.size() != scan.size())
    throw InvalidArgument(fmt::format("profile has {} powers for {} scan lines",
                                      profile.powers.size(), scan.size()));
  LayerScan out = scan;
  for (std::size_t i = 0; i < out.size(); ++i)
    out.lines[i].power = profile.powers[i];
  return out;
}

std::string write_profile_csv(PowerProfile const &profile,
                              std::span<double const> predicted)
{
  if (predicted.size() != profile.powers.size())
    throw InvalidArgument("profile and prediction differ in size");
  std::string out = "line,power_w,predicted_c1\n";
  for (std::size_t i = 0; i < predicted.size(); ++i)
    out += fmt::format("{},{},{}\n", i, format_fixed6(profile.powers[i]),
                       format_fixed6(predicted[i]));
  return out;
}

PowerProfile parse_profile_csv(std::string_view text)
{
  auto const lines = split_lines(text);
  if (lines.empty() || trim(lines.front()) != "line,power_w,predicted_c1")
    throw ParseError(1, "expected header 'line,power_w,predicted_c1'");
  PowerProfile profile;
  for (std::size_t i = 1; i < lines.size(); ++i)
  {
    std::string_view const line = trim(lines[i]);
    if (line.empty())
      continue;
    auto const f = split_char(line, ',');
    if (f.size() != 3)
      throw ParseError(i + 1, "expected 3 fields");
    auto const idx = parse_int(f[0]);
    auto const p = parse_double(f[1]);
    if (!idx || !p || static_cast<std::size_t>(*idx) != profile.powers.size())
      throw ParseError(i + 1, "malformed or out of order profile record");
    profile.powers.push_back(*p);
  }
  profile.converged = true;
  return profile;
}
} // namespace lpbf
