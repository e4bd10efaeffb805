/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef LPBF_MELTMODEL_HPP
#define LPBF_MELTMODEL_HPP

#include <lpbf/error.hpp>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lpbf
{
/// Laser power range [W] over which the power model is identified.
inline constexpr double model_power_min = 150.;
inline constexpr double model_power_max = 225.;

/// Median filter window used to extract the geometry related trend [samples].
inline constexpr int trend_window = 150;

/**
 * Static footprint model at one laser power:
 * C1(l) = c_inf + delta_c * exp(-l / r), l the scan line length in mm.
 * rmse and r2 are NaN unless the object comes out of a fit.
 */
struct ExpFit
{
  double c_inf = 0.;
  double delta_c = 0.;
  double r = 1.;
  double power = 0.;
  double rmse = 0.;
  double r2 = 0.;
};

/**
 * Power parameterized coefficients of the footprint model:
 *   c_inf(p)   = c_inf_slope * p + c_inf_intercept
 *   delta_c(p) = dc_quad * p^2 + dc_lin * p + dc_intercept
 *   r(p)       = r_slope * p
 */
struct PowerModel
{
  double c_inf_slope = 0.;
  double c_inf_intercept = 0.;
  double dc_quad = 0.;
  double dc_lin = 0.;
  double dc_intercept = 0.;
  double r_slope = 0.;

  /// Coefficients identified on cobalt chrome at 800 mm/s, 90 um hatch.
  static PowerModel nominal();

  double c_inf(double p) const { return c_inf_slope * p + c_inf_intercept; }
  double delta_c(double p) const { return (dc_quad * p + dc_lin) * p + dc_intercept; }
  double r(double p) const { return r_slope * p; }

  double c_inf_derivative(double) const { return c_inf_slope; }
  double delta_c_derivative(double p) const { return 2. * dc_quad * p + dc_lin; }
  double r_derivative(double) const { return r_slope; }
};

/// Throws InvalidArgument unless r(p) > 0 and delta_c(p) >= 0 on the whole
/// identified power range.
void validate(PowerModel const &model);

/// JSON object with the six coefficient keys.
PowerModel parse_power_model(std::string_view text);
std::string write_power_model(PowerModel const &model);

double eval_static(ExpFit const &fit, double length);

enum class Extrapolation
{
  refuse,
  allow
};

/// Coefficients of the static model at power p. Powers outside
/// [model_power_min, model_power_max] throw unless extrapolation is allowed.
ExpFit eval_coeffs(PowerModel const &model, double p,
                   Extrapolation policy = Extrapolation::refuse);

/**
 * Line indexed footprint prediction
 *   C1(n) = c_inf(p_n) + delta_c(p_{n-1}) exp(-l_{n-1} / r(p_{n-1})),
 * where the exponential term is dropped for n = 0 and for lines preceded by a
 * jump (no adjacent previous track).
 */
std::vector<double> eval_dynamic(PowerModel const &model,
                                 std::span<double const> powers,
                                 std::span<double const> lengths,
                                 std::vector<bool> const &jumps,
                                 Extrapolation policy = Extrapolation::refuse);

struct FitSample
{
  double length = 0.;
  double c1 = 0.;
};

/// Raised when the exponential fit does not converge; carries the best
/// iterate seen.
class ExpFitError : public IdentificationError
{
public:
  ExpFitError(std::string const &what, ExpFit best)
      : IdentificationError(what), _best(best)
  {
  }
  ExpFit const &best() const { return _best; }

private:
  ExpFit _best;
};

struct ExpFitOptions
{
  int max_iterations = 200;
  double relative_tolerance = 1e-10;
};

/**
 * Bounded nonlinear least squares fit of the static model (c_inf >= 0,
 * delta_c >= 0, r > 0) with Levenberg-Marquardt damping. Needs at least 10
 * samples whose lengths span a 3:1 ratio. The returned power is 0; callers
 * label it.
 */
ExpFit fit_exponential(std::span<FitSample const> samples,
                       ExpFitOptions const &options = {});

/// Outcome of one coefficient regression against laser power.
struct RegressionSummary
{
  /// Ascending powers of p, only the terms that are actually fitted.
  std::vector<double> coefficients;
  std::vector<double> standard_errors;
  double r2 = 0.;
  std::size_t used = 0;
  /// Indices into the input fits dropped by the Cook's distance test.
  std::vector<std::size_t> rejected;
};

struct PowerModelFit
{
  PowerModel model;
  RegressionSummary c_inf;
  RegressionSummary delta_c;
  RegressionSummary r;
};

/**
 * Regress the static fit coefficients on power: c_inf linear, r linear
 * through the origin, delta_c quadratic. Before each regression points with
 * Cook's distance above 4/N are dropped once and the regression is refit.
 */
PowerModelFit fit_power_model(std::span<ExpFit const> fits);

/**
 * Running median over a centred window, truncated at the boundaries (even
 * sized boundary windows average the two middle values). An even window is
 * widened by one; a window still below 3 throws InvalidArgument.
 */
std::vector<double> median_filter(std::span<double const> signal, int window);

struct FitMetrics
{
  double rmse = 0.;
  /// Undefined when the observations have zero variance.
  std::optional<double> r2;
};

FitMetrics fit_metrics(std::span<double const> observed,
                       std::span<double const> predicted);

/// Standard deviation of the median filtered series.
double trend_sigma(std::span<double const> series, int window = trend_window);
} // namespace lpbf

#endif
