/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include <lpbf/meltmodel.hpp>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace lpbf
{
namespace
{
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

constexpr char const *model_keys[] = {"c_inf_slope",  "c_inf_intercept",
                                      "dc_quad",      "dc_lin",
                                      "dc_intercept", "r_slope"};

double median_of(std::vector<double> values)
{
  std::size_t const n = values.size();
  auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  double const upper = *mid;
  if (n % 2 == 1)
    return upper;
  double const lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

struct StaticParams
{
  double c_inf;
  double delta_c;
  double r;
};

double sum_squares(std::span<FitSample const> samples, StaticParams const &p)
{
  double cost = 0.;
  for (auto const &s : samples)
  {
    double const res = s.c1 - (p.c_inf + p.delta_c * std::exp(-s.length / p.r));
    cost += res * res;
  }
  return cost;
}

ExpFit make_fit(std::span<FitSample const> samples, StaticParams const &p)
{
  ExpFit fit{p.c_inf, p.delta_c, p.r, 0., nan, nan};
  std::vector<double> obs;
  std::vector<double> pred;
  obs.reserve(samples.size());
  pred.reserve(samples.size());
  for (auto const &s : samples)
  {
    obs.push_back(s.c1);
    pred.push_back(eval_static(fit, s.length));
  }
  auto const metrics = fit_metrics(obs, pred);
  fit.rmse = metrics.rmse;
  fit.r2 = metrics.r2.value_or(nan);
  return fit;
}

// Ordinary least squares on a polynomial basis in power.
struct OlsResult
{
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd xtx_inv;
  double s2 = 0.;
};

Eigen::MatrixXd design(std::span<double const> p, std::vector<int> const &degrees)
{
  Eigen::MatrixXd x(static_cast<Eigen::Index>(p.size()),
                    static_cast<Eigen::Index>(degrees.size()));
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < degrees.size(); ++j)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::pow(p[i], degrees[j]);
  return x;
}

OlsResult ols(Eigen::MatrixXd const &x, Eigen::VectorXd const &y)
{
  OlsResult out;
  // Column scaling keeps the quadratic basis well conditioned.
  Eigen::VectorXd scale = x.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < scale.size(); ++j)
    if (scale(j) == 0.)
      scale(j) = 1.;
  Eigen::MatrixXd const xs = x * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
  if (qr.rank() < xs.cols())
    throw IdentificationError("power regression is rank deficient");
  out.beta = qr.solve(y).cwiseQuotient(scale);
  out.residuals = y - x * out.beta;
  Eigen::MatrixXd const xtx = xs.transpose() * xs;
  Eigen::MatrixXd const inv_scaled =
      xtx.ldlt().solve(Eigen::MatrixXd::Identity(xs.cols(), xs.cols()));
  out.xtx_inv = scale.cwiseInverse().asDiagonal() * inv_scaled *
                scale.cwiseInverse().asDiagonal();
  auto const dof = x.rows() - x.cols();
  out.s2 = dof > 0 ? out.residuals.squaredNorm() / static_cast<double>(dof) : 0.;
  return out;
}

std::size_t distinct_count(std::span<double const> p)
{
  return std::set<double>(p.begin(), p.end()).size();
}

RegressionSummary regress(std::span<double const> powers,
                          std::span<double const> values,
                          std::vector<int> const &degrees, char const *name)
{
  std::size_t const k = degrees.size();
  std::vector<std::size_t> kept(powers.size());
  std::iota(kept.begin(), kept.end(), 0);

  auto fit_subset = [&](std::vector<std::size_t> const &idx)
  {
    std::vector<double> p;
    Eigen::VectorXd y(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
    {
      p.push_back(powers[idx[i]]);
      y(static_cast<Eigen::Index>(i)) = values[idx[i]];
    }
    if (distinct_count(p) < k)
      throw IdentificationError(
          fmt::format("{} regression: too few distinct powers remain", name));
    Eigen::MatrixXd const x = design(p, degrees);
    return std::pair{x, ols(x, y)};
  };

  RegressionSummary summary;
  auto [x, first] = fit_subset(kept);
  double const n = static_cast<double>(kept.size());
  double const y_scale =
      std::abs(std::accumulate(values.begin(), values.end(), 0.) / n) + 1.;
  // Exact data has no outliers; its residuals are rounding noise.
  bool const has_noise = std::sqrt(first.s2) > 1e-9 * y_scale;
  if (has_noise && kept.size() > k)
  {
    Eigen::MatrixXd const hat_core = x * first.xtx_inv;
    std::vector<std::size_t> survivors;
    double const threshold = 4. / n;
    for (std::size_t i = 0; i < kept.size(); ++i)
    {
      auto const ii = static_cast<Eigen::Index>(i);
      double const h = hat_core.row(ii).dot(x.row(ii));
      double const e = first.residuals(ii);
      double cook = 0.;
      if (h < 1. - 1e-12)
        cook = e * e / (static_cast<double>(k) * first.s2) * h /
               ((1. - h) * (1. - h));
      if (cook > threshold)
        summary.rejected.push_back(kept[i]);
      else
        survivors.push_back(kept[i]);
    }
    if (survivors.empty())
      throw IdentificationError(
          fmt::format("{} regression: all points rejected", name));
    if (!summary.rejected.empty())
    {
      kept = survivors;
      std::tie(x, first) = fit_subset(kept);
    }
  }

  summary.used = kept.size();
  summary.coefficients.assign(first.beta.data(),
                              first.beta.data() + first.beta.size());
  for (Eigen::Index j = 0; j < first.beta.size(); ++j)
    summary.standard_errors.push_back(std::sqrt(first.s2 * first.xtx_inv(j, j)));
  double mean = 0.;
  for (std::size_t i : kept)
    mean += values[i];
  mean /= static_cast<double>(kept.size());
  double ss_tot = 0.;
  for (std::size_t i : kept)
    ss_tot += (values[i] - mean) * (values[i] - mean);
  summary.r2 = ss_tot > 0. ? 1. - first.residuals.squaredNorm() / ss_tot : nan;
  return summary;
}
} // namespace

PowerModel PowerModel::nominal()
{
  return PowerModel{10.6, -880., -0.12, 41., -2268., 0.03};
}

void validate(PowerModel const &model)
{
  for (double const c : {model.c_inf_slope, model.c_inf_intercept, model.dc_quad,
                         model.dc_lin, model.dc_intercept, model.r_slope})
    if (!std::isfinite(c))
      throw InvalidArgument("power model has a non-finite coefficient");
  if (!(model.r(model_power_min) > 0.) || !(model.r(model_power_max) > 0.))
    throw InvalidArgument("power model: r(p) must be positive on the power range");
  std::vector<double> probes{model_power_min, model_power_max};
  if (model.dc_quad != 0.)
  {
    double const vertex = -model.dc_lin / (2. * model.dc_quad);
    if (vertex > model_power_min && vertex < model_power_max)
      probes.push_back(vertex);
  }
  for (double const p : probes)
    if (model.delta_c(p) < 0.)
      throw InvalidArgument(fmt::format(
          "power model: delta_c({}) = {} is negative", p, model.delta_c(p)));
}

PowerModel parse_power_model(std::string_view text)
{
  nlohmann::json j;
  try
  {
    j = nlohmann::json::parse(text);
  }
  catch (nlohmann::json::parse_error const &e)
  {
    throw ParseError(0, std::string("power model: ") + e.what());
  }
  if (!j.is_object())
    throw ParseError(0, "power model: expected a JSON object");
  double v[6];
  for (std::size_t i = 0; i < 6; ++i)
  {
    auto const it = j.find(model_keys[i]);
    if (it == j.end() || !it->is_number())
      throw ParseError(0, fmt::format("power model: missing numeric key '{}'",
                                      model_keys[i]));
    v[i] = it->get<double>();
  }
  PowerModel model{v[0], v[1], v[2], v[3], v[4], v[5]};
  validate(model);
  return model;
}

std::string write_power_model(PowerModel const &model)
{
  double const v[6] = {model.c_inf_slope, model.c_inf_intercept, model.dc_quad,
                       model.dc_lin,      model.dc_intercept,    model.r_slope};
  std::string out = "{\n";
  for (std::size_t i = 0; i < 6; ++i)
    out += fmt::format("  \"{}\": {:.17g}{}\n", model_keys[i], v[i],
                       i + 1 < 6 ? "," : "");
  out += "}\n";
  return out;
}

double eval_static(ExpFit const &fit, double length)
{
  return fit.c_inf + fit.delta_c * std::exp(-length / fit.r);
}

ExpFit eval_coeffs(PowerModel const &model, double p, Extrapolation policy)
{
  if (!std::isfinite(p))
    throw InvalidArgument("power is not finite");
  if (policy == Extrapolation::refuse &&
      (p < model_power_min || p > model_power_max))
    throw InvalidArgument(fmt::format(
        "power {} W outside the model range [{}, {}] W", p, model_power_min,
        model_power_max));
  return ExpFit{model.c_inf(p), model.delta_c(p), model.r(p), p, nan, nan};
}

std::vector<double> eval_dynamic(PowerModel const &model,
                                 std::span<double const> powers,
                                 std::span<double const> lengths,
                                 std::vector<bool> const &jumps,
                                 Extrapolation policy)
{
  if (powers.size() != lengths.size() || powers.size() != jumps.size())
    throw InvalidArgument(fmt::format(
        "eval_dynamic: {} powers, {} lengths, {} jump flags", powers.size(),
        lengths.size(), jumps.size()));
  std::vector<double> out(powers.size());
  for (std::size_t n = 0; n < powers.size(); ++n)
  {
    out[n] = eval_coeffs(model, powers[n], policy).c_inf;
    if (n > 0 && !jumps[n])
    {
      ExpFit const prev = eval_coeffs(model, powers[n - 1], policy);
      out[n] += prev.delta_c * std::exp(-lengths[n - 1] / prev.r);
    }
  }
  return out;
}

ExpFit fit_exponential(std::span<FitSample const> samples,
                       ExpFitOptions const &options)
{
  if (samples.size() < 10)
    throw IdentificationError(fmt::format(
        "exponential fit needs at least 10 samples, got {}", samples.size()));
  double l_min = std::numeric_limits<double>::infinity();
  double l_max = 0.;
  for (auto const &s : samples)
  {
    if (!std::isfinite(s.length) || !std::isfinite(s.c1) || s.length < 0.)
      throw IdentificationError("exponential fit: invalid sample");
    l_min = std::min(l_min, s.length);
    l_max = std::max(l_max, s.length);
  }
  if (!(l_max > 0.) || l_max < 3. * l_min)
    throw IdentificationError("degenerate length spread");

  // Seed: plateau from the longest lines, amplitude from the peak, decay
  // length from the median line length.
  double plateau = 0.;
  std::size_t plateau_n = 0;
  double peak = -std::numeric_limits<double>::infinity();
  std::vector<double> lengths;
  lengths.reserve(samples.size());
  for (auto const &s : samples)
  {
    if (s.length >= 0.75 * l_max)
    {
      plateau += s.c1;
      ++plateau_n;
    }
    peak = std::max(peak, s.c1);
    lengths.push_back(s.length);
  }
  plateau /= static_cast<double>(plateau_n);
  double const r_floor = 1e-9 * l_max;
  StaticParams p{std::max(plateau, 0.), std::max(peak - plateau, 1.),
                 std::max(0.5 * median_of(lengths), r_floor)};

  auto project = [r_floor](StaticParams q)
  {
    q.c_inf = std::max(q.c_inf, 0.);
    q.delta_c = std::max(q.delta_c, 0.);
    q.r = std::max(q.r, r_floor);
    return q;
  };

  double sum_y2 = 0.;
  for (auto const &s : samples)
    sum_y2 += s.c1 * s.c1;

  double cost = sum_squares(samples, p);
  double lambda = 1e-3;
  for (int iter = 0; iter < options.max_iterations; ++iter)
  {
    if (cost <= 1e-28 * sum_y2)
      return make_fit(samples, p);

    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (auto const &s : samples)
    {
      double const e = std::exp(-s.length / p.r);
      Eigen::Vector3d const g(1., e, p.delta_c * e * s.length / (p.r * p.r));
      double const res = s.c1 - (p.c_inf + p.delta_c * e);
      jtj.noalias() += g * g.transpose();
      jtr.noalias() += g * res;
    }

    bool accepted = false;
    while (!accepted && lambda < 1e16)
    {
      Eigen::Matrix3d damped = jtj;
      for (int d = 0; d < 3; ++d)
        damped(d, d) += lambda * std::max(jtj(d, d), 1e-300);
      Eigen::Vector3d const step = damped.ldlt().solve(jtr);
      StaticParams const trial =
          project({p.c_inf + step(0), p.delta_c + step(1), p.r + step(2)});
      double const trial_cost = sum_squares(samples, trial);
      if (std::isfinite(trial_cost) && trial_cost < cost)
      {
        double const change = (cost - trial_cost) / cost;
        p = trial;
        cost = trial_cost;
        lambda = std::max(lambda / 3., 1e-12);
        accepted = true;
        if (change < options.relative_tolerance)
          return make_fit(samples, p);
      }
      else
      {
        lambda *= 4.;
      }
    }
    // No descent direction left at machine precision: p is a minimizer.
    if (!accepted)
      return make_fit(samples, p);
  }
  throw ExpFitError(fmt::format("exponential fit did not converge in {} iterations",
                                options.max_iterations),
                    make_fit(samples, p));
}

PowerModelFit fit_power_model(std::span<ExpFit const> fits)
{
  std::vector<double> p;
  std::vector<double> c_inf;
  std::vector<double> delta_c;
  std::vector<double> r;
  for (auto const &f : fits)
  {
    p.push_back(f.power);
    c_inf.push_back(f.c_inf);
    delta_c.push_back(f.delta_c);
    r.push_back(f.r);
  }
  if (distinct_count(p) < 3)
    throw IdentificationError(fmt::format(
        "power model needs at least 3 distinct power levels, got {}",
        distinct_count(p)));

  PowerModelFit out;
  out.c_inf = regress(p, c_inf, {0, 1}, "c_inf");
  out.r = regress(p, r, {1}, "r");
  out.delta_c = regress(p, delta_c, {0, 1, 2}, "delta_c");
  out.model.c_inf_intercept = out.c_inf.coefficients[0];
  out.model.c_inf_slope = out.c_inf.coefficients[1];
  out.model.r_slope = out.r.coefficients[0];
  out.model.dc_intercept = out.delta_c.coefficients[0];
  out.model.dc_lin = out.delta_c.coefficients[1];
  out.model.dc_quad = out.delta_c.coefficients[2];
  return out;
}

std::vector<double> median_filter(std::span<double const> signal, int window)
{
  if (window % 2 == 0)
    ++window;
  if (window < 3)
    throw InvalidArgument(fmt::format("median window {} below 3", window));
  std::vector<double> out(signal.size());
  if (signal.empty())
    return out;
  auto const half = static_cast<std::size_t>(window / 2);
  std::vector<double> buf;
  buf.reserve(static_cast<std::size_t>(window));
  for (std::size_t i = 0; i < signal.size(); ++i)
  {
    std::size_t const lo = i >= half ? i - half : 0;
    std::size_t const hi = std::min(signal.size(), i + half + 1);
    buf.assign(signal.begin() + static_cast<std::ptrdiff_t>(lo),
               signal.begin() + static_cast<std::ptrdiff_t>(hi));
    out[i] = median_of(buf);
  }
  return out;
}

FitMetrics fit_metrics(std::span<double const> observed,
                       std::span<double const> predicted)
{
  if (observed.empty() || observed.size() != predicted.size())
    throw InvalidArgument(fmt::format("fit_metrics: {} observed, {} predicted",
                                      observed.size(), predicted.size()));
  double const n = static_cast<double>(observed.size());
  double const mean = std::accumulate(observed.begin(), observed.end(), 0.) / n;
  double ss_res = 0.;
  double ss_tot = 0.;
  for (std::size_t i = 0; i < observed.size(); ++i)
  {
    ss_res += (observed[i] - predicted[i]) * (observed[i] - predicted[i]);
    ss_tot += (observed[i] - mean) * (observed[i] - mean);
  }
  FitMetrics m;
  m.rmse = std::sqrt(ss_res / n);
  if (ss_tot > 0.)
    m.r2 = 1. - ss_res / ss_tot;
  return m;
}

double trend_sigma(std::span<double const> series, int window)
{
  if (series.size() < static_cast<std::size_t>(std::max(window, 0)))
    throw InvalidArgument(fmt::format(
        "trend_sigma: series of {} samples shorter than window {}",
        series.size(), window));
  auto const trend = median_filter(series, window);
  double const n = static_cast<double>(trend.size());
  double const mean = std::accumulate(trend.begin(), trend.end(), 0.) / n;
  double var = 0.;
  for (double v : trend)
    var += (v - mean) * (v - mean);
  return std::sqrt(var / n);
}
} // namespace lpbf
