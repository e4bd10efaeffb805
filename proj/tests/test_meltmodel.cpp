/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "support.hpp"

#include <lpbf/meltmodel.hpp>

#include <doctest.h>

#include <cmath>
#include <random>

using namespace lpbf;

namespace
{
// Frozen from an independent evaluation of 1240 + 1132 / e.
constexpr double c1_at_one_decay_length = 1656.4395274060728;

bool close_rel(double a, double b, double rel)
{
  return std::abs(a - b) <= rel * std::abs(b);
}

std::vector<FitSample> decay_samples(ExpFit const &truth, int repeats, double sigma,
                                     std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0., sigma);
  std::vector<FitSample> out;
  for (double l : {0.6, 1., 2., 4., 8., 16.})
    for (int k = 0; k < repeats; ++k)
      out.push_back({l, truth.c_inf + truth.delta_c * std::exp(-l / truth.r) +
                            (sigma > 0. ? noise(rng) : 0.)});
  return out;
}

std::vector<ExpFit> coefficient_sets()
{
  std::vector<ExpFit> fits;
  // Hand evaluated coefficient polynomials at 150, 175, 200, 225 W.
  double const c_inf[] = {710., 975., 1240., 1505.};
  double const dc[] = {1182., 1232., 1132., 882.};
  double const r[] = {4.5, 5.25, 6., 6.75};
  double const p[] = {150., 175., 200., 225.};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 12; ++k)
      fits.push_back({c_inf[i], dc[i], r[i], p[i], 0., 0.});
  return fits;
}
} // namespace

TEST_CASE("eval_static")
{
  ExpFit const f{1240., 1132., 6., 200., 0., 0.};
  CHECK(eval_static(f, 6.) == doctest::Approx(c1_at_one_decay_length).epsilon(1e-12));
  CHECK(std::abs(eval_static(f, 600.) - 1240.) <= 1e-6);
  CHECK(eval_static({3., 4., 0.7, 0., 0., 0.}, 0.) == doctest::Approx(7.));
}

TEST_CASE("eval_coeffs on the default model")
{
  auto const m = PowerModel::nominal();
  auto const c200 = eval_coeffs(m, 200.);
  CHECK(std::abs(c200.c_inf - 1240.) <= 1e-9);
  CHECK(std::abs(c200.delta_c - 1132.) <= 1e-9);
  CHECK(std::abs(c200.r - 6.) <= 1e-9);
  CHECK(std::abs(eval_coeffs(m, 150.).r - 4.5) <= 1e-9);
  CHECK(std::abs(eval_coeffs(m, 225.).c_inf - 1505.) <= 1e-9);
  CHECK_THROWS_AS(eval_coeffs(m, 149.), InvalidArgument);
  CHECK_THROWS_AS(eval_coeffs(m, 226.), InvalidArgument);
  CHECK(eval_coeffs(m, 250., Extrapolation::allow).c_inf == doctest::Approx(1770.));
  CHECK_NOTHROW(validate(m));
  PowerModel bad = m;
  bad.r_slope = -0.01;
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
}

TEST_CASE("eval_dynamic")
{
  auto const m = PowerModel::nominal();
  std::vector<double> const p1{200.};
  std::vector<double> const l1{3.};
  CHECK(eval_dynamic(m, p1, l1, {false})[0] == doctest::Approx(1240.).epsilon(1e-12));

  std::vector<double> const p2{200., 200.};
  std::vector<double> const l2{6., 3.};
  CHECK(eval_dynamic(m, p2, l2, {false, false})[1] ==
        doctest::Approx(c1_at_one_decay_length).epsilon(1e-12));
  // A jump drops the exponential term.
  CHECK(eval_dynamic(m, p2, l2, {false, true})[1] == doctest::Approx(1240.).epsilon(1e-12));

  std::vector<double> const p3{200., 180.};
  std::vector<double> const l3{600., 3.};
  CHECK(std::abs(eval_dynamic(m, p3, l3, {false, false})[1] - (10.6 * 180. - 880.)) <= 1e-6);

  CHECK_THROWS_AS(eval_dynamic(m, p2, l1, {false}), InvalidArgument);
  CHECK_THROWS_AS(eval_dynamic(m, p2, l2, {false}), InvalidArgument);
}

TEST_CASE("property: dynamic model decoupling")
{
  auto const m = PowerModel::nominal();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pw(150., 225.), len(0.5, 12.);
  for (int trial = 0; trial < 100; ++trial)
  {
    std::size_t const n = 2 + rng() % 20;
    std::vector<double> p(n), l(n);
    std::vector<bool> j(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      p[i] = pw(rng);
      l[i] = len(rng);
      j[i] = i > 0 && rng() % 5 == 0;
    }
    auto const base = eval_dynamic(m, p, l, j);
    std::size_t const k = rng() % n;
    auto q = p;
    q[k] = q[k] > 190. ? q[k] - 20. : q[k] + 20.;
    auto const moved = eval_dynamic(m, q, l, j);
    for (std::size_t i = 0; i < n; ++i)
      if (i != k && i != k + 1)
        CHECK(moved[i] == base[i]);
    CHECK(moved[k] != base[k]);
  }
}

TEST_CASE("property: static model decreases toward c_inf")
{
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 2000.), ur(0.5, 10.), ul(0., 4.);
  for (int trial = 0; trial < 1000; ++trial)
  {
    ExpFit const f{u(rng), u(rng), ur(rng), 0., 0., 0.};
    // Lengths up to 8 r, where the decay is still above double resolution.
    double const a = ul(rng) * f.r, b = a + (0.01 + ul(rng)) * f.r;
    CHECK(eval_static(f, a) > eval_static(f, b));
    CHECK(eval_static(f, b) >= f.c_inf);
  }
}

TEST_CASE("fit_exponential recovers noiseless data")
{
  ExpFit const truth{1240., 1132., 6., 0., 0., 0.};
  auto const s = decay_samples(truth, 2, 0., 0);
  auto const f = fit_exponential(s);
  CHECK(close_rel(f.c_inf, 1240., 1e-6));
  CHECK(close_rel(f.delta_c, 1132., 1e-6));
  CHECK(close_rel(f.r, 6., 1e-6));
  CHECK(f.rmse < 1e-6);
  CHECK(f.r2 == doctest::Approx(1.));
  auto const again = fit_exponential(s);
  CHECK(again.c_inf == f.c_inf);
  CHECK(again.r == f.r);
}

TEST_CASE("fit_exponential under noise, 100 seeds")
{
  ExpFit const truth{1240., 1132., 6., 0., 0., 0.};
  int good = 0;
  // 7500 samples: about one chunk of five layers at 2 kHz.
  for (std::uint64_t seed = 0; seed < 100; ++seed)
  {
    auto const f = fit_exponential(decay_samples(truth, 1250, 175., seed));
    bool const ok = close_rel(f.c_inf, 1240., 0.1) && close_rel(f.delta_c, 1132., 0.1) &&
                    close_rel(f.r, 6., 0.1) && f.rmse >= 140. && f.rmse <= 210.;
    good += ok ? 1 : 0;
  }
  CHECK(good >= 90);
}

TEST_CASE("fit_exponential input errors")
{
  std::vector<FitSample> same(20, FitSample{4., 1500.});
  CHECK_THROWS_WITH_AS(fit_exponential(same), doctest::Contains("degenerate length spread"),
                       IdentificationError);
  std::vector<FitSample> few(9, FitSample{4., 1500.});
  few[0].length = 20.;
  CHECK_THROWS_AS(fit_exponential(few), IdentificationError);
}

TEST_CASE("fit_power_model recovers 48 noiseless fits")
{
  auto const r = fit_power_model(coefficient_sets());
  auto const d = PowerModel::nominal();
  CHECK(close_rel(r.model.c_inf_slope, d.c_inf_slope, 1e-6));
  CHECK(close_rel(r.model.c_inf_intercept, d.c_inf_intercept, 1e-6));
  CHECK(close_rel(r.model.dc_quad, d.dc_quad, 1e-6));
  CHECK(close_rel(r.model.dc_lin, d.dc_lin, 1e-6));
  CHECK(close_rel(r.model.dc_intercept, d.dc_intercept, 1e-6));
  CHECK(close_rel(r.model.r_slope, d.r_slope, 1e-6));
  CHECK(r.c_inf.rejected.empty());
  CHECK(r.delta_c.coefficients.size() == 3);
  CHECK(r.r.coefficients.size() == 1);
}

TEST_CASE("fit_power_model drops an injected outlier")
{
  auto fits = coefficient_sets();
  fits[17].delta_c *= 10.;
  auto const r = fit_power_model(fits);
  auto const d = PowerModel::nominal();
  CHECK(std::find(r.delta_c.rejected.begin(), r.delta_c.rejected.end(), 17u) !=
        r.delta_c.rejected.end());
  CHECK(close_rel(r.model.dc_quad, d.dc_quad, 0.01));
  CHECK(close_rel(r.model.dc_lin, d.dc_lin, 0.01));
  CHECK(close_rel(r.model.dc_intercept, d.dc_intercept, 0.01));
  CHECK(close_rel(r.model.c_inf_slope, d.c_inf_slope, 0.01));
  CHECK(close_rel(r.model.r_slope, d.r_slope, 0.01));
}

TEST_CASE("fit_power_model needs three power levels")
{
  auto fits = coefficient_sets();
  fits.erase(fits.begin() + 24, fits.end());
  CHECK_THROWS_AS(fit_power_model(fits), IdentificationError);
}

TEST_CASE("power model JSON round trip")
{
  auto const d = PowerModel::nominal();
  auto const back = parse_power_model(write_power_model(d));
  CHECK(back.c_inf_slope == d.c_inf_slope);
  CHECK(back.c_inf_intercept == d.c_inf_intercept);
  CHECK(back.dc_quad == d.dc_quad);
  CHECK(back.dc_lin == d.dc_lin);
  CHECK(back.dc_intercept == d.dc_intercept);
  CHECK(back.r_slope == d.r_slope);
  CHECK_THROWS_AS(parse_power_model("{\"c_inf_slope\": 1}"), ParseError);
  CHECK_THROWS_AS(parse_power_model("not json"), ParseError);
}

TEST_CASE("median_filter examples")
{
  std::vector<double> const flat(9, 3.5);
  CHECK(median_filter(flat, 5) == flat);
  std::vector<double> const spike{0., 0., 100., 0., 0.};
  CHECK(median_filter(spike, 3) == std::vector<double>(5, 0.));
  std::vector<double> ramp;
  for (int i = 1; i <= 10; ++i)
    ramp.push_back(i);
  // Truncated end windows {1,2} and {9,10}.
  std::vector<double> const expect{1.5, 2., 3., 4., 5., 6., 7., 8., 9., 9.5};
  CHECK(median_filter(ramp, 3) == expect);
  CHECK(median_filter(ramp, 2) == expect);
  CHECK(median_filter(std::vector<double>{}, 5).empty());
  CHECK_THROWS_AS(median_filter(ramp, 1), InvalidArgument);
}

TEST_CASE("property: median_filter fixes monotone sequences away from the ends")
{
  std::mt19937_64 rng(2);
  std::exponential_distribution<double> step(1.);
  for (int trial = 0; trial < 50; ++trial)
  {
    std::vector<double> x{0.};
    for (int i = 0; i < 400; ++i)
      x.push_back(x.back() + (rng() % 4 == 0 ? 0. : step(rng)));
    int const w = 3 + 2 * static_cast<int>(rng() % 40);
    auto const y = median_filter(x, w);
    auto const z = median_filter(y, w);
    for (std::size_t i = w; i + w < x.size(); ++i)
    {
      CHECK(y[i] == x[i]);
      CHECK(z[i] == y[i]);
    }
  }
}

TEST_CASE("fit_metrics")
{
  std::vector<double> const o{1., 5., 2., 8.};
  auto const same = fit_metrics(o, o);
  CHECK(same.rmse == 0.);
  CHECK(*same.r2 == 1.);
  std::vector<double> const mean(4, 4.);
  CHECK(*fit_metrics(o, mean).r2 == doctest::Approx(0.).epsilon(1e-15));
  std::vector<double> const a{0., 2.}, b{1., 1.};
  auto const m = fit_metrics(a, b);
  CHECK(m.rmse == doctest::Approx(1.));
  CHECK(*m.r2 == doctest::Approx(0.));
  std::vector<double> const c{3., 3.};
  CHECK_FALSE(fit_metrics(c, b).r2.has_value());
  CHECK_THROWS_AS(fit_metrics(a, o), InvalidArgument);
  CHECK_THROWS_AS(fit_metrics(std::vector<double>{}, std::vector<double>{}), InvalidArgument);
}

TEST_CASE("trend_sigma")
{
  std::vector<double> const flat(300, 1500.);
  CHECK(trend_sigma(flat) == 0.);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(1500., 175.);
  std::vector<double> x(1500);
  for (auto &v : x)
    v = noise(rng);
  CHECK(trend_sigma(x) < 35.);
  CHECK_THROWS_AS(trend_sigma(std::vector<double>(149, 1.)), InvalidArgument);
}
