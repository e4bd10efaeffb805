/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include <lpbf/svg.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <limits>

namespace lpbf::svg
{
namespace
{
constexpr double width = 640.;
constexpr double height = 480.;
constexpr double margin = 60.;

std::string escape(std::string const &text)
{
  std::string out;
  for (char c : text)
  {
    switch (c)
    {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    default: out += c;
    }
  }
  return out;
}

// Blue to red through white-ish yellow; t in [0, 1].
std::string ramp(double t)
{
  t = std::clamp(t, 0., 1.);
  int const r = static_cast<int>(255. * std::min(1., 2. * t));
  int const g = static_cast<int>(255. * (1. - std::abs(2. * t - 1.)));
  int const b = static_cast<int>(255. * std::min(1., 2. * (1. - t)));
  return fmt::format("#{:02x}{:02x}{:02x}", r, g, b);
}

std::string header(std::string const &title)
{
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n<rect width=\"100%\" height=\"100%\" "
      "fill=\"white\"/>\n<text x=\"{2}\" y=\"24\" font-size=\"16\" "
      "font-family=\"sans-serif\">{3}</text>\n",
      width, height, margin, escape(title));
}
} // namespace

std::string spatial_map(std::vector<SignalSample> const &samples,
                        std::string const &title)
{
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  int cmin = std::numeric_limits<int>::max();
  int cmax = std::numeric_limits<int>::min();
  for (auto const &s : samples)
  {
    if (!s.line_index)
      continue;
    xmin = std::min(xmin, s.pos.x);
    xmax = std::max(xmax, s.pos.x);
    ymin = std::min(ymin, s.pos.y);
    ymax = std::max(ymax, s.pos.y);
    cmin = std::min(cmin, s.c1);
    cmax = std::max(cmax, s.c1);
  }
  std::string out = header(title);
  if (cmin > cmax)
    return out + "</svg>\n";
  double const plot = std::min(width - 2. * margin - 80., height - 2. * margin);
  double const extent = std::max({xmax - xmin, ymax - ymin, 1e-9});
  double const scale = plot / extent;
  for (auto const &s : samples)
  {
    if (!s.line_index)
      continue;
    double const px = margin + (s.pos.x - xmin) * scale;
    double const py = height - margin - (s.pos.y - ymin) * scale;
    double const t = cmax > cmin ? static_cast<double>(s.c1 - cmin) / (cmax - cmin) : 0.5;
    out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"1.5\" fill=\"{}\"/>\n",
                       px, py, ramp(t));
  }
  // Legend: linear color bar with the data range.
  double const bx = width - margin - 20.;
  for (int i = 0; i < 100; ++i)
    out += fmt::format(
        "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"16\" height=\"3.2\" fill=\"{}\"/>\n",
        bx, height - margin - 3.2 * (i + 1), ramp(i / 99.));
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\" "
                     "font-family=\"sans-serif\">max {}</text>\n",
                     bx - 40., height - margin - 325., cmax);
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\" "
                     "font-family=\"sans-serif\">min {}</text>\n",
                     bx - 40., height - margin + 14., cmin);
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" "
                     "font-family=\"sans-serif\">C1 [px], x/y span {:.3f} mm</text>\n",
                     margin, height - 20., extent);
  return out + "</svg>\n";
}

std::string line_plot(std::vector<Series> const &series, std::string const &title,
                      std::string const &y_label)
{
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -vmin;
  std::size_t nmax = 0;
  for (auto const &s : series)
  {
    for (double v : s.values)
    {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    nmax = std::max(nmax, s.values.size());
  }
  std::string out = header(title);
  if (nmax < 2)
    return out + "</svg>\n";
  if (vmax <= vmin)
    vmax = vmin + 1.;
  double const pw = width - 2. * margin;
  double const ph = height - 2. * margin;
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" "
                     "fill=\"none\" stroke=\"black\"/>\n",
                     margin, margin, pw, ph);
  int row = 0;
  for (auto const &s : series)
  {
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1\" points=\"",
                       s.color);
    for (std::size_t i = 0; i < s.values.size(); ++i)
    {
      double const x = margin + pw * static_cast<double>(i) / static_cast<double>(nmax - 1);
      double const y = margin + ph * (1. - (s.values[i] - vmin) / (vmax - vmin));
      out += fmt::format("{:.2f},{:.2f} ", x, y);
    }
    out += "\"/>\n";
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{}\" "
                       "font-family=\"sans-serif\">{}</text>\n",
                       margin + 10., margin + 16. + 14. * row++, s.color,
                       escape(s.label));
  }
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" "
                     "font-family=\"sans-serif\">{:.1f}</text>\n",
                     4., margin + 4., vmax);
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" "
                     "font-family=\"sans-serif\">{:.1f}</text>\n",
                     4., height - margin, vmin);
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" "
                     "font-family=\"sans-serif\">{} vs sample index</text>\n",
                     margin, height - 20., escape(y_label));
  return out + "</svg>\n";
}
} // namespace lpbf::svg
