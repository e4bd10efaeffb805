/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef LPBF_SVG_HPP
#define LPBF_SVG_HPP

#include <lpbf/coax.hpp>

#include <string>
#include <vector>

namespace lpbf::svg
{
/// One marker per on-line sample at its nominal position, colored linearly
/// in C1 between the stated minimum and maximum.
std::string spatial_map(std::vector<SignalSample> const &samples,
                        std::string const &title);

struct Series
{
  std::string label;
  std::string color;
  std::vector<double> values;
};

/// Polylines over the sample index.
std::string line_plot(std::vector<Series> const &series, std::string const &title,
                      std::string const &y_label);
} // namespace lpbf::svg

#endif
