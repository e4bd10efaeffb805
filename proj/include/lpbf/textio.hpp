/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef LPBF_TEXTIO_HPP
#define LPBF_TEXTIO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small text helpers shared by the file formats.
namespace lpbf
{
/// Split on LF; a trailing CR is stripped from each line.
std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split_whitespace(std::string_view text);
std::vector<std::string_view> split_char(std::string_view text, char sep);
std::string_view trim(std::string_view text);

/// Whole-token parse; nullopt on any trailing garbage or non-finite value.
std::optional<double> parse_double(std::string_view token);
std::optional<int> parse_int(std::string_view token);

/// Fixed notation with six decimals; negative zero is printed as zero.
std::string format_fixed6(double value);

std::string read_file(std::filesystem::path const &path);
void write_file(std::filesystem::path const &path, std::string_view contents);
} // namespace lpbf

#endif
