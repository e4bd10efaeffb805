/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include <lpbf/error.hpp>
#include <lpbf/textio.hpp>

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lpbf
{
std::vector<std::string_view> split_lines(std::string_view text)
{
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size())
  {
    std::size_t const eol = text.find('\n', pos);
    std::size_t const end = eol == std::string_view::npos ? text.size() : eol;
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    lines.push_back(line);
    if (eol == std::string_view::npos)
      break;
    pos = eol + 1;
  }
  return lines;
}

std::vector<std::string_view> split_whitespace(std::string_view text)
{
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  auto is_space = [](char c)
  { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
  while (pos < text.size())
  {
    while (pos < text.size() && is_space(text[pos]))
      ++pos;
    std::size_t const start = pos;
    while (pos < text.size() && !is_space(text[pos]))
      ++pos;
    if (pos > start)
      tokens.push_back(text.substr(start, pos - start));
  }
  return tokens;
}

std::vector<std::string_view> split_char(std::string_view text, char sep)
{
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true)
  {
    std::size_t const next = text.find(sep, pos);
    if (next == std::string_view::npos)
    {
      fields.push_back(text.substr(pos));
      break;
    }
    fields.push_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
  return fields;
}

std::string_view trim(std::string_view text)
{
  auto const first = text.find_first_not_of(" \t\r\v\f");
  if (first == std::string_view::npos)
    return {};
  auto const last = text.find_last_not_of(" \t\r\v\f");
  return text.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view token)
{
  if (!token.empty() && token.front() == '+')
    token.remove_prefix(1);
  double value = 0.;
  auto const [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty() ||
      !std::isfinite(value))
    return std::nullopt;
  return value;
}

std::optional<int> parse_int(std::string_view token)
{
  if (!token.empty() && token.front() == '+')
    token.remove_prefix(1);
  int value = 0;
  auto const [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty())
    return std::nullopt;
  return value;
}

std::string format_fixed6(double value)
{
  std::string s = fmt::format("{:.6f}", value);
  if (s == "-0.000000")
    s.erase(0, 1);
  return s;
}

std::string read_file(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ParseError(0, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(std::filesystem::path const &path, std::string_view contents)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw InvalidArgument("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out)
    throw InvalidArgument("failed writing " + path.string());
}
} // namespace lpbf
