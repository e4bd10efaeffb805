/* SPDX-FileCopyrightText: Copyright (c) 2026, the lpbf-ff authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef LPBF_ERROR_HPP
#define LPBF_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lpbf
{
/**
 * Base class of every error thrown by the library. The subclasses map onto
 * the exit codes of the command line tool.
 */
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (scan files, polygon files, CSVs, model files).
class ParseError : public Error
{
public:
  ParseError(std::size_t line, std::string const &what)
      : Error("line " + std::to_string(line) + ": " + what), _line(line)
  {
  }

  /// 1-based line number of the offending record, 0 if not line related.
  std::size_t line() const { return _line; }

private:
  std::size_t _line;
};

/// Degenerate polygons, empty scans, hatching that covers nothing.
class GeometryError : public Error
{
public:
  using Error::Error;
};

/// Arguments that violate a precondition (ranges, mismatched lengths).
class InvalidArgument : public Error
{
public:
  using Error::Error;
};

/// Model identification failures: unidentifiable data, solver breakdown.
class IdentificationError : public Error
{
public:
  using Error::Error;
};
} // namespace lpbf

#endif
