#pragma once

#include <stdexcept>
#include <string>

namespace uralab {

/// A structurally valid request that names an infeasible or inconsistent
/// configuration (budget exceeded, invariant violated, table out of range).
/// The command-line driver maps this to exit code 3.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input: unparseable JSON/CSV, unknown fields, missing files,
/// bad command-line usage. The command-line driver maps this to exit code 2.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace uralab
