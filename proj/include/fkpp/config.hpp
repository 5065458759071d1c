#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "fkpp/error.hpp"
#include "fkpp/model.hpp"
#include "fkpp/pde.hpp"

namespace fkpp {

/// Parse failure with the 1-based line it occurred on.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + reason),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

using ConfigValue = std::variant<double, bool>;

/**
 * Sectioned key/value settings. Sections and keys are checked against a
 * fixed vocabulary at parse time; presence and ranges are checked when a
 * subcommand reads them.
 */
class ExperimentConfig {
 public:
  void set(const std::string& section, const std::string& key, ConfigValue value);
  bool has(const std::string& section, const std::string& key) const;

  /// Throws MissingKey when absent and InvalidConfig on a type mismatch.
  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;
  /// Whole, nonnegative number.
  std::size_t count(const std::string& section, const std::string& key) const;
  std::size_t count_or(const std::string& section, const std::string& key,
                       std::size_t fallback) const;
  bool flag_or(const std::string& section, const std::string& key, bool fallback) const;

  /// Validated model; A, B and K default to 1.
  ModelParams model() const;
  Grid1D grid() const;
  /// Solver settings over SolverConfig defaults, validated.
  SolverConfig solver() const;

 private:
  const ConfigValue* find(const std::string& section, const std::string& key) const;

  std::map<std::string, std::map<std::string, ConfigValue>> values_;
};

/**
 * Line-oriented grammar:
 *   [section]            one of model, grid, solver, experiment
 *   key = value          number (decimal, optional exponent) or true/false
 *   # comment            anywhere on a line
 */
ExperimentConfig parse_config(std::string_view text);

}  // namespace fkpp
