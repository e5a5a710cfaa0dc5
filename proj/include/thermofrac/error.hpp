#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace thermofrac {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed mesh input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  enum class Kind { UnsupportedVersion, MissingSection, DanglingReference, Syntax };

  ParseError(Kind kind, std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), kind_(kind), line_(line) {}

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Schema violation in a run configuration; `path()` is the dotted key path.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Factorization or linear solve failure.
class SolveError : public Error {
 public:
  using Error::Error;
};

}  // namespace thermofrac
