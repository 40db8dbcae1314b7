#pragma once

#include <stdexcept>
#include <string>

namespace rcd {

// Every failure the library reports is an rcd::Error carrying one of these
// kinds, so callers (the CLI in particular) can map them to exit codes.
class Error : public std::runtime_error {
 public:
  enum class Kind {
    kDimension,
    kInvalidArgument,
    kInfeasible,
    kUnbounded,
    kUnsupported,
    kParse,
    kInternal,
  };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Parse errors also carry the offending 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(Kind::kParse, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rcd
