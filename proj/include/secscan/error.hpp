// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace secscan {

/// Base of every error raised by the library. `kind()` names the failure
/// class so callers (and the CLI) can map errors without RTTI chains.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& what)
      : Error("SyntaxError", std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

#define SECSCAN_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(#Name, what) {}      \
  }

SECSCAN_DEFINE_ERROR(CycleError);
SECSCAN_DEFINE_ERROR(UndefinedNet);
SECSCAN_DEFINE_ERROR(DuplicateNet);
SECSCAN_DEFINE_ERROR(ArityError);
SECSCAN_DEFINE_ERROR(MissingAssignment);
SECSCAN_DEFINE_ERROR(UnknownNet);
SECSCAN_DEFINE_ERROR(TooManyKeys);
SECSCAN_DEFINE_ERROR(KeyLengthMismatch);
SECSCAN_DEFINE_ERROR(SignatureMismatch);
SECSCAN_DEFINE_ERROR(NoStateElements);
SECSCAN_DEFINE_ERROR(InvalidPins);
SECSCAN_DEFINE_ERROR(UnsupportedForArch);
SECSCAN_DEFINE_ERROR(Unsatisfiable);
SECSCAN_DEFINE_ERROR(IterationLimit);
SECSCAN_DEFINE_ERROR(TooLarge);
SECSCAN_DEFINE_ERROR(WindowNotFound);
SECSCAN_DEFINE_ERROR(BlockedScanOut);
SECSCAN_DEFINE_ERROR(InvalidArgument);
SECSCAN_DEFINE_ERROR(FormatError);

#undef SECSCAN_DEFINE_ERROR

}  // namespace secscan
