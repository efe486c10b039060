#pragma once

#include <stdexcept>
#include <string>

namespace dtsp {

// Every failure raised by the toolkit derives from Error so callers can
// catch the whole family at once.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DTSP_DEFINE_ERROR(Name) \
  class Name : public Error {   \
   public:                      \
    using Error::Error;         \
  }

DTSP_DEFINE_ERROR(DegenerateInstance);
DTSP_DEFINE_ERROR(TriangleViolation);
DTSP_DEFINE_ERROR(BadScale);
DTSP_DEFINE_ERROR(OddParity);
DTSP_DEFINE_ERROR(Disconnected);
DTSP_DEFINE_ERROR(FilterStarvation);
DTSP_DEFINE_ERROR(Infeasible);
DTSP_DEFINE_ERROR(BudgetExceeded);
DTSP_DEFINE_ERROR(DegenerateSplit);
DTSP_DEFINE_ERROR(RecursionLimit);
DTSP_DEFINE_ERROR(TooLarge);
DTSP_DEFINE_ERROR(ConfigError);

#undef DTSP_DEFINE_ERROR

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace dtsp
