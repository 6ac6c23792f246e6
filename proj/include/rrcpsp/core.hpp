#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/rational.hpp>

namespace rrcpsp {

using ActivityId = std::size_t;
using Time = std::int64_t;
using Rational = boost::rational<std::int64_t>;

// Value of an unreachable longest-path state.
inline constexpr Time kUnreachable = std::numeric_limits<Time>::min();

struct Arc {
  ActivityId from = 0;
  ActivityId to = 0;
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

inline std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

// Error hierarchy. Everything thrown by the library derives from Error so the
// CLI can map domain failures to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string section, const std::string& what)
      : Error("line " + std::to_string(line) + " [" + section + "]: " + what),
        line_(line),
        section_(std::move(section)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& section() const noexcept { return section_; }

 private:
  std::size_t line_;
  std::string section_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class CycleError : public Error {
 public:
  using Error::Error;
};

// An input exceeds a configured enumeration cap.
class RefusalError : public Error {
 public:
  using Error::Error;
};

class InvalidHorizonError : public Error {
 public:
  using Error::Error;
};

}  // namespace rrcpsp
