#ifndef MELAB_ERRORS_HPP
#define MELAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace melab {

// Base type for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input documents (spec files, measure files, roof files).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

// A stated precondition does not hold (caller error, refusable request).
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(what) {}
};

// An iterative scheme stalled or a numeric budget was exhausted.
// Never swallowed: callers either handle it or let it surface.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what) {}
};

}  // namespace melab

#endif  // MELAB_ERRORS_HPP
