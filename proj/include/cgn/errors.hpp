#ifndef CGN_ERRORS_HPP
#define CGN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cgn {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A caller broke an API precondition (bad dimensions, out-of-range value, ...).
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& msg) : Error(msg) {}
};

// A mathematical-domain failure (non-positive variance, singular scale, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

// A quantity that should be numerically well behaved was not (non-PD posterior
// scale and the like). Carries diagnostics in the message.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// Malformed input file; the message names the offending line.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace cgn

#endif  // CGN_ERRORS_HPP
