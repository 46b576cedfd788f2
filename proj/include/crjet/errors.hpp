#ifndef CRJET_ERRORS_HPP
#define CRJET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace crjet {

enum class ErrorKind {
  input,            // malformed or inconsistent caller data
  precondition,     // a documented precondition does not hold
  rank,             // an exact rank condition failed (singular block, no immersion)
  retry_exhausted,  // randomized sampling ran out of attempts
  unsupported,      // outside the exactly solvable class (see message)
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace crjet

#endif  // CRJET_ERRORS_HPP
