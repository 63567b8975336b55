// Error taxonomy shared by the library, the C API and the CLI.
#pragma once

#include <stdexcept>
#include <string>

namespace kdv {

enum class ErrorCode {
    validation,   // bad arguments, mismatched grids, malformed config values
    index,        // mode index out of range
    domain,       // parameter outside the admissible domain (gamma <= 0, ...)
    capability,   // requested feature deliberately unsupported (I_m, m >= 3)
    config,       // configuration inconsistent with the requested experiment
    blowup,       // non-finite state during time integration
    io,           // file system failures
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

class BlowupError : public Error {
  public:
    BlowupError(long step, double time, const std::string& what)
        : Error(ErrorCode::blowup, what), step_(step), time_(time) {}
    long step() const { return step_; }
    double time() const { return time_; }

  private:
    long step_;
    double time_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace kdv
