#pragma once

#include <stdexcept>
#include <string>

namespace nmpz {

// Error categories map onto the CLI exit codes (1, 2, 3).
enum class ErrorKind { Input = 1, Numerical = 2, Verification = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_input(const std::string& msg) { throw Error(ErrorKind::Input, msg); }
[[noreturn]] inline void fail_numerical(const std::string& msg) { throw Error(ErrorKind::Numerical, msg); }
[[noreturn]] inline void fail_verification(const std::string& msg) { throw Error(ErrorKind::Verification, msg); }

} // namespace nmpz
