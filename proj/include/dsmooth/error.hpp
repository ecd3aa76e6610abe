#pragma once

#include <stdexcept>
#include <string>

namespace dsmooth {

// Bad input shape, grid mismatch or an argument outside its documented range.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A time integration that had to stop: the norm guard tripped or a NaN appeared.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double time)
        : std::runtime_error(what + " at t=" + std::to_string(time)), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

inline void require(bool ok, const std::string& msg)
{
    if (!ok) throw ValidationError(msg);
}

} // namespace dsmooth
