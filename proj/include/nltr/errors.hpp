#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nltr {

// Base for everything this library throws on purpose.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Bad configuration or bad argument shape (CLI exit code 2).
class config_error : public error {
public:
    explicit config_error(const std::string& what) : error(what) {}
};

// Query outside a tabulated range; message names the offending axis.
class range_error : public error {
public:
    explicit range_error(const std::string& what) : error(what) {}
};

// Mathematical precondition violated (log of nonpositive ratio, etc).
class domain_error : public error {
public:
    explicit domain_error(const std::string& what) : error(what) {}
};

// I/O failure writing or reading artifacts (CLI exit code 4).
class io_error : public error {
public:
    explicit io_error(const std::string& what) : error(what) {}
};

// A solver failed to converge (CLI exit code 3). Carries the iterate trace
// so callers can report how the residual evolved.
class non_convergence : public error {
public:
    non_convergence(const std::string& what, std::vector<double> trace)
        : error(what), trace_(std::move(trace)) {}
    const std::vector<double>& trace() const { return trace_; }

private:
    std::vector<double> trace_;
};

} // namespace nltr
