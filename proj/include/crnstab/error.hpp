#pragma once

#include <stdexcept>
#include <string>

namespace crnstab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Network text syntax/validation error with 1-based source position.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error(msg + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line(line), column(column) {}
    int line;
    int column;
};

class SimulationError : public Error {
public:
    enum class Kind { positivity_lost, nonfinite, bad_argument };
    SimulationError(Kind k, const std::string& msg, double t = 0.0)
        : Error(msg), kind(k), time(t) {}
    Kind kind;
    double time;
};

}  // namespace crnstab
