#ifndef DISP_ERRORS_HPP
#define DISP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace disp {

// Invalid parameters, grid sizes, config files, preset names.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside its admissible interval (history time, delay coverage).
class RangeError : public std::runtime_error {
public:
    explicit RangeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-contiguous time stamp pushed into the history ring.
class SequenceError : public std::runtime_error {
public:
    explicit SequenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// A closed-form constant was requested outside its hypotheses.
class HypothesisError : public std::runtime_error {
public:
    explicit HypothesisError(const std::string& msg) : std::runtime_error(msg) {}
};

// Linear-algebra breakdown (singular pivot, non-finite factorization).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace disp

#endif
