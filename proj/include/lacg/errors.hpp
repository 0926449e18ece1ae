#pragma once

#include <stdexcept>
#include <string>

namespace lacg {

// Malformed input data (instance files, caches, snapshots).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A configuration value outside its documented domain.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// An internal invariant failed while solving; indicates a bug, not bad input.
class SolveError : public std::runtime_error {
public:
    explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lacg
