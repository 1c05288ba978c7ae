#pragma once

#include <stdexcept>
#include <string>

namespace rplab {

struct InvalidInput : std::invalid_argument {
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, long line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line(line) {}
    long line;
};

struct EmptyConditional : std::runtime_error {
    explicit EmptyConditional(const std::string& what) : std::runtime_error(what) {}
};

struct FitUndefined : std::runtime_error {
    explicit FitUndefined(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rplab
