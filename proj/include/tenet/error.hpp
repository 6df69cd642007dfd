#pragma once

#include <stdexcept>
#include <string>

namespace tenet {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};

}  // namespace tenet
