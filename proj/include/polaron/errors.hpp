#pragma once

#include <stdexcept>
#include <string>

namespace polaron {

// Bad or inconsistent user input; CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A solver or consistency check failed; CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace polaron
