#pragma once

#include <stdexcept>

namespace logitac {

// Configuration problems (bad config file, missing potential, unknown builtin
// name). Domain and contract violations use std::invalid_argument.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace logitac
