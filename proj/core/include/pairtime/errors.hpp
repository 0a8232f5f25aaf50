#pragma once

#include <stdexcept>
#include <string>

namespace pairtime {

// Invalid scenario description (bad config file, bad spec field, empty bands).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Peak fitting could not produce a result (no peak, too few usable bins).
class FitError : public std::runtime_error {
public:
    explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pairtime
