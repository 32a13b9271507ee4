#pragma once

#include <stdexcept>

namespace tcat {

// Configuration problems: unreadable config, bad flags, missing referenced files.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Data-content problems: malformed records, hierarchy violations, degenerate splits.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Failures while fitting or training a model.
class TrainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tcat
