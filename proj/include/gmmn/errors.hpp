#pragma once

#include <stdexcept>
#include <string>

namespace gmmn {

// Error categories map onto CLI exit codes: config_error -> 1,
// data_error -> 2, divergence_error -> 3.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

class divergence_error : public std::runtime_error {
public:
    explicit divergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gmmn
