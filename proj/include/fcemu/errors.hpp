#pragma once

#include <stdexcept>
#include <string>

namespace fcemu {

// Invalid input or violated model constraint. The CLI maps this to exit code 2.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: integrator breakdown, failed consistency audit. Exit code 3.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// An iterative procedure did not converge within its budget. Exit code 4.
class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fcemu
