#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace porehom {

/// Invalid user input: bad configuration, geometry parameters, file contents.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical solve failed. Carries the residual history when there is one.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what, std::vector<double> residuals = {})
        : std::runtime_error(what), residuals_(std::move(residuals))
    {
    }

    const std::vector<double>& residuals() const { return residuals_; }

private:
    std::vector<double> residuals_;
};

}  // namespace porehom
