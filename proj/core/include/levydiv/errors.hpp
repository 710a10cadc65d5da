#pragma once

#include <stdexcept>
#include <string>

namespace levydiv {

// Malformed model input (bad JSON, unsorted rates, weights not summing to 1).
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A standing assumption of the theory fails for this model or multiplier.
class AssumptionViolated : public std::runtime_error {
public:
    AssumptionViolated(std::string name, const std::string& detail)
        : std::runtime_error("assumption violated [" + name + "]: " + detail),
          name_(std::move(name)) {}
    const std::string& assumption() const noexcept { return name_; }

private:
    std::string name_;
};

class MultipleRootError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Numerical breakdown: a result that the theory guarantees did not come out.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

namespace assumption {
inline constexpr const char* ceiling_below_drift = "ceiling-rate-below-drift";
inline constexpr const char* positive_terminal_rate = "q*Lambda+delta>0";
inline constexpr const char* not_monotone = "paths-not-monotone";
}  // namespace assumption

}  // namespace levydiv
