#pragma once

#include <stdexcept>
#include <string>

namespace pathhjb {

/// Input or model rejected before any computation ran (CLI exit code 2).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Requested computation exceeds a configured resource guardrail (CLI exit code 3).
class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace pathhjb
