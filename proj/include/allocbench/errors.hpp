#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace allocbench {

// Invalid arguments are reported with std::invalid_argument throughout; the
// types below cover the domain-specific failure modes callers may want to
// distinguish.

/// A column with zero variance cannot be standardized.
class DegenerateColumnError : public std::runtime_error {
public:
    DegenerateColumnError(std::size_t index, const std::string& name)
        : std::runtime_error("degenerate column " + name + " (index " + std::to_string(index) +
                             "): zero variance"),
          index_(index),
          name_(name) {}
    std::size_t index() const noexcept { return index_; }
    const std::string& name() const noexcept { return name_; }

private:
    std::size_t index_;
    std::string name_;
};

/// Binary classifier asked to fit a single class.
class DegenerateLabelsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One treatment arm has too few units for the requested fit.
class InsufficientArmError : public std::runtime_error {
public:
    InsufficientArmError(const std::string& arm, std::size_t size, std::size_t required)
        : std::runtime_error("insufficient " + arm + " arm: " + std::to_string(size) +
                             " units, need at least " + std::to_string(required)),
          arm_(arm) {}
    const std::string& arm() const noexcept { return arm_; }

private:
    std::string arm_;
};

/// Every shift weight is zero, so no resampling distribution exists.
class AllZeroWeightsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition on its input's state.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Configuration problem tied to one field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Malformed text input; `line` is 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace allocbench
