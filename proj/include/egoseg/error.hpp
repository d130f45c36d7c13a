#pragma once

#include <stdexcept>
#include <string>

namespace egoseg {

/// Raised when an input value or file violates a documented contract.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A concept tag that the similarity provider knows nothing about.
class UnknownTagError : public ValidationError {
public:
    explicit UnknownTagError(const std::string& tag)
        : ValidationError("unknown tag: '" + tag + "' has no meanings"), tag_(tag) {}

    const std::string& tag() const noexcept { return tag_; }

private:
    std::string tag_;
};

/// Wraps an error raised inside one pipeline stage, keeping the stage name.
class StageError : public ValidationError {
public:
    StageError(std::string stage, const std::string& what)
        : ValidationError("[" + stage + "] " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace egoseg
