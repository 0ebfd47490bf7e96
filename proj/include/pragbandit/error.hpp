#pragma once

#include <stdexcept>
#include <string>

namespace pragbandit {

// Every library failure carries a short machine-readable kind so the CLI can
// emit a structured error record.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error("invalid-argument", msg) {}
};

class EmptyPosterior : public Error {
public:
    explicit EmptyPosterior(const std::string& msg) : Error("empty-posterior", msg) {}
};

class UnknownUtterance : public Error {
public:
    explicit UnknownUtterance(const std::string& msg) : Error("unknown-utterance", msg) {}
};

class NumericalDegeneracy : public Error {
public:
    explicit NumericalDegeneracy(const std::string& msg) : Error("numerical-degeneracy", msg) {}
};

class RejectionExhausted : public Error {
public:
    explicit RejectionExhausted(const std::string& msg) : Error("rejection-exhausted", msg) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error("parse-error", msg) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error("validation-error", msg) {}
};

}  // namespace pragbandit
