#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfde {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation or numeric stencil outside the admissible t-domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Characteristic roots could not be found or did not validate.
class RootFindingError : public Error {
public:
    using Error::Error;
};

/// The symbolic Wronskian did not collapse to a single exponential term.
class WronskianError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double estimate)
        : Error(what), estimate_(estimate) {}
    double estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

/// Syntax or semantic error in equation source text.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset,
               std::vector<std::string> expected = {});

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string message_;
    std::size_t offset_;
    std::vector<std::string> expected_;
};

}  // namespace cfde
