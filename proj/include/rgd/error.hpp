#pragma once

#include <stdexcept>
#include <string>

namespace rgd {

/// Invalid input: malformed files, bad indices, violated preconditions.
class ValidationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Text parse failure, carrying the 1-based line number.
class ParseError : public ValidationError
{
public:
    ParseError(const std::string& what, std::size_t line)
        : ValidationError(what + " (line " + std::to_string(line) + ")")
        , m_line(line)
    {}

    std::size_t line() const { return m_line; }

private:
    std::size_t m_line;
};

/// A linear system that should be positive definite was not.
class FactorizationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace rgd
