#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace onda {

/// Base class for every error raised by the onda core.
class Error : public std::runtime_error
{
  public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code))
    {
    }

    /// Stable short token, e.g. "PARSE", "VERSION", "EMIT_UNSUPPORTED_CYCLE".
    const std::string& code() const noexcept { return code_; }

  private:
    std::string code_;
};

/// Malformed input text (JSON or DSL). Line and column are 1-based; 0 when unknown.
class ParseError : public Error
{
  public:
    ParseError(std::string code, const std::string& message, std::size_t line = 0, std::size_t column = 0,
               std::string pointer = {})
        : Error(std::move(code), message), line_(line), column_(column), pointer_(std::move(pointer))
    {
    }

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    /// JSON pointer of the offending value for schema violations.
    const std::string& pointer() const noexcept { return pointer_; }

  private:
    std::size_t line_;
    std::size_t column_;
    std::string pointer_;
};

/// A project document declares a format_version newer than this build supports.
class VersionError : public Error
{
  public:
    VersionError(long long found, int supported)
        : Error("VERSION", "unsupported format_version " + std::to_string(found) + " (supported maximum " +
                               std::to_string(supported) + ")"),
          found_(found), supported_(supported)
    {
    }

    long long found() const noexcept { return found_; }
    int supported() const noexcept { return supported_; }

  private:
    long long found_;
    int supported_;
};

/// Caller broke an operation's precondition (e.g. transform on an invalid diagram).
class ContractError : public Error
{
  public:
    explicit ContractError(const std::string& message) : Error("CONTRACT", message) {}
};

class LookupError : public Error
{
  public:
    explicit LookupError(const std::string& message) : Error("LOOKUP", message) {}
};

} // namespace onda
