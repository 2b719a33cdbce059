#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eisp {

enum class Errc {
    invalid_argument,
    invalid_geometry,
    numerical_failure,
    generation_failure,
    format_error,
    contract_violation,
    training_failure,
    degenerate_input,
    io_error,
    config_error,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the `Errc` kinds so
/// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, Errc code, const std::string& what) {
    if (!condition) fail(code, what);
}

/// Non-fatal diagnostics. The default handler writes to stderr; the CLI routes them to its log.
using WarningHandler = void (*)(std::string_view message);
void set_warning_handler(WarningHandler handler) noexcept;
void warn(std::string_view message);

}  // namespace eisp
