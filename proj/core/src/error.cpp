#include "eisp/error.hpp"

#include <atomic>
#include <cstdio>

namespace eisp {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_argument: return "invalid-argument";
        case Errc::invalid_geometry: return "invalid-geometry";
        case Errc::numerical_failure: return "numerical-failure";
        case Errc::generation_failure: return "generation-failure";
        case Errc::format_error: return "format-error";
        case Errc::contract_violation: return "contract-violation";
        case Errc::training_failure: return "training-failure";
        case Errc::degenerate_input: return "degenerate-input";
        case Errc::io_error: return "io-error";
        case Errc::config_error: return "config-error";
    }
    return "unknown";
}

namespace {

void stderr_handler(std::string_view message) {
    std::fprintf(stderr, "warning: %.*s\n", static_cast<int>(message.size()), message.data());
}

std::atomic<WarningHandler> warning_handler{&stderr_handler};

}  // namespace

void set_warning_handler(WarningHandler handler) noexcept {
    warning_handler.store(handler ? handler : &stderr_handler);
}

void warn(std::string_view message) { warning_handler.load()(message); }

}  // namespace eisp
