#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "eisp/types.hpp"

namespace eisp {

using Bytes = std::vector<std::uint8_t>;

// Little-endian IEEE-754 binary64 packing. Complex values are interleaved (re, im).
void append_f64(Bytes& out, double v);
void append_f64(Bytes& out, std::span<const double> values);
void append_c128(Bytes& out, std::span<const cplx> values);
void append_u32_le(Bytes& out, std::uint32_t v);
void append_u64_le(Bytes& out, std::uint64_t v);

/// Sequential reader over a byte buffer; every overrun is a format-error.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    double f64();
    void f64(std::span<double> out);
    void c128(std::span<cplx> out);
    std::uint32_t u32_le();
    std::uint64_t u64_le();
    std::uint32_t u32_be();
    std::span<const std::uint8_t> take(std::size_t n);

    [[nodiscard]] std::size_t position() const noexcept { return pos_; }
    [[nodiscard]] std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const;

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_{0};
};

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly v; "inf", "-inf" and "nan" otherwise.
std::string format_real(double v);

}  // namespace eisp
