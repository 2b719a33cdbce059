#include "eisp/blob.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "eisp/error.hpp"

namespace eisp {

void append_u64_le(Bytes& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void append_u32_le(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void append_f64(Bytes& out, double v) { append_u64_le(out, std::bit_cast<std::uint64_t>(v)); }

void append_f64(Bytes& out, std::span<const double> values) {
    out.reserve(out.size() + 8 * values.size());
    for (double v : values) append_f64(out, v);
}

void append_c128(Bytes& out, std::span<const cplx> values) {
    out.reserve(out.size() + 16 * values.size());
    for (const cplx& v : values) {
        append_f64(out, v.real());
        append_f64(out, v.imag());
    }
}

void ByteReader::need(std::size_t n) const {
    if (remaining() < n) {
        fail(Errc::format_error, "truncated data: need " + std::to_string(n) + " bytes at offset " +
                                     std::to_string(pos_) + ", have " + std::to_string(remaining()));
    }
}

std::uint64_t ByteReader::u64_le() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
}

std::uint32_t ByteReader::u32_le() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
}

std::uint32_t ByteReader::u32_be() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64_le()); }

void ByteReader::f64(std::span<double> out) {
    need(8 * out.size());
    for (double& v : out) v = f64();
}

void ByteReader::c128(std::span<cplx> out) {
    need(16 * out.size());
    for (cplx& v : out) {
        const double re = f64();
        const double im = f64();
        v = {re, im};
    }
}

std::span<const std::uint8_t> ByteReader::take(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io_error, "cannot open " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail(Errc::io_error, "read failed: " + path.string());
    return data;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io_error, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(Errc::io_error, "write failed: " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_text(const std::filesystem::path& path) {
    const Bytes b = read_file(path);
    return {b.begin(), b.end()};
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

}  // namespace eisp
