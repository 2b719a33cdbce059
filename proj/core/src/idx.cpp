#include "eisp/datagen.hpp"

namespace eisp {

std::vector<ByteRaster> parse_idx(std::span<const std::uint8_t> bytes) {
    require(bytes.size() >= 16, Errc::format_error,
            "IDX header needs 16 bytes, got " + std::to_string(bytes.size()));
    ByteReader in(bytes);
    const std::uint32_t magic = in.u32_be();
    if (magic != idx3_magic) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "0x%08x", magic);
        fail(Errc::format_error, std::string("bad IDX magic ") + buf + ", expected 0x00000803");
    }
    const std::uint64_t n = in.u32_be();
    const std::uint64_t rows = in.u32_be();
    const std::uint64_t cols = in.u32_be();
    const std::uint64_t expected = n * rows * cols;
    if (in.remaining() != expected) {
        fail(Errc::format_error, "IDX payload length mismatch: expected " + std::to_string(expected) +
                                     " bytes, got " + std::to_string(in.remaining()));
    }
    std::vector<ByteRaster> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto px = in.take(rows * cols);
        out.push_back({static_cast<int>(rows), static_cast<int>(cols), {px.begin(), px.end()}});
    }
    return out;
}

Bytes write_idx(std::span<const ByteRaster> rasters) {
    const int rows = rasters.empty() ? 0 : rasters.front().rows;
    const int cols = rasters.empty() ? 0 : rasters.front().cols;
    Bytes out;
    const auto be32 = [&](std::uint32_t v) {
        for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    be32(idx3_magic);
    be32(static_cast<std::uint32_t>(rasters.size()));
    be32(static_cast<std::uint32_t>(rows));
    be32(static_cast<std::uint32_t>(cols));
    for (const auto& r : rasters) {
        require(r.rows == rows && r.cols == cols, Errc::invalid_argument, "IDX rasters must share one shape");
        require(r.pixels.size() == static_cast<std::size_t>(rows * cols), Errc::invalid_argument,
                "raster pixel count does not match its shape");
        out.insert(out.end(), r.pixels.begin(), r.pixels.end());
    }
    return out;
}

}  // namespace eisp
