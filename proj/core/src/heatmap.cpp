#include <cmath>
#include <cstdio>
#include <string>

#include "eisp/eval.hpp"

#ifdef EISP_HAVE_PNG
#include <png.h>
#endif

namespace eisp {

const std::array<Rgb, 256>& heatmap_palette() {
    static const std::array<Rgb, 256> table = {{
#include "viridis.inc"
    }};
    return table;
}

bool png_supported() noexcept {
#ifdef EISP_HAVE_PNG
    return true;
#else
    return false;
#endif
}

namespace {

std::vector<Rgb> render(const RVector& map, int side, double lo, double hi, int scale) {
    require(side >= 1 && map.size() == Eigen::Index{side} * side, Errc::invalid_argument, "map must be side x side");
    require(hi > lo, Errc::invalid_argument, "heatmap range needs hi > lo");
    require(scale >= 1, Errc::invalid_argument, "pixel scale must be >= 1");
    const auto& pal = heatmap_palette();
    const int px = side * scale;
    std::vector<Rgb> out(static_cast<std::size_t>(px) * px);
    for (int y = 0; y < px; ++y) {
        const int row = side - 1 - y / scale;
        for (int x = 0; x < px; ++x) {
            const double v = map[row * side + x / scale];
            const double u = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
            out[static_cast<std::size_t>(y) * px + x] = pal[static_cast<std::size_t>(std::lround(u * 255.0))];
        }
    }
    return out;
}

#ifdef EISP_HAVE_PNG
void write_png(const std::filesystem::path& path, const std::vector<Rgb>& pixels, int px) {
    FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) fail(Errc::io_error, "cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(f);
        fail(Errc::io_error, "PNG encoding failed for " + path.string());
    }
    png_init_io(png, f);
    png_set_IHDR(png, info, static_cast<png_uint_32>(px), static_cast<png_uint_32>(px), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < px; ++y) {
        png_write_row(png, reinterpret_cast<png_const_bytep>(pixels.data() + static_cast<std::size_t>(y) * px));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fclose(f) != 0) fail(Errc::io_error, "cannot write " + path.string());
}
#endif

}  // namespace

Bytes heatmap_ppm(const RVector& map, int side, double lo, double hi, const HeatmapOptions& options) {
    const auto pixels = render(map, side, lo, hi, options.pixel_scale);
    const int px = side * options.pixel_scale;
    const std::string header = "P6\n" + std::to_string(px) + " " + std::to_string(px) + "\n255\n";
    Bytes out(header.begin(), header.end());
    out.reserve(out.size() + 3 * pixels.size());
    for (const auto& p : pixels) {
        out.push_back(p.r);
        out.push_back(p.g);
        out.push_back(p.b);
    }
    return out;
}

void emit_heatmap(const RVector& map, int side, double lo, double hi, const std::filesystem::path& path,
                  const HeatmapOptions& options) {
    if (path.extension() == ".png") {
#ifdef EISP_HAVE_PNG
        write_png(path, render(map, side, lo, hi, options.pixel_scale), side * options.pixel_scale);
        return;
#else
        fail(Errc::io_error, "PNG output is not available in this build: " + path.string());
#endif
    }
    write_file(path, heatmap_ppm(map, side, lo, hi, options));
}

}  // namespace eisp
