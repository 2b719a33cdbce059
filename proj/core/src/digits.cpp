#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "eisp/datagen.hpp"
#include "eisp/hash.hpp"

namespace eisp {
namespace {

using Stroke = std::vector<Point2>;
using Glyph = std::vector<Stroke>;

// Glyph coordinates live in the unit box, x to the right and y downward.
Stroke ellipse(double cx, double cy, double rx, double ry, int n = 24) {
    Stroke s;
    for (int i = 0; i <= n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        s.push_back({cx + rx * std::cos(t), cy + ry * std::sin(t)});
    }
    return s;
}

const std::array<Glyph, 10>& glyphs() {
    static const std::array<Glyph, 10> table = {
        Glyph{ellipse(0.5, 0.5, 0.24, 0.38)},
        Glyph{{{0.35, 0.25}, {0.52, 0.1}, {0.52, 0.9}}},
        Glyph{{{0.25, 0.3}, {0.35, 0.15}, {0.55, 0.1}, {0.72, 0.2}, {0.72, 0.38}, {0.25, 0.9}, {0.78, 0.9}}},
        Glyph{{{0.25, 0.15}, {0.7, 0.15}, {0.45, 0.45}, {0.7, 0.6}, {0.7, 0.8}, {0.5, 0.92}, {0.25, 0.85}}},
        Glyph{{{0.62, 0.9}, {0.62, 0.1}, {0.2, 0.65}, {0.8, 0.65}}},
        Glyph{{{0.72, 0.12}, {0.3, 0.12}, {0.27, 0.45}, {0.55, 0.42}, {0.72, 0.58}, {0.7, 0.8}, {0.5, 0.92},
               {0.25, 0.85}}},
        Glyph{{{0.65, 0.1}, {0.4, 0.3}, {0.28, 0.6}, {0.35, 0.85}, {0.55, 0.9}, {0.7, 0.75}, {0.65, 0.55},
               {0.45, 0.5}, {0.3, 0.62}}},
        Glyph{{{0.22, 0.12}, {0.78, 0.12}, {0.45, 0.9}}},
        Glyph{ellipse(0.5, 0.3, 0.18, 0.18), ellipse(0.5, 0.68, 0.22, 0.22)},
        Glyph{ellipse(0.5, 0.33, 0.2, 0.2), {{0.7, 0.33}, {0.62, 0.9}}},
    };
    return table;
}

double segment_distance(Point2 p, Point2 a, Point2 b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, {a.x + t * dx, a.y + t * dy});
}

}  // namespace

ByteRaster render_digit(int digit, std::uint64_t seed) {
    require(digit >= 0 && digit <= 9, Errc::invalid_argument, "digit must be in [0, 9]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double angle = 0.2 * u(rng);
    const double scale = 0.975 + 0.125 * u(rng);
    const double shear = 0.2 * u(rng);
    const double tx = 0.06 * u(rng), ty = 0.06 * u(rng);
    const double half_width = 0.06 + 0.015 * u(rng);
    const double peak = 227.5 + 27.5 * u(rng);

    // Map glyph space to pixel space: 20 x 20 box centered in 28 x 28.
    const double ca = std::cos(angle), sa = std::sin(angle);
    std::vector<Stroke> strokes;
    for (const auto& s : glyphs()[static_cast<std::size_t>(digit)]) {
        Stroke mapped;
        for (const auto& p : s) {
            const double x = (p.x - 0.5) + shear * (p.y - 0.5);
            const double y = p.y - 0.5;
            const double rx = scale * (ca * x - sa * y) + tx;
            const double ry = scale * (sa * x + ca * y) + ty;
            mapped.push_back({14.0 + 20.0 * rx, 14.0 + 20.0 * ry});
        }
        strokes.push_back(std::move(mapped));
    }
    const double w = 20.0 * half_width;
    ByteRaster out{28, 28, std::vector<std::uint8_t>(28 * 28, 0)};
    for (int r = 0; r < 28; ++r) {
        for (int c = 0; c < 28; ++c) {
            const Point2 p{c + 0.5, r + 0.5};
            double d = 1e9;
            for (const auto& s : strokes)
                for (std::size_t i = 0; i + 1 < s.size(); ++i) d = std::min(d, segment_distance(p, s[i], s[i + 1]));
            const double cover = std::clamp(w - d + 0.5, 0.0, 1.0);
            out.pixels[static_cast<std::size_t>(r * 28 + c)] = static_cast<std::uint8_t>(std::lround(peak * cover));
        }
    }
    return out;
}

std::vector<ByteRaster> synth_digits(int count, std::uint64_t seed) {
    require(count >= 0, Errc::invalid_argument, "digit count must be >= 0");
    std::vector<ByteRaster> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const std::uint64_t s = splitmix64(seed ^ static_cast<std::uint64_t>(i));
        out.push_back(render_digit(static_cast<int>(s % 10), splitmix64(s)));
    }
    return out;
}

}  // namespace eisp
