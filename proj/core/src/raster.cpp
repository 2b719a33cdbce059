#include "eisp/datagen.hpp"

#include <algorithm>
#include <cmath>

namespace eisp {

Scene raster_to_scene(const ByteRaster& raster, const GridSpec& grid, double eps_min, double eps_max) {
    require(eps_min >= 1.0 && eps_max >= eps_min, Errc::invalid_argument, "need eps_max >= eps_min >= 1");
    require(raster.rows >= 1 && raster.cols >= 1 &&
                raster.pixels.size() == static_cast<std::size_t>(raster.rows * raster.cols),
            Errc::invalid_argument, "malformed raster");
    const int m = grid.cells_per_side();
    RVector eps(grid.cell_count());
    const double sy = static_cast<double>(raster.rows) / m;
    const double sx = static_cast<double>(raster.cols) / m;
    for (int gr = 0; gr < m; ++gr) {
        const int img_row = m - 1 - gr;
        const double fy = std::clamp((img_row + 0.5) * sy - 0.5, 0.0, raster.rows - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, raster.rows - 1);
        const double wy = fy - y0;
        for (int gc = 0; gc < m; ++gc) {
            const double fx = std::clamp((gc + 0.5) * sx - 0.5, 0.0, raster.cols - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, raster.cols - 1);
            const double wx = fx - x0;
            const double p = (1 - wy) * ((1 - wx) * raster.at(y0, x0) + wx * raster.at(y0, x1)) +
                             wy * ((1 - wx) * raster.at(y1, x0) + wx * raster.at(y1, x1));
            eps[grid.index(gr, gc)] = p > 0.0 ? eps_min + p / 255.0 * (eps_max - eps_min) : 1.0;
        }
    }
    return {grid, eps};
}

}  // namespace eisp
