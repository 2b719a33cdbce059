#include "eisp/datagen.hpp"

#include <random>

namespace eisp {

void CylinderSceneParams::validate() const {
    require(count_min >= 0 && count_max >= count_min, Errc::invalid_argument, "cylinder count range is empty");
    require(radius_m.lo > 0.0 && radius_m.hi >= radius_m.lo, Errc::invalid_argument, "cylinder radius range is empty");
    require(permittivity.lo >= 1.0 && permittivity.hi >= permittivity.lo, Errc::invalid_argument,
            "cylinder permittivity range must lie in [1, inf)");
    require(!center_extent || *center_extent >= 0.0, Errc::invalid_argument, "center extent must be >= 0");
    require(max_retries >= 1, Errc::invalid_argument, "max_retries must be >= 1");
}

namespace {

double uniform(std::mt19937_64& rng, Interval iv) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return iv.lo + u * (iv.hi - iv.lo);
}

}  // namespace

Scene gen_cylinders(const CylinderSceneParams& params, const GridSpec& grid) {
    params.validate();
    std::mt19937_64 rng(params.seed);
    const int span = params.count_max - params.count_min + 1;
    const int count = params.count_min + static_cast<int>(rng() % static_cast<std::uint64_t>(span));
    RVector eps = RVector::Ones(grid.cell_count());
    for (int k = 0; k < count; ++k) {
        bool placed = false;
        for (int attempt = 0; attempt < params.max_retries && !placed; ++attempt) {
            const double r = uniform(rng, params.radius_m);
            const double extent = params.center_extent.value_or(grid.half_side() - r);
            if (extent < 0.0) continue;
            const Point2 c{uniform(rng, {-extent, extent}), uniform(rng, {-extent, extent})};
            const double e = uniform(rng, params.permittivity);
            for (int n = 0; n < grid.cell_count(); ++n) {
                if (distance(grid.center(n), c) <= r) eps[n] = std::max(eps[n], e);
            }
            placed = true;
        }
        if (!placed) {
            fail(Errc::generation_failure, "could not place cylinder " + std::to_string(k) + " after " +
                                               std::to_string(params.max_retries) + " attempts");
        }
    }
    return {grid, eps};
}

}  // namespace eisp
