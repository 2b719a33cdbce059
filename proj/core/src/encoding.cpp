#include <cmath>

#include "eisp/neural.hpp"

namespace eisp {

void EncodingSpec::validate() const {
    require(n_frequencies >= 1, Errc::invalid_argument, "encoding needs at least one frequency");
    require(input_dim == 2, Errc::invalid_argument, "only 2D coordinates are supported");
}

RVector encode_position(Point2 x, const EncodingSpec& spec, double half_side) {
    spec.validate();
    require(half_side > 0.0, Errc::invalid_argument, "half side must be positive");
    const double s = std::numbers::pi / half_side;
    const double coords[2] = {x.x * s, x.y * s};
    RVector out(spec.output_dim());
    Eigen::Index i = 0;
    double f = 1.0;
    for (int k = 0; k < spec.n_frequencies; ++k, f *= 2.0) {
        for (double c : coords) {
            out[i++] = std::sin(f * c);
            out[i++] = std::cos(f * c);
        }
    }
    return out;
}

RMatrix encode_grid(const GridSpec& grid, const EncodingSpec& spec) {
    RMatrix out(spec.output_dim(), grid.cell_count());
    for (int n = 0; n < grid.cell_count(); ++n) out.col(n) = encode_position(grid.center(n), spec, grid.half_side());
    return out;
}

}  // namespace eisp
