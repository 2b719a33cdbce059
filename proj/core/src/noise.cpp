#include "eisp/datagen.hpp"

#include <cmath>
#include <random>

namespace eisp {

CRowMatrix add_noise(const CRowMatrix& scattered, double ratio, std::uint64_t seed) {
    require(ratio >= 0.0 && std::isfinite(ratio), Errc::invalid_argument, "noise ratio must be >= 0");
    CRowMatrix out = scattered;
    if (ratio == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double nr = static_cast<double>(scattered.cols());
    for (Eigen::Index t = 0; t < scattered.rows(); ++t) {
        const double scale = ratio * scattered.row(t).norm() / std::sqrt(2.0 * nr);
        for (Eigen::Index r = 0; r < scattered.cols(); ++r) {
            const double re = normal(rng);
            const double im = normal(rng);
            out(t, r) += scale * cplx(re, im);
        }
    }
    return out;
}

}  // namespace eisp
