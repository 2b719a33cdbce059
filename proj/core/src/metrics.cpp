#include <cmath>

#include "eisp/eval.hpp"

namespace eisp {

double mse_rel(const RVector& pred, const RVector& gt) {
    require(pred.size() == gt.size() && gt.size() > 0, Errc::invalid_argument, "maps must have equal nonzero size");
    require((gt.array() >= 1.0).all(), Errc::invalid_argument, "reference permittivity must be >= 1");
    return std::sqrt(((pred - gt).array() / gt.array()).square().mean());
}

double contrast_range(const RVector& gt) { return gt.maxCoeff() - 1.0; }

double psnr(const RVector& pred, const RVector& gt, std::optional<double> data_range) {
    require(pred.size() == gt.size() && gt.size() > 0, Errc::invalid_argument, "maps must have equal nonzero size");
    const double range = data_range.value_or(contrast_range(gt));
    require(range > 0.0, Errc::invalid_argument, "PSNR data range must be positive");
    const double mse = (pred - gt).squaredNorm() / static_cast<double>(gt.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(range * range / mse);
}

double ssim(const RVector& pred, const RVector& gt, int side, const SsimOptions& options) {
    require(pred.size() == gt.size() && gt.size() == Eigen::Index{side} * side, Errc::invalid_argument,
            "images must be side x side");
    require(options.window >= 1 && side >= options.window, Errc::invalid_argument,
            "image is smaller than the SSIM window");
    const double range = options.data_range.value_or(contrast_range(gt));
    require(range > 0.0, Errc::invalid_argument, "SSIM data range must be positive");
    const double c1 = (options.k1 * range) * (options.k1 * range);
    const double c2 = (options.k2 * range) * (options.k2 * range);
    const int w = options.window;
    const double n = static_cast<double>(w) * w;
    double total = 0.0;
    int count = 0;
    for (int r0 = 0; r0 + w <= side; ++r0) {
        for (int c0 = 0; c0 + w <= side; ++c0) {
            double sx = 0, sy = 0;
            for (int r = r0; r < r0 + w; ++r) {
                for (int c = c0; c < c0 + w; ++c) {
                    sx += pred[r * side + c];
                    sy += gt[r * side + c];
                }
            }
            const double mx = sx / n, my = sy / n;
            // centered second pass: identical windows give bit-identical moments
            double vx = 0, vy = 0, cxy = 0;
            for (int r = r0; r < r0 + w; ++r) {
                for (int c = c0; c < c0 + w; ++c) {
                    const double dx = pred[r * side + c] - mx;
                    const double dy = gt[r * side + c] - my;
                    vx += dx * dx;
                    vy += dy * dy;
                    cxy += dx * dy;
                }
            }
            vx /= n;
            vy /= n;
            cxy /= n;
            total += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    }
    return total / count;
}

}  // namespace eisp
