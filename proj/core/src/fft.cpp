#include "eisp/fft.hpp"

#include <cstring>
#include <map>
#include <mutex>

#include <fftw3.h>

#include "eisp/error.hpp"

namespace eisp {
namespace {

// fftw planning is not thread-safe; execution of an existing plan on new arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanPair {
    fftw_plan forward{nullptr};
    fftw_plan backward{nullptr};
};

PlanPair plans_for(int p) {
    static std::map<int, PlanPair> cache;
    std::lock_guard lock(planner_mutex());
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
    const auto n = static_cast<std::size_t>(p) * static_cast<std::size_t>(p);
    fftw_complex* buf = fftw_alloc_complex(n);
    PlanPair plans;
    plans.forward = fftw_plan_dft_2d(p, p, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    plans.backward = fftw_plan_dft_2d(p, p, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(buf);
    require(plans.forward != nullptr && plans.backward != nullptr, Errc::numerical_failure, "FFT planning failed");
    cache.emplace(p, plans);
    return plans;
}

struct Workspace {
    fftw_complex* data{nullptr};
    std::size_t size{0};

    ~Workspace() { fftw_free(data); }

    fftw_complex* reserve(std::size_t n) {
        if (n > size) {
            fftw_free(data);
            data = fftw_alloc_complex(n);
            size = n;
        }
        return data;
    }
};

fftw_complex* scratch(std::size_t n) {
    thread_local Workspace ws;
    return ws.reserve(n);
}

}  // namespace

ToeplitzConvolver::ToeplitzConvolver(int cells_per_side, std::span<const cplx> kernel)
    : m_(cells_per_side), p_(2 * cells_per_side) {
    require(m_ >= 1, Errc::invalid_argument, "convolver needs a positive grid size");
    require(kernel.size() == static_cast<std::size_t>(m_) * m_, Errc::invalid_argument, "kernel size mismatch");
    const auto n = static_cast<std::size_t>(p_) * p_;
    spectrum_.assign(n, cplx{0.0, 0.0});
    const auto fold = [this](int i) { return i < m_ ? i : (i == m_ ? -1 : p_ - i); };
    for (int r = 0; r < p_; ++r) {
        const int dr = fold(r);
        if (dr < 0) continue;
        for (int c = 0; c < p_; ++c) {
            const int dc = fold(c);
            if (dc < 0) continue;
            spectrum_[static_cast<std::size_t>(r) * p_ + c] = kernel[static_cast<std::size_t>(dr) * m_ + dc];
        }
    }
    auto* buf = scratch(n);
    std::memcpy(buf, spectrum_.data(), n * sizeof(cplx));
    fftw_execute_dft(plans_for(p_).forward, buf, buf);
    const double inv = 1.0 / static_cast<double>(n);
    const auto* res = reinterpret_cast<const cplx*>(buf);
    for (std::size_t i = 0; i < n; ++i) spectrum_[i] = res[i] * inv;
}

void ToeplitzConvolver::apply(std::span<const cplx> in, std::span<cplx> out) const {
    const auto cells = static_cast<std::size_t>(m_) * m_;
    require(in.size() == cells && out.size() == cells, Errc::invalid_argument, "convolver operand size mismatch");
    const auto n = static_cast<std::size_t>(p_) * p_;
    auto* raw = scratch(n);
    auto* buf = reinterpret_cast<cplx*>(raw);
    std::fill(buf, buf + n, cplx{0.0, 0.0});
    for (int r = 0; r < m_; ++r) {
        std::copy_n(in.data() + static_cast<std::size_t>(r) * m_, m_, buf + static_cast<std::size_t>(r) * p_);
    }
    const auto plans = plans_for(p_);
    fftw_execute_dft(plans.forward, raw, raw);
    for (std::size_t i = 0; i < n; ++i) buf[i] *= spectrum_[i];
    fftw_execute_dft(plans.backward, raw, raw);
    for (int r = 0; r < m_; ++r) {
        std::copy_n(buf + static_cast<std::size_t>(r) * p_, m_, out.data() + static_cast<std::size_t>(r) * m_);
    }
}

}  // namespace eisp
