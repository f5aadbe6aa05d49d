#include "riesznet/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "riesznet/common.hpp"
#include "riesznet/kernels.hpp"

namespace riesznet {

struct FftEngine::Impl {
    struct Plans {
        fftw_plan fwd = nullptr;
        fftw_plan bwd = nullptr;
    };
    std::mutex mu;
    std::map<std::pair<int, int>, Plans> plans;

    Plans& get(int h, int w) {
        std::lock_guard<std::mutex> lock(mu);
        auto it = plans.find({h, w});
        if (it != plans.end()) return it->second;
        // Plan on scratch buffers with the allocator every caller uses, so
        // new-array execution sees the same alignment class.
        avec<double> real(static_cast<std::size_t>(h) * w, 0.0);
        avec<cplx> spec(static_cast<std::size_t>(h) * (w / 2 + 1));
        Plans p;
        p.fwd = fftw_plan_dft_r2c_2d(h, w, real.data(),
                                     reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
        p.bwd = fftw_plan_dft_c2r_2d(h, w, reinterpret_cast<fftw_complex*>(spec.data()),
                                     real.data(), FFTW_ESTIMATE);
        if (!p.fwd || !p.bwd) throw NumericError("FFT planning failed");
        return plans.emplace(std::make_pair(h, w), p).first->second;
    }

    ~Impl() {
        for (auto& [key, p] : plans) {
            if (p.fwd) fftw_destroy_plan(p.fwd);
            if (p.bwd) fftw_destroy_plan(p.bwd);
        }
    }
};

FftEngine::FftEngine() : impl_(new Impl) {}
FftEngine::~FftEngine() = default;

FftEngine& FftEngine::instance() {
    static FftEngine engine;
    return engine;
}

void FftEngine::forward(const double* plane, cplx* spec, int h, int w) {
    auto& p = impl_->get(h, w);
    // r2c out-of-place preserves its input
    fftw_execute_dft_r2c(p.fwd, const_cast<double*>(plane),
                         reinterpret_cast<fftw_complex*>(spec));
}

void FftEngine::inverse(cplx* spec, double* plane, int h, int w) {
    auto& p = impl_->get(h, w);
    fftw_execute_dft_c2r(p.bwd, reinterpret_cast<fftw_complex*>(spec), plane);
    kernels::active().scale(plane, 1.0 / (static_cast<double>(h) * w),
                            static_cast<std::size_t>(h) * w);
}

} // namespace riesznet
