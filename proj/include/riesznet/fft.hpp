#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace riesznet {

/// Aligned allocator so FFT buffers share one alignment class with the
/// buffers the plans were created on (new-array execution requirement).
template <typename T, std::size_t Align = 64>
struct AlignedAlloc {
    using value_type = T;
    AlignedAlloc() = default;
    template <typename U>
    AlignedAlloc(const AlignedAlloc<U, Align>&) {}
    T* allocate(std::size_t n) {
        const std::size_t bytes = ((n * sizeof(T) + Align - 1) / Align) * Align;
        void* p = ::operator new(bytes, std::align_val_t(Align));
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) { ::operator delete(p, std::align_val_t(Align)); }
    template <typename U>
    bool operator==(const AlignedAlloc<U, Align>&) const { return true; }
};

template <typename T>
using avec = std::vector<T, AlignedAlloc<T>>;

using cplx = std::complex<double>;

/// 2d real<->complex FFT with a mutex-guarded plan cache keyed by size.
/// Forward is unnormalized; the inverse applies the 1/(H*W) factor, so
/// inverse(forward(x)) == x up to rounding. Execution is thread safe on
/// per-call buffers; plan creation is serialized internally.
class FftEngine {
public:
    static FftEngine& instance();

    /// plane: h*w reals -> spec: h*(w/2+1) complex, rows contiguous.
    void forward(const double* plane, cplx* spec, int h, int w);

    /// spec is consumed (the transform scribbles on its input); the result
    /// is scaled by 1/(h*w).
    void inverse(cplx* spec, double* plane, int h, int w);

    static int spec_width(int w) { return w / 2 + 1; }

    FftEngine(const FftEngine&) = delete;
    FftEngine& operator=(const FftEngine&) = delete;

private:
    FftEngine();
    ~FftEngine();
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace riesznet
