#pragma once

#include <memory>
#include <vector>

#include "riesznet/fft.hpp"
#include "riesznet/image.hpp"

namespace riesznet::spectral {

/// Normalized DFT frequency coordinates for an h x w grid, cycles per pixel.
/// u1 indexes rows (first axis), u2 columns; both lie in [-1/2, 1/2) with the
/// negative frequencies in the upper half of the index range. Bin (0,0) is DC.
struct FrequencyGrid {
    int h = 0;
    int w = 0;
    std::vector<double> u1; // h*w, row-major
    std::vector<double> u2;

    static FrequencyGrid build(int h, int w);
    static double freq(int k, int n) {
        return (k < (n + 1) / 2) ? static_cast<double>(k) / n
                                 : static_cast<double>(k - n) / n;
    }
};

/// Frequency-domain Riesz multipliers on a grid.
///
/// First order:  H_j(u) = -i * u_j / |u|            (all-pass, |H(u)| = 1)
/// Second order: products of first-order multipliers,
///               H20 = -u1^2/|u|^2, H11 = -u1*u2/|u|^2, H02 = -u2^2/|u|^2.
/// All five are 0 at DC, which makes every response zero-mean.
///
/// The discrete transforms run through the half-spectrum (r2c) path. At the
/// four self-conjugate bins of even-sized grids the spectrum of a real image
/// is real, so only the real part of a multiplier can act there; the packed
/// execution tables store that projection (it zeroes H1/H2 at those bins and
/// leaves the even second-order multipliers untouched). The full-grid arrays
/// below keep the unprojected mathematical values.
struct RieszKernelBank {
    FrequencyGrid grid;
    std::vector<cplx> H1, H2;            // h*w complex
    std::vector<double> H20, H11, H02;   // h*w real

    // interleaved (re,im) half-spectrum multipliers, order R1,R2,R20,R11,R02
    int spec_w = 0;
    avec<double> exec[5];

    static RieszKernelBank build(int h, int w);

    int h() const { return grid.h; }
    int w() const { return grid.w; }
};

/// 5-channel response stack (R1, R2, R20, R11, R02), one per input channel.
struct RieszResponses {
    ImageField channels; // h x w x 5
};

/// Applies the five transforms to a single-channel image. Output channels are
/// ordered (R1, R2, R20, R11, R02).
RieszResponses riesz_apply(const ImageField& image, const RieszKernelBank& bank);

/// Vector-Jacobian product of riesz_apply: 5-channel cotangent in, one
/// channel out. First-order channels see the conjugated (sign-flipped)
/// multiplier; the second-order channels are self-adjoint.
ImageField riesz_adjoint_apply(const ImageField& cotangent, const RieszKernelBank& bank);

/// cos(theta)*R1(f) + sin(theta)*R2(f).
ImageField directional_hilbert(const ImageField& image, double theta, const RieszKernelBank& bank);

/// Plane-level entry points used by the autodiff layer; `out5` holds five
/// h*w planes back to back.
void riesz_apply_planes(const RieszKernelBank& bank, const double* plane, double* out5);
void riesz_adjoint_planes(const RieszKernelBank& bank, const double* cot5, double* out);

/// Shared bank cache, keyed by (h, w), LRU with capacity 8. Banks are
/// immutable once built and safe to share across threads.
class BankCache {
public:
    static BankCache& instance();
    std::shared_ptr<const RieszKernelBank> get(int h, int w);
    BankCache(const BankCache&) = delete;
    BankCache& operator=(const BankCache&) = delete;

private:
    BankCache() = default;
    struct Impl;
    static constexpr int kCapacity = 8;
    struct Entry {
        long long key;
        std::shared_ptr<const RieszKernelBank> bank;
    };
    std::vector<Entry> entries_; // front = most recent
};

} // namespace riesznet::spectral
