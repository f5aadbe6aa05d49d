#include "riesznet/spectral.hpp"

#include <cmath>
#include <mutex>

#include "riesznet/common.hpp"
#include "riesznet/kernels.hpp"

namespace riesznet::spectral {

FrequencyGrid FrequencyGrid::build(int h, int w) {
    FrequencyGrid g;
    g.h = h;
    g.w = w;
    g.u1.resize(static_cast<std::size_t>(h) * w);
    g.u2.resize(static_cast<std::size_t>(h) * w);
    for (int ky = 0; ky < h; ++ky) {
        const double f1 = freq(ky, h);
        for (int kx = 0; kx < w; ++kx) {
            g.u1[static_cast<std::size_t>(ky) * w + kx] = f1;
            g.u2[static_cast<std::size_t>(ky) * w + kx] = freq(kx, w);
        }
    }
    return g;
}

RieszKernelBank RieszKernelBank::build(int h, int w) {
    if (h < 2 || w < 2)
        throw ShapeError("riesz kernel bank needs a grid of at least 2x2, got " +
                         std::to_string(h) + "x" + std::to_string(w));
    RieszKernelBank b;
    b.grid = FrequencyGrid::build(h, w);
    const std::size_t n = static_cast<std::size_t>(h) * w;
    b.H1.resize(n);
    b.H2.resize(n);
    b.H20.resize(n);
    b.H11.resize(n);
    b.H02.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u1 = b.grid.u1[i];
        const double u2 = b.grid.u2[i];
        const double r2 = u1 * u1 + u2 * u2;
        if (r2 == 0.0) {
            b.H1[i] = b.H2[i] = cplx(0.0, 0.0);
            b.H20[i] = b.H11[i] = b.H02[i] = 0.0;
            continue;
        }
        const double inv_r = 1.0 / std::sqrt(r2);
        b.H1[i] = cplx(0.0, -u1 * inv_r);
        b.H2[i] = cplx(0.0, -u2 * inv_r);
        b.H20[i] = -(u1 * u1) / r2;
        b.H11[i] = -(u1 * u2) / r2;
        b.H02[i] = -(u2 * u2) / r2;
    }

    b.spec_w = FftEngine::spec_width(w);
    for (auto& e : b.exec) e.assign(2 * static_cast<std::size_t>(h) * b.spec_w, 0.0);
    auto self_conj = [&](int ky, int kx) {
        return (ky == 0 || 2 * ky == h) && (kx == 0 || 2 * kx == w);
    };
    for (int ky = 0; ky < h; ++ky) {
        for (int kx = 0; kx < b.spec_w; ++kx) {
            const std::size_t full = static_cast<std::size_t>(ky) * w + kx;
            const std::size_t half = 2 * (static_cast<std::size_t>(ky) * b.spec_w + kx);
            const bool proj = self_conj(ky, kx);
            const cplx m[5] = {b.H1[full], b.H2[full], cplx(b.H20[full], 0.0),
                               cplx(b.H11[full], 0.0), cplx(b.H02[full], 0.0)};
            for (int k = 0; k < 5; ++k) {
                b.exec[k][half] = m[k].real();
                b.exec[k][half + 1] = proj ? 0.0 : m[k].imag();
            }
        }
    }
    return b;
}

namespace {

// per-thread scratch so concurrent applications never share FFT buffers
struct Scratch {
    avec<double> spec;     // interleaved complex, 2*h*sw
    avec<double> acc;
    avec<double> tmp;
    void ensure(std::size_t n2) {
        if (spec.size() < n2) {
            spec.assign(n2, 0.0);
            acc.assign(n2, 0.0);
            tmp.assign(n2, 0.0);
        }
    }
};

Scratch& scratch() {
    thread_local Scratch s;
    return s;
}

void check_plane_finite(const double* p, std::size_t n, const char* what) {
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(p[i])) throw NumericError(std::string(what) + ": non-finite input value");
}

} // namespace

void riesz_apply_planes(const RieszKernelBank& bank, const double* plane, double* out5) {
    const int h = bank.h(), w = bank.w(), sw = bank.spec_w;
    const std::size_t npx = static_cast<std::size_t>(h) * w;
    const std::size_t nspec = static_cast<std::size_t>(h) * sw;
    auto& s = scratch();
    s.ensure(2 * nspec);
    auto& fft = FftEngine::instance();
    fft.forward(plane, reinterpret_cast<cplx*>(s.spec.data()), h, w);
    const auto& ops = kernels::active();
    for (int k = 0; k < 5; ++k) {
        ops.spec_mul(s.tmp.data(), s.spec.data(), bank.exec[k].data(), nspec);
        fft.inverse(reinterpret_cast<cplx*>(s.tmp.data()), out5 + k * npx, h, w);
    }
}

void riesz_adjoint_planes(const RieszKernelBank& bank, const double* cot5, double* out) {
    const int h = bank.h(), w = bank.w(), sw = bank.spec_w;
    const std::size_t npx = static_cast<std::size_t>(h) * w;
    const std::size_t nspec = static_cast<std::size_t>(h) * sw;
    auto& s = scratch();
    s.ensure(2 * nspec);
    auto& fft = FftEngine::instance();
    const auto& ops = kernels::active();
    std::fill(s.acc.begin(), s.acc.begin() + 2 * nspec, 0.0);
    for (int k = 0; k < 5; ++k) {
        fft.forward(cot5 + k * npx, reinterpret_cast<cplx*>(s.spec.data()), h, w);
        ops.spec_mul_conj_acc(s.acc.data(), s.spec.data(), bank.exec[k].data(), nspec);
    }
    fft.inverse(reinterpret_cast<cplx*>(s.acc.data()), out, h, w);
}

RieszResponses riesz_apply(const ImageField& image, const RieszKernelBank& bank) {
    if (image.c != 1)
        throw ShapeError("riesz_apply expects a single-channel image, got " + std::to_string(image.c));
    if (image.h != bank.h() || image.w != bank.w())
        throw ShapeError("riesz_apply: image " + std::to_string(image.h) + "x" + std::to_string(image.w) +
                         " does not match bank grid " + std::to_string(bank.h()) + "x" +
                         std::to_string(bank.w()));
    check_plane_finite(image.v.data(), image.v.size(), "riesz_apply");

    const std::size_t npx = image.npx();
    std::vector<double> planes(5 * npx);
    riesz_apply_planes(bank, image.v.data(), planes.data());

    RieszResponses r;
    r.channels = ImageField(image.h, image.w, 5);
    for (int k = 0; k < 5; ++k)
        for (std::size_t p = 0; p < npx; ++p) r.channels.v[p * 5 + k] = planes[k * npx + p];
    return r;
}

ImageField riesz_adjoint_apply(const ImageField& cotangent, const RieszKernelBank& bank) {
    if (cotangent.c != 5)
        throw ShapeError("riesz_adjoint_apply expects 5 channels, got " + std::to_string(cotangent.c));
    if (cotangent.h != bank.h() || cotangent.w != bank.w())
        throw ShapeError("riesz_adjoint_apply: size mismatch with bank grid");

    const std::size_t npx = cotangent.npx();
    std::vector<double> planes(5 * npx);
    for (int k = 0; k < 5; ++k)
        for (std::size_t p = 0; p < npx; ++p) planes[k * npx + p] = cotangent.v[p * 5 + k];

    ImageField out(cotangent.h, cotangent.w, 1);
    riesz_adjoint_planes(bank, planes.data(), out.v.data());
    return out;
}

ImageField directional_hilbert(const ImageField& image, double theta, const RieszKernelBank& bank) {
    if (!std::isfinite(theta)) throw NumericError("directional_hilbert: theta must be finite");
    RieszResponses r = riesz_apply(image, bank);
    const double ct = std::cos(theta), st = std::sin(theta);
    ImageField out(image.h, image.w, 1);
    for (std::size_t p = 0; p < image.npx(); ++p)
        out.v[p] = ct * r.channels.v[p * 5 + 0] + st * r.channels.v[p * 5 + 1];
    return out;
}

BankCache& BankCache::instance() {
    static BankCache cache;
    return cache;
}

std::shared_ptr<const RieszKernelBank> BankCache::get(int h, int w) {
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    const long long key = static_cast<long long>(h) << 32 | static_cast<unsigned>(w);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].key == key) {
            Entry e = entries_[i];
            entries_.erase(entries_.begin() + i);
            entries_.insert(entries_.begin(), e);
            return e.bank;
        }
    }
    auto bank = std::make_shared<const RieszKernelBank>(RieszKernelBank::build(h, w));
    entries_.insert(entries_.begin(), Entry{key, bank});
    if (entries_.size() > kCapacity) entries_.pop_back();
    return bank;
}

} // namespace riesznet::spectral
