#pragma once

#include <cstddef>
#include <string_view>

namespace riesznet::kernels {

/// Table of arithmetic inner-loop kernels. Every entry has a scalar reference
/// implementation; SIMD variants are selected at runtime and are equivalence-
/// tested against the reference.
///
/// Exactness contract, relied on by the tests:
///  - elementwise entries (add..adam_step) and the channel-vectorized entries
///    (colsum..spec_mul_conj_acc) preserve the scalar accumulation order and
///    must match the reference bit for bit;
///  - flat reductions (sum, sumsq, dot, max_abs) and mix_bwd_x may reorder
///    the accumulation and only agree within rounding.
struct Ops {
    const char* name;

    // dst += a
    void (*add)(double* dst, const double* a, std::size_t n);
    // dst += alpha * a
    void (*axpy)(double* dst, double alpha, const double* a, std::size_t n);
    // x *= alpha
    void (*scale)(double* x, double alpha, std::size_t n);
    // dst = a * b
    void (*mul)(double* dst, const double* a, const double* b, std::size_t n);
    // y = max(0, x)
    void (*relu_fwd)(double* y, const double* x, std::size_t n);
    // dx += dy where x > 0
    void (*relu_bwd)(double* dx, const double* dy, const double* x, std::size_t n);
    // bias-corrected moment update; bc1 = 1-beta1^t, bc2 = 1-beta2^t
    void (*adam_step)(double* p, double* m, double* v, const double* g, std::size_t n,
                      double lr, double beta1, double beta2, double eps, double bc1, double bc2);

    // Channels-last (npx, c) arrays, c contiguous. Accumulator order per
    // channel is pixel order in every variant.
    // acc[ch] += sum_px x[px,ch]
    void (*colsum)(double* acc, const double* x, std::size_t npx, std::size_t c);
    // acc[ch] += sum_px x[px,ch]; acc2[ch] += sum_px x[px,ch]^2
    void (*colsum2)(double* acc, double* acc2, const double* x, std::size_t npx, std::size_t c);
    // acc[ch] += sum_px a[px,ch]*b[px,ch]
    void (*coldot)(double* acc, const double* a, const double* b, std::size_t npx, std::size_t c);
    // y[px,ch] = ((x[px,ch]-mean[ch])*inv_std[ch])*gamma[ch] + beta[ch]
    void (*bn_norm)(double* y, const double* x, const double* mean, const double* inv_std,
                    const double* gamma, const double* beta, std::size_t npx, std::size_t c);
    // dx[px,ch] += k[ch]*(dy[px,ch] - s1[ch] - xhat[px,ch]*s2[ch])
    void (*bn_bwd)(double* dx, const double* dy, const double* xhat, const double* k,
                   const double* s1, const double* s2, std::size_t npx, std::size_t c);

    // 1x1 channel mixing: w is row-major (cin, cout).
    // y[px,j] = b[j] + sum_i x[px,i]*w[i,j]
    void (*mix_fwd)(double* y, const double* x, const double* w, const double* b,
                    std::size_t npx, std::size_t cin, std::size_t cout);
    // dx[px,i] += sum_j dy[px,j]*w[i,j]   (reduction order may differ)
    void (*mix_bwd_x)(double* dx, const double* dy, const double* w,
                      std::size_t npx, std::size_t cin, std::size_t cout);
    // dw[i,j] += sum_px x[px,i]*dy[px,j]
    void (*mix_bwd_w)(double* dw, const double* x, const double* dy,
                      std::size_t npx, std::size_t cin, std::size_t cout);

    // Interleaved complex (re,im) arrays of n elements.
    // out = spec * mult
    void (*spec_mul)(double* out, const double* spec, const double* mult, std::size_t n);
    // acc += spec * conj(mult)
    void (*spec_mul_conj_acc)(double* acc, const double* spec, const double* mult, std::size_t n);

    double (*sum)(const double* x, std::size_t n);
    double (*sumsq)(const double* x, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*max_abs)(const double* x, std::size_t n);
};

/// Scalar reference table; always available.
const Ops& scalar_ops();

/// AVX2 table, or nullptr when unsupported by the build or the CPU.
const Ops* avx2_ops();

/// Active table. Defaults to the widest supported variant; the environment
/// variable RIESZNET_KERNELS=scalar|avx2 overrides the choice at startup.
const Ops& active();

/// Force a table ("auto", "scalar", "avx2"). Throws ConfigError for an
/// unknown name or an unsupported variant.
void select(std::string_view which);

} // namespace riesznet::kernels
