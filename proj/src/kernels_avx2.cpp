#include "riesznet/kernels.hpp"

#include <cmath>
#include <immintrin.h>

// AVX2 kernels. Per-element operation chains mirror kernels_scalar.cpp
// (mul then add, contraction disabled for this file), so everything except
// the flat reductions and mix_bwd_x reproduces the reference bit for bit.

namespace riesznet::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void k_add(double* dst, const double* a, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), _mm256_loadu_pd(a + i)));
    for (; i < n; ++i) dst[i] += a[i];
}

void k_axpy(double* dst, double alpha, const double* a, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_mul_pd(va, _mm256_loadu_pd(a + i));
        _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), t));
    }
    for (; i < n; ++i) dst[i] += alpha * a[i];
}

void k_scale(double* x, double alpha, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
    for (; i < n; ++i) x[i] *= alpha;
}

void k_mul(double* dst, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) dst[i] = a[i] * b[i];
}

void k_relu_fwd(double* y, const double* x, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
    for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void k_relu_bwd(double* dx, const double* dy, const double* x, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        __m256d vdx = _mm256_loadu_pd(dx + i);
        __m256d sum = _mm256_add_pd(vdx, _mm256_loadu_pd(dy + i));
        __m256d mask = _mm256_cmp_pd(vx, zero, _CMP_GT_OQ);
        _mm256_storeu_pd(dx + i, _mm256_blendv_pd(vdx, sum, mask));
    }
    for (; i < n; ++i)
        if (x[i] > 0.0) dx[i] += dy[i];
}

void k_adam_step(double* p, double* m, double* v, const double* g, std::size_t n,
                 double lr, double beta1, double beta2, double eps, double bc1, double bc2) {
    const __m256d vb1 = _mm256_set1_pd(beta1);
    const __m256d vb1m = _mm256_set1_pd(1.0 - beta1);
    const __m256d vb2 = _mm256_set1_pd(beta2);
    const __m256d vb2m = _mm256_set1_pd(1.0 - beta2);
    const __m256d vbc1 = _mm256_set1_pd(bc1);
    const __m256d vbc2 = _mm256_set1_pd(bc2);
    const __m256d veps = _mm256_set1_pd(eps);
    const __m256d vlr = _mm256_set1_pd(lr);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vg = _mm256_loadu_pd(g + i);
        __m256d vm = _mm256_add_pd(_mm256_mul_pd(vb1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(vb1m, vg));
        __m256d vv = _mm256_add_pd(_mm256_mul_pd(vb2, _mm256_loadu_pd(v + i)),
                                   _mm256_mul_pd(vb2m, _mm256_mul_pd(vg, vg)));
        _mm256_storeu_pd(m + i, vm);
        _mm256_storeu_pd(v + i, vv);
        __m256d mhat = _mm256_div_pd(vm, vbc1);
        __m256d vhat = _mm256_div_pd(vv, vbc2);
        __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
        __m256d step = _mm256_mul_pd(vlr, _mm256_div_pd(mhat, denom));
        _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        p[i] -= lr * (mhat / (std::sqrt(vhat) + eps));
    }
}

void k_colsum(double* acc, const double* x, std::size_t npx, std::size_t c) {
    for (std::size_t px = 0; px < npx; ++px) {
        const double* row = x + px * c;
        std::size_t ch = 0;
        for (; ch + 4 <= c; ch += 4)
            _mm256_storeu_pd(acc + ch, _mm256_add_pd(_mm256_loadu_pd(acc + ch), _mm256_loadu_pd(row + ch)));
        for (; ch < c; ++ch) acc[ch] += row[ch];
    }
}

void k_colsum2(double* acc, double* acc2, const double* x, std::size_t npx, std::size_t c) {
    for (std::size_t px = 0; px < npx; ++px) {
        const double* row = x + px * c;
        std::size_t ch = 0;
        for (; ch + 4 <= c; ch += 4) {
            __m256d v = _mm256_loadu_pd(row + ch);
            _mm256_storeu_pd(acc + ch, _mm256_add_pd(_mm256_loadu_pd(acc + ch), v));
            _mm256_storeu_pd(acc2 + ch,
                             _mm256_add_pd(_mm256_loadu_pd(acc2 + ch), _mm256_mul_pd(v, v)));
        }
        for (; ch < c; ++ch) {
            acc[ch] += row[ch];
            acc2[ch] += row[ch] * row[ch];
        }
    }
}

void k_coldot(double* acc, const double* a, const double* b, std::size_t npx, std::size_t c) {
    for (std::size_t px = 0; px < npx; ++px) {
        const double* ra = a + px * c;
        const double* rb = b + px * c;
        std::size_t ch = 0;
        for (; ch + 4 <= c; ch += 4) {
            __m256d t = _mm256_mul_pd(_mm256_loadu_pd(ra + ch), _mm256_loadu_pd(rb + ch));
            _mm256_storeu_pd(acc + ch, _mm256_add_pd(_mm256_loadu_pd(acc + ch), t));
        }
        for (; ch < c; ++ch) acc[ch] += ra[ch] * rb[ch];
    }
}

void k_bn_norm(double* y, const double* x, const double* mean, const double* inv_std,
               const double* gamma, const double* beta, std::size_t npx, std::size_t c) {
    for (std::size_t px = 0; px < npx; ++px) {
        const double* rx = x + px * c;
        double* ry = y + px * c;
        std::size_t ch = 0;
        for (; ch + 4 <= c; ch += 4) {
            __m256d xh = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(rx + ch), _mm256_loadu_pd(mean + ch)),
                                       _mm256_loadu_pd(inv_std + ch));
            __m256d out = _mm256_add_pd(_mm256_mul_pd(xh, _mm256_loadu_pd(gamma + ch)),
                                        _mm256_loadu_pd(beta + ch));
            _mm256_storeu_pd(ry + ch, out);
        }
        for (; ch < c; ++ch)
            ry[ch] = ((rx[ch] - mean[ch]) * inv_std[ch]) * gamma[ch] + beta[ch];
    }
}

void k_bn_bwd(double* dx, const double* dy, const double* xhat, const double* k,
              const double* s1, const double* s2, std::size_t npx, std::size_t c) {
    for (std::size_t px = 0; px < npx; ++px) {
        const double* rdy = dy + px * c;
        const double* rxh = xhat + px * c;
        double* rdx = dx + px * c;
        std::size_t ch = 0;
        for (; ch + 4 <= c; ch += 4) {
            __m256d inner = _mm256_sub_pd(_mm256_sub_pd(_mm256_loadu_pd(rdy + ch), _mm256_loadu_pd(s1 + ch)),
                                          _mm256_mul_pd(_mm256_loadu_pd(rxh + ch), _mm256_loadu_pd(s2 + ch)));
            __m256d t = _mm256_mul_pd(_mm256_loadu_pd(k + ch), inner);
            _mm256_storeu_pd(rdx + ch, _mm256_add_pd(_mm256_loadu_pd(rdx + ch), t));
        }
        for (; ch < c; ++ch)
            rdx[ch] += k[ch] * (rdy[ch] - s1[ch] - rxh[ch] * s2[ch]);
    }
}

void k_mix_fwd(double* y, const double* x, const double* w, const double* b,
               std::size_t npx, std::size_t cin, std::size_t cout) {
    const std::size_t jv = cout & ~std::size_t(3);
    for (std::size_t px = 0; px < npx; ++px) {
        const double* rx = x + px * cin;
        double* ry = y + px * cout;
        // blocks of 16 output channels stay in registers across the i loop
        std::size_t jb = 0;
        for (; jb + 16 <= jv; jb += 16) {
            __m256d a0 = _mm256_loadu_pd(b + jb);
            __m256d a1 = _mm256_loadu_pd(b + jb + 4);
            __m256d a2 = _mm256_loadu_pd(b + jb + 8);
            __m256d a3 = _mm256_loadu_pd(b + jb + 12);
            const double* wp = w + jb;
            for (std::size_t i = 0; i < cin; ++i, wp += cout) {
                const __m256d xi = _mm256_set1_pd(rx[i]);
                a0 = _mm256_add_pd(a0, _mm256_mul_pd(xi, _mm256_loadu_pd(wp)));
                a1 = _mm256_add_pd(a1, _mm256_mul_pd(xi, _mm256_loadu_pd(wp + 4)));
                a2 = _mm256_add_pd(a2, _mm256_mul_pd(xi, _mm256_loadu_pd(wp + 8)));
                a3 = _mm256_add_pd(a3, _mm256_mul_pd(xi, _mm256_loadu_pd(wp + 12)));
            }
            _mm256_storeu_pd(ry + jb, a0);
            _mm256_storeu_pd(ry + jb + 4, a1);
            _mm256_storeu_pd(ry + jb + 8, a2);
            _mm256_storeu_pd(ry + jb + 12, a3);
        }
        for (; jb + 4 <= jv; jb += 4) {
            __m256d acc = _mm256_loadu_pd(b + jb);
            const double* wp = w + jb;
            for (std::size_t i = 0; i < cin; ++i, wp += cout)
                acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(rx[i]), _mm256_loadu_pd(wp)));
            _mm256_storeu_pd(ry + jb, acc);
        }
        for (std::size_t j = jv; j < cout; ++j) {
            double acc = b[j];
            for (std::size_t i = 0; i < cin; ++i) acc += rx[i] * w[i * cout + j];
            ry[j] = acc;
        }
    }
}

void k_mix_bwd_x(double* dx, const double* dy, const double* w,
                 std::size_t npx, std::size_t cin, std::size_t cout) {
    for (std::size_t px = 0; px < npx; ++px) {
        const double* rdy = dy + px * cout;
        double* rdx = dx + px * cin;
        for (std::size_t i = 0; i < cin; ++i) {
            const double* wr = w + i * cout;
            __m256d vacc = _mm256_setzero_pd();
            std::size_t j = 0;
            for (; j + 4 <= cout; j += 4)
                vacc = _mm256_add_pd(vacc, _mm256_mul_pd(_mm256_loadu_pd(rdy + j), _mm256_loadu_pd(wr + j)));
            double acc = hsum(vacc);
            for (; j < cout; ++j) acc += rdy[j] * wr[j];
            rdx[i] += acc;
        }
    }
}

void k_mix_bwd_w(double* dw, const double* x, const double* dy,
                 std::size_t npx, std::size_t cin, std::size_t cout) {
    for (std::size_t px = 0; px < npx; ++px) {
        const double* rx = x + px * cin;
        const double* rdy = dy + px * cout;
        for (std::size_t i = 0; i < cin; ++i) {
            const __m256d xi = _mm256_set1_pd(rx[i]);
            double* wr = dw + i * cout;
            std::size_t j = 0;
            for (; j + 4 <= cout; j += 4) {
                __m256d t = _mm256_mul_pd(xi, _mm256_loadu_pd(rdy + j));
                _mm256_storeu_pd(wr + j, _mm256_add_pd(_mm256_loadu_pd(wr + j), t));
            }
            for (; j < cout; ++j) wr[j] += rx[i] * rdy[j];
        }
    }
}

void k_spec_mul(double* out, const double* spec, const double* mult, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d s = _mm256_loadu_pd(spec + 2 * i);
        __m256d k = _mm256_loadu_pd(mult + 2 * i);
        __m256d kre = _mm256_movedup_pd(k);
        __m256d kim = _mm256_permute_pd(k, 0xF);
        __m256d sswap = _mm256_permute_pd(s, 0x5);
        __m256d r = _mm256_addsub_pd(_mm256_mul_pd(kre, s), _mm256_mul_pd(kim, sswap));
        _mm256_storeu_pd(out + 2 * i, r);
    }
    for (; i < n; ++i) {
        const double sr = spec[2 * i], si = spec[2 * i + 1];
        const double kr = mult[2 * i], ki = mult[2 * i + 1];
        out[2 * i] = kr * sr - ki * si;
        out[2 * i + 1] = kr * si + ki * sr;
    }
}

void k_spec_mul_conj_acc(double* acc, const double* spec, const double* mult, std::size_t n) {
    const __m256d signmask = _mm256_set1_pd(-0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d s = _mm256_loadu_pd(spec + 2 * i);
        __m256d k = _mm256_loadu_pd(mult + 2 * i);
        __m256d kre = _mm256_movedup_pd(k);
        __m256d kim = _mm256_permute_pd(k, 0xF);
        __m256d sswap = _mm256_permute_pd(s, 0x5);
        __m256d b = _mm256_xor_pd(_mm256_mul_pd(kim, sswap), signmask);
        __m256d r = _mm256_addsub_pd(_mm256_mul_pd(kre, s), b);
        _mm256_storeu_pd(acc + 2 * i, _mm256_add_pd(_mm256_loadu_pd(acc + 2 * i), r));
    }
    for (; i < n; ++i) {
        const double sr = spec[2 * i], si = spec[2 * i + 1];
        const double kr = mult[2 * i], ki = mult[2 * i + 1];
        acc[2 * i] += kr * sr + ki * si;
        acc[2 * i + 1] += kr * si - ki * sr;
    }
}

double k_sum(const double* x, std::size_t n) {
    __m256d v = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) v = _mm256_add_pd(v, _mm256_loadu_pd(x + i));
    double s = hsum(v);
    for (; i < n; ++i) s += x[i];
    return s;
}

double k_sumsq(const double* x, std::size_t n) {
    __m256d v = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_loadu_pd(x + i);
        v = _mm256_add_pd(v, _mm256_mul_pd(a, a));
    }
    double s = hsum(v);
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

double k_dot(const double* a, const double* b, std::size_t n) {
    __m256d v = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        v = _mm256_add_pd(v, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    double s = hsum(v);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double k_max_abs(const double* x, std::size_t n) {
    const __m256d signmask = _mm256_set1_pd(-0.0);
    __m256d vm = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        vm = _mm256_max_pd(vm, _mm256_andnot_pd(signmask, _mm256_loadu_pd(x + i)));
    __m128d lo = _mm_max_pd(_mm256_castpd256_pd128(vm), _mm256_extractf128_pd(vm, 1));
    double m = _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) {
        const double a = std::fabs(x[i]);
        if (a > m) m = a;
    }
    return m;
}

} // namespace

const Ops* avx2_ops_impl() {
    static const Ops table = {
        "avx2",
        k_add, k_axpy, k_scale, k_mul, k_relu_fwd, k_relu_bwd, k_adam_step,
        k_colsum, k_colsum2, k_coldot, k_bn_norm, k_bn_bwd,
        k_mix_fwd, k_mix_bwd_x, k_mix_bwd_w,
        k_spec_mul, k_spec_mul_conj_acc,
        k_sum, k_sumsq, k_dot, k_max_abs,
    };
    return &table;
}

} // namespace riesznet::kernels
