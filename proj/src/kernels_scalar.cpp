#include "riesznet/kernels.hpp"

#include <cmath>

// Reference kernels. The SIMD variants mirror the exact expression shapes
// used here (mul then add, no FMA); the build disables contraction for this
// file so the reference rounding is the contract.

namespace riesznet::kernels {
namespace {

void k_add(double* dst, const double* a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += a[i];
}

void k_axpy(double* dst, double alpha, const double* a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += alpha * a[i];
}

void k_scale(double* x, double alpha, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void k_mul(double* dst, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}

void k_relu_fwd(double* y, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void k_relu_bwd(double* dx, const double* dy, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] > 0.0) dx[i] += dy[i];
}

void k_adam_step(double* p, double* m, double* v, const double* g, std::size_t n,
                 double lr, double beta1, double beta2, double eps, double bc1, double bc2) {
    for (std::size_t i = 0; i < n; ++i) {
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
        for (std::size_t ch = 0; ch < c; ++ch) acc[ch] += row[ch];
    }
}

void k_colsum2(double* acc, double* acc2, const double* x, std::size_t npx, std::size_t c) {
    for (std::size_t px = 0; px < npx; ++px) {
        const double* row = x + px * c;
        for (std::size_t ch = 0; ch < c; ++ch) {
            acc[ch] += row[ch];
            acc2[ch] += row[ch] * row[ch];
        }
    }
}

void k_coldot(double* acc, const double* a, const double* b, std::size_t npx, std::size_t c) {
    for (std::size_t px = 0; px < npx; ++px) {
        const double* ra = a + px * c;
        const double* rb = b + px * c;
        for (std::size_t ch = 0; ch < c; ++ch) acc[ch] += ra[ch] * rb[ch];
    }
}

void k_bn_norm(double* y, const double* x, const double* mean, const double* inv_std,
               const double* gamma, const double* beta, std::size_t npx, std::size_t c) {
    for (std::size_t px = 0; px < npx; ++px) {
        const double* rx = x + px * c;
        double* ry = y + px * c;
        for (std::size_t ch = 0; ch < c; ++ch)
            ry[ch] = ((rx[ch] - mean[ch]) * inv_std[ch]) * gamma[ch] + beta[ch];
    }
}

void k_bn_bwd(double* dx, const double* dy, const double* xhat, const double* k,
              const double* s1, const double* s2, std::size_t npx, std::size_t c) {
    for (std::size_t px = 0; px < npx; ++px) {
        const double* rdy = dy + px * c;
        const double* rxh = xhat + px * c;
        double* rdx = dx + px * c;
        for (std::size_t ch = 0; ch < c; ++ch)
            rdx[ch] += k[ch] * (rdy[ch] - s1[ch] - rxh[ch] * s2[ch]);
    }
}

void k_mix_fwd(double* y, const double* x, const double* w, const double* b,
               std::size_t npx, std::size_t cin, std::size_t cout) {
    for (std::size_t px = 0; px < npx; ++px) {
        const double* rx = x + px * cin;
        double* ry = y + px * cout;
        for (std::size_t j = 0; j < cout; ++j) ry[j] = b[j];
        for (std::size_t i = 0; i < cin; ++i) {
            const double xi = rx[i];
            const double* wr = w + i * cout;
            for (std::size_t j = 0; j < cout; ++j) ry[j] += xi * wr[j];
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
            double acc = 0.0;
            for (std::size_t j = 0; j < cout; ++j) acc += rdy[j] * wr[j];
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
            const double xi = rx[i];
            double* wr = dw + i * cout;
            for (std::size_t j = 0; j < cout; ++j) wr[j] += xi * rdy[j];
        }
    }
}

void k_spec_mul(double* out, const double* spec, const double* mult, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double sr = spec[2 * i], si = spec[2 * i + 1];
        const double kr = mult[2 * i], ki = mult[2 * i + 1];
        out[2 * i] = kr * sr - ki * si;
        out[2 * i + 1] = kr * si + ki * sr;
    }
}

void k_spec_mul_conj_acc(double* acc, const double* spec, const double* mult, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double sr = spec[2 * i], si = spec[2 * i + 1];
        const double kr = mult[2 * i], ki = mult[2 * i + 1];
        acc[2 * i] += kr * sr + ki * si;
        acc[2 * i + 1] += kr * si - ki * sr;
    }
}

double k_sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double k_sumsq(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

double k_dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double k_max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::fabs(x[i]);
        if (a > m) m = a;
    }
    return m;
}

} // namespace

const Ops& scalar_ops() {
    static const Ops table = {
        "scalar",
        k_add, k_axpy, k_scale, k_mul, k_relu_fwd, k_relu_bwd, k_adam_step,
        k_colsum, k_colsum2, k_coldot, k_bn_norm, k_bn_bwd,
        k_mix_fwd, k_mix_bwd_x, k_mix_bwd_w,
        k_spec_mul, k_spec_mul_conj_acc,
        k_sum, k_sumsq, k_dot, k_max_abs,
    };
    return table;
}

} // namespace riesznet::kernels
