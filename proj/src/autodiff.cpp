#include "riesznet/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "riesznet/kernels.hpp"

namespace riesznet::ad {

std::string Shape::str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(d[i]);
    }
    return s + ")";
}

Tensor make_tensor(Shape shape, bool requires_grad) {
    auto n = std::make_shared<Node>();
    n->val.assign(shape.numel(), 0.0);
    n->shape = std::move(shape);
    n->requires_grad = requires_grad;
    return n;
}

Tensor make_tensor(Shape shape, std::vector<double> values, bool requires_grad) {
    if (values.size() != shape.numel())
        throw ShapeError("make_tensor: value count does not match shape " + shape.str());
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->val = std::move(values);
    n->requires_grad = requires_grad;
    return n;
}

void Tape::backward(const Tensor& loss) {
    if (loss->val.size() != 1)
        throw ShapeError("Tape::backward expects a scalar loss, got shape " + loss->shape.str());
    loss->ensure_grad();
    loss->grad[0] = 1.0;
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
    steps_.clear();
}

namespace {

void check_finite(const char* op, const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) throw NumericError(std::string(op) + ": non-finite value in forward output");
}

bool wants_grad(Tape* tape, std::initializer_list<const Tensor*> inputs) {
    if (!tape) return false;
    for (const Tensor* t : inputs)
        if ((*t)->requires_grad) return true;
    return false;
}

} // namespace

Tensor riesz_basis(Tape* tape, const Tensor& x) {
    if (x->shape.d.size() != 4)
        throw ShapeError("riesz_basis expects a (B,H,W,C) tensor, got " + x->shape.str());
    const int b = x->shape.d[0], h = x->shape.d[1], w = x->shape.d[2], c = x->shape.d[3];
    auto bank = spectral::BankCache::instance().get(h, w);

    Tensor out = make_tensor(Shape{b, h, w, 5 * c});
    const std::size_t npx = static_cast<std::size_t>(h) * w;
    std::vector<double> plane(npx), resp(5 * npx);
    const std::size_t cin = static_cast<std::size_t>(c), cout = 5 * cin;
    for (int bi = 0; bi < b; ++bi) {
        const double* xb = x->val.data() + bi * npx * cin;
        double* ob = out->val.data() + bi * npx * cout;
        for (std::size_t ch = 0; ch < cin; ++ch) {
            for (std::size_t p = 0; p < npx; ++p) plane[p] = xb[p * cin + ch];
            spectral::riesz_apply_planes(*bank, plane.data(), resp.data());
            for (int k = 0; k < 5; ++k) {
                const double* rk = resp.data() + k * npx;
                for (std::size_t p = 0; p < npx; ++p) ob[p * cout + 5 * ch + k] = rk[p];
            }
        }
    }
    check_finite("riesz_basis", out->val);

    if (wants_grad(tape, {&x})) {
        out->requires_grad = true;
        Tensor xs = x;
        tape->record([xs, out, bank, b, h, w, c]() {
            xs->ensure_grad();
            const std::size_t npx = static_cast<std::size_t>(h) * w;
            const std::size_t cin = static_cast<std::size_t>(c), cout = 5 * cin;
            std::vector<double> cot(5 * npx), dx(npx);
            for (int bi = 0; bi < b; ++bi) {
                const double* gb = out->grad.data() + bi * npx * cout;
                double* gx = xs->grad.data() + bi * npx * cin;
                for (std::size_t ch = 0; ch < cin; ++ch) {
                    for (int k = 0; k < 5; ++k)
                        for (std::size_t p = 0; p < npx; ++p)
                            cot[k * npx + p] = gb[p * cout + 5 * ch + k];
                    spectral::riesz_adjoint_planes(*bank, cot.data(), dx.data());
                    for (std::size_t p = 0; p < npx; ++p) gx[p * cin + ch] += dx[p];
                }
            }
        });
    }
    return out;
}

Tensor channel_mix(Tape* tape, const Tensor& x, const Tensor& w, const Tensor& bias) {
    if (x->shape.d.size() < 2)
        throw ShapeError("channel_mix expects at least 2 dims, got " + x->shape.str());
    if (w->shape.d.size() != 2)
        throw ShapeError("channel_mix weights must be 2d (cin,cout), got " + w->shape.str());
    const int cin = w->shape.d[0], cout = w->shape.d[1];
    if (x->shape.back() != cin)
        throw ShapeError("channel_mix: input has " + std::to_string(x->shape.back()) +
                         " channels, weights expect " + std::to_string(cin));
    if (bias->shape.d.size() != 1 || bias->shape.d[0] != cout)
        throw ShapeError("channel_mix: bias shape " + bias->shape.str() + " must be (" +
                         std::to_string(cout) + ")");

    Shape oshape = x->shape;
    oshape.d.back() = cout;
    Tensor out = make_tensor(oshape);
    const std::size_t npx = x->shape.numel() / cin;
    kernels::active().mix_fwd(out->val.data(), x->val.data(), w->val.data(), bias->val.data(),
                              npx, cin, cout);
    check_finite("channel_mix", out->val);

    if (wants_grad(tape, {&x, &w, &bias})) {
        out->requires_grad = true;
        Tensor xs = x, ws = w, bs = bias;
        tape->record([xs, ws, bs, out, npx, cin, cout]() {
            const auto& ops = kernels::active();
            if (xs->requires_grad) {
                xs->ensure_grad();
                ops.mix_bwd_x(xs->grad.data(), out->grad.data(), ws->val.data(), npx, cin, cout);
            }
            if (ws->requires_grad) {
                ws->ensure_grad();
                ops.mix_bwd_w(ws->grad.data(), xs->val.data(), out->grad.data(), npx, cin, cout);
            }
            if (bs->requires_grad) {
                bs->ensure_grad();
                ops.colsum(bs->grad.data(), out->grad.data(), npx, cout);
            }
        });
    }
    return out;
}

Tensor batch_norm(Tape* tape, const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  BnState& state, Mode mode, double momentum, double eps) {
    const int c = x->shape.back();
    if (gamma->shape.numel() != static_cast<std::size_t>(c) ||
        beta->shape.numel() != static_cast<std::size_t>(c))
        throw ShapeError("batch_norm: gamma/beta length must equal channel count " + std::to_string(c));
    if (state.mean.size() != static_cast<std::size_t>(c))
        throw ShapeError("batch_norm: running-stat length mismatch");

    const std::size_t npx = x->shape.numel() / c;
    std::vector<double> mean(c, 0.0), var(c, 0.0), inv_std(c);
    const auto& ops = kernels::active();

    if (mode == Mode::Train) {
        std::vector<double> sum2(c, 0.0);
        ops.colsum2(mean.data(), sum2.data(), x->val.data(), npx, c);
        const double inv_n = 1.0 / static_cast<double>(npx);
        for (int ch = 0; ch < c; ++ch) {
            mean[ch] *= inv_n;
            var[ch] = sum2[ch] * inv_n - mean[ch] * mean[ch];
            if (var[ch] < 0.0) var[ch] = 0.0; // rounding guard
        }
        for (int ch = 0; ch < c; ++ch) {
            state.mean[ch] = (1.0 - momentum) * state.mean[ch] + momentum * mean[ch];
            state.var[ch] = (1.0 - momentum) * state.var[ch] + momentum * var[ch];
        }
        state.initialized = true;
    } else {
        if (!state.initialized)
            throw NumericError("batch_norm: eval mode before any training statistics exist");
        mean = state.mean;
        var = state.var;
    }
    for (int ch = 0; ch < c; ++ch) inv_std[ch] = 1.0 / std::sqrt(var[ch] + eps);

    Tensor out = make_tensor(x->shape);
    ops.bn_norm(out->val.data(), x->val.data(), mean.data(), inv_std.data(), gamma->val.data(),
                beta->val.data(), npx, c);
    check_finite("batch_norm", out->val);

    if (wants_grad(tape, {&x, &gamma, &beta})) {
        out->requires_grad = true;
        // xhat is re-derivable from the saved statistics
        auto mean_s = std::make_shared<std::vector<double>>(std::move(mean));
        auto inv_s = std::make_shared<std::vector<double>>(std::move(inv_std));
        Tensor xs = x, gs = gamma, bs = beta;
        const bool batch_stats = (mode == Mode::Train);
        tape->record([xs, gs, bs, out, mean_s, inv_s, npx, c, batch_stats]() {
            const auto& ops = kernels::active();
            std::vector<double> xhat(xs->val.size());
            {
                std::vector<double> one(c, 1.0), zero(c, 0.0);
                ops.bn_norm(xhat.data(), xs->val.data(), mean_s->data(), inv_s->data(), one.data(),
                            zero.data(), npx, c);
            }
            std::vector<double> dsum(c, 0.0), dxhat_dot(c, 0.0);
            ops.colsum(dsum.data(), out->grad.data(), npx, c);
            ops.coldot(dxhat_dot.data(), out->grad.data(), xhat.data(), npx, c);
            if (gs->requires_grad) {
                gs->ensure_grad();
                for (int ch = 0; ch < c; ++ch) gs->grad[ch] += dxhat_dot[ch];
            }
            if (bs->requires_grad) {
                bs->ensure_grad();
                for (int ch = 0; ch < c; ++ch) bs->grad[ch] += dsum[ch];
            }
            if (xs->requires_grad) {
                xs->ensure_grad();
                std::vector<double> k(c), s1(c, 0.0), s2(c, 0.0);
                const double inv_n = 1.0 / static_cast<double>(npx);
                for (int ch = 0; ch < c; ++ch) k[ch] = gs->val[ch] * (*inv_s)[ch];
                if (batch_stats) {
                    for (int ch = 0; ch < c; ++ch) {
                        s1[ch] = dsum[ch] * inv_n;
                        s2[ch] = dxhat_dot[ch] * inv_n;
                    }
                }
                ops.bn_bwd(xs->grad.data(), out->grad.data(), xhat.data(), k.data(), s1.data(),
                           s2.data(), npx, c);
            }
        });
    }
    return out;
}

Tensor relu(Tape* tape, const Tensor& x) {
    Tensor out = make_tensor(x->shape);
    kernels::active().relu_fwd(out->val.data(), x->val.data(), x->val.size());
    check_finite("relu", out->val);
    if (wants_grad(tape, {&x})) {
        out->requires_grad = true;
        Tensor xs = x;
        tape->record([xs, out]() {
            xs->ensure_grad();
            kernels::active().relu_bwd(xs->grad.data(), out->grad.data(), xs->val.data(),
                                       xs->val.size());
        });
    }
    return out;
}

Tensor sigmoid(Tape* tape, const Tensor& x) {
    Tensor out = make_tensor(x->shape);
    for (std::size_t i = 0; i < x->val.size(); ++i) {
        const double v = x->val[i];
        if (v >= 0.0) {
            out->val[i] = 1.0 / (1.0 + std::exp(-v));
        } else {
            const double e = std::exp(v);
            out->val[i] = e / (1.0 + e);
        }
    }
    check_finite("sigmoid", out->val);
    if (wants_grad(tape, {&x})) {
        out->requires_grad = true;
        Tensor xs = x;
        tape->record([xs, out]() {
            xs->ensure_grad();
            for (std::size_t i = 0; i < xs->val.size(); ++i) {
                const double s = out->val[i];
                xs->grad[i] += out->grad[i] * s * (1.0 - s);
            }
        });
    }
    return out;
}

Tensor add(Tape* tape, const Tensor& a, const Tensor& b) {
    if (!(a->shape == b->shape))
        throw ShapeError("add: shapes differ, " + a->shape.str() + " vs " + b->shape.str());
    Tensor out = make_tensor(a->shape);
    for (std::size_t i = 0; i < a->val.size(); ++i) out->val[i] = a->val[i] + b->val[i];
    check_finite("add", out->val);
    if (wants_grad(tape, {&a, &b})) {
        out->requires_grad = true;
        Tensor as = a, bs = b;
        tape->record([as, bs, out]() {
            const auto& ops = kernels::active();
            if (as->requires_grad) {
                as->ensure_grad();
                ops.add(as->grad.data(), out->grad.data(), out->grad.size());
            }
            if (bs->requires_grad) {
                bs->ensure_grad();
                ops.add(bs->grad.data(), out->grad.data(), out->grad.size());
            }
        });
    }
    return out;
}

Tensor extract_center(Tape* tape, const Tensor& x) {
    if (x->shape.d.size() != 4)
        throw ShapeError("extract_center expects (B,H,W,C), got " + x->shape.str());
    const int b = x->shape.d[0], h = x->shape.d[1], w = x->shape.d[2], c = x->shape.d[3];
    const int cy = h / 2, cx = w / 2;
    Tensor out = make_tensor(Shape{b, c});
    const std::size_t row = (static_cast<std::size_t>(cy) * w + cx) * c;
    const std::size_t per_b = static_cast<std::size_t>(h) * w * c;
    for (int bi = 0; bi < b; ++bi)
        for (int ch = 0; ch < c; ++ch)
            out->val[static_cast<std::size_t>(bi) * c + ch] = x->val[bi * per_b + row + ch];
    if (wants_grad(tape, {&x})) {
        out->requires_grad = true;
        Tensor xs = x;
        tape->record([xs, out, b, c, per_b, row]() {
            xs->ensure_grad();
            for (int bi = 0; bi < b; ++bi)
                for (int ch = 0; ch < c; ++ch)
                    xs->grad[bi * per_b + row + ch] += out->grad[static_cast<std::size_t>(bi) * c + ch];
        });
    }
    return out;
}

Tensor weighted_bce(Tape* tape, const Tensor& pred, const Tensor& target, const Tensor& weight) {
    if (!(pred->shape == target->shape) || !(pred->shape == weight->shape))
        throw ShapeError("weighted_bce: pred/target/weight shapes must match");
    for (double t : target->val)
        if (t != 0.0 && t != 1.0)
            throw ConfigError("weighted_bce: target values must be exactly 0 or 1");

    constexpr double lo = 1e-7, hi = 1.0 - 1e-7;
    const std::size_t n = pred->val.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = std::clamp(pred->val[i], lo, hi);
        const double t = target->val[i];
        acc += weight->val[i] * (-(t * std::log(p)) - (1.0 - t) * std::log(1.0 - p));
    }
    Tensor out = make_tensor(Shape{1});
    out->val[0] = acc / static_cast<double>(n);
    check_finite("weighted_bce", out->val);

    if (wants_grad(tape, {&pred})) {
        out->requires_grad = true;
        Tensor ps = pred, ts = target, ws = weight;
        tape->record([ps, ts, ws, out, n]() {
            ps->ensure_grad();
            const double g = out->grad[0] / static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double praw = ps->val[i];
                if (praw <= lo || praw >= hi) continue; // clamp region, zero subgradient
                const double t = ts->val[i];
                ps->grad[i] += g * ws->val[i] * (-t / praw + (1.0 - t) / (1.0 - praw));
            }
        });
    }
    return out;
}

Tensor softmax_ce(Tape* tape, const Tensor& logits, const std::vector<int>& labels) {
    if (logits->shape.d.size() != 2)
        throw ShapeError("softmax_ce expects (B,K) logits, got " + logits->shape.str());
    const int b = logits->shape.d[0], k = logits->shape.d[1];
    if (static_cast<int>(labels.size()) != b)
        throw ShapeError("softmax_ce: label count " + std::to_string(labels.size()) +
                         " does not match batch " + std::to_string(b));
    for (int lab : labels)
        if (lab < 0 || lab >= k)
            throw ConfigError("softmax_ce: label " + std::to_string(lab) + " out of range [0," +
                              std::to_string(k) + ")");

    double acc = 0.0;
    for (int bi = 0; bi < b; ++bi) {
        const double* row = logits->val.data() + static_cast<std::size_t>(bi) * k;
        double m = row[0];
        for (int j = 1; j < k; ++j) m = std::max(m, row[j]);
        double se = 0.0;
        for (int j = 0; j < k; ++j) se += std::exp(row[j] - m);
        acc += (m + std::log(se)) - row[labels[bi]];
    }
    Tensor out = make_tensor(Shape{1});
    out->val[0] = acc / b;
    check_finite("softmax_ce", out->val);

    if (wants_grad(tape, {&logits})) {
        out->requires_grad = true;
        Tensor ls = logits;
        auto labs = std::make_shared<std::vector<int>>(labels);
        tape->record([ls, labs, out, b, k]() {
            ls->ensure_grad();
            const double g = out->grad[0] / b;
            for (int bi = 0; bi < b; ++bi) {
                const double* row = ls->val.data() + static_cast<std::size_t>(bi) * k;
                double* grow = ls->grad.data() + static_cast<std::size_t>(bi) * k;
                double m = row[0];
                for (int j = 1; j < k; ++j) m = std::max(m, row[j]);
                double se = 0.0;
                for (int j = 0; j < k; ++j) se += std::exp(row[j] - m);
                for (int j = 0; j < k; ++j) {
                    const double soft = std::exp(row[j] - m) / se;
                    grow[j] += g * (soft - (j == (*labs)[bi] ? 1.0 : 0.0));
                }
            }
        });
    }
    return out;
}

double grad_check(const std::function<Tensor(Tape*)>& make_loss, const std::vector<Tensor>& wrt,
                  double h, int coords_per_tensor) {
    for (const Tensor& t : wrt) t->zero_grad();
    Tape tape;
    Tensor loss = make_loss(&tape);
    tape.backward(loss);

    std::vector<std::vector<double>> analytic;
    analytic.reserve(wrt.size());
    for (const Tensor& t : wrt) {
        t->ensure_grad();
        analytic.push_back(t->grad);
    }

    double worst = 0.0;
    for (std::size_t ti = 0; ti < wrt.size(); ++ti) {
        Tensor t = wrt[ti];
        const std::size_t n = t->val.size();
        std::size_t stride = 1;
        if (coords_per_tensor > 0 && n > static_cast<std::size_t>(coords_per_tensor))
            stride = n / static_cast<std::size_t>(coords_per_tensor);
        for (std::size_t i = 0; i < n; i += stride) {
            const double saved = t->val[i];
            t->val[i] = saved + h;
            const double lp = make_loss(nullptr)->val[0];
            t->val[i] = saved - h;
            const double lm = make_loss(nullptr)->val[0];
            t->val[i] = saved;
            const double fd = (lp - lm) / (2.0 * h);
            const double a = analytic[ti][i];
            const double denom = std::max({std::fabs(a), std::fabs(fd), 1e-6});
            worst = std::max(worst, std::fabs(a - fd) / denom);
        }
    }
    return worst;
}

} // namespace riesznet::ad
