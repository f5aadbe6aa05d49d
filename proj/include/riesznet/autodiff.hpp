#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "riesznet/common.hpp"
#include "riesznet/spectral.hpp"

namespace riesznet::ad {

struct Shape {
    std::vector<int> d;
    Shape() = default;
    Shape(std::initializer_list<int> dims) : d(dims) {}
    explicit Shape(std::vector<int> dims) : d(std::move(dims)) {}
    std::size_t numel() const {
        std::size_t n = 1;
        for (int x : d) n *= static_cast<std::size_t>(x);
        return n;
    }
    int back() const { return d.back(); }
    bool operator==(const Shape& o) const { return d == o.d; }
    std::string str() const;
};

/// Value node. Gradient storage is lazily allocated and always matches the
/// value shape.
struct Node {
    Shape shape;
    std::vector<double> val;
    std::vector<double> grad;
    bool requires_grad = false;

    void ensure_grad() {
        if (grad.size() != val.size()) grad.assign(val.size(), 0.0);
    }
    void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

using Tensor = std::shared_ptr<Node>;

Tensor make_tensor(Shape shape, bool requires_grad = false);
Tensor make_tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

/// Ordered record of executed operations. backward() replays the record in
/// exact reverse order; every step adds into the gradients of its inputs.
class Tape {
public:
    void record(std::function<void()> step) { steps_.push_back(std::move(step)); }
    std::size_t size() const { return steps_.size(); }

    /// Seeds d(loss)/d(loss) = 1 and runs all recorded steps in reverse.
    /// The record is consumed: saved activations free up as it unwinds.
    void backward(const Tensor& loss);

private:
    std::vector<std::function<void()>> steps_;
};

/// Named trainable tensor.
struct Parameter {
    std::string name;
    Tensor t;

    Parameter() = default;
    Parameter(std::string n, Shape shape) : name(std::move(n)), t(make_tensor(shape, true)) {}
};

enum class Mode { Train, Eval };

/// Per-channel running statistics owned by whoever holds the batch_norm call
/// site. Eval-mode normalization before the first training update is an error.
struct BnState {
    std::vector<double> mean, var;
    bool initialized = false;
    explicit BnState(int channels = 0)
        : mean(static_cast<std::size_t>(channels), 0.0), var(static_cast<std::size_t>(channels), 1.0) {}
};

// ---- operations --------------------------------------------------------
// `tape` may be null for pure inference; gradients then neither flow nor
// get recorded.

/// (B,H,W,C) -> (B,H,W,5C): the five Riesz responses per input channel,
/// ordered (R1, R2, R20, R11, R02). Banks come from the shared cache.
Tensor riesz_basis(Tape* tape, const Tensor& x);

/// y[..., j] = bias[j] + sum_i x[..., i] * w[i, j] over the last axis;
/// works for (B,H,W,Cin) and (B,Cin) alike.
Tensor channel_mix(Tape* tape, const Tensor& x, const Tensor& w, const Tensor& bias);

Tensor batch_norm(Tape* tape, const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  BnState& state, Mode mode, double momentum = 0.1, double eps = 1e-5);

Tensor relu(Tape* tape, const Tensor& x);
Tensor sigmoid(Tape* tape, const Tensor& x);

/// Elementwise sum of two same-shape tensors.
Tensor add(Tape* tape, const Tensor& a, const Tensor& b);

/// (B,H,W,C) -> (B,C), reading pixel (H/2, W/2).
Tensor extract_center(Tape* tape, const Tensor& x);

/// Mean over all elements of weight*(-t*log p - (1-t)*log(1-p)) with p
/// clamped to [1e-7, 1-1e-7]. Gradient flows to pred only.
Tensor weighted_bce(Tape* tape, const Tensor& pred, const Tensor& target, const Tensor& weight);

/// Stable log-sum-exp cross-entropy, mean over the batch.
Tensor softmax_ce(Tape* tape, const Tensor& logits, const std::vector<int>& labels);

// ---- verification harness ----------------------------------------------

/// Central-difference check of d(loss)/d(wrt) against the tape gradients.
/// `make_loss` must be a pure function of the wrt tensors (re-invoked per
/// perturbed coordinate). When coords_per_tensor > 0, only that many evenly
/// spaced coordinates of each tensor are probed. Returns the worst relative
/// error, with denominators floored at 1e-6 so zero-gradient cases stay
/// finite.
double grad_check(const std::function<Tensor(Tape*)>& make_loss,
                  const std::vector<Tensor>& wrt, double h = 1e-4,
                  int coords_per_tensor = -1);

} // namespace riesznet::ad
