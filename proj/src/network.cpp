#include "riesznet/network.hpp"

#include <cmath>

#include "riesznet/rng.hpp"

namespace riesznet::net {

void NetworkConfig::validate() const {
    if (channels.size() < 2)
        throw ConfigError("network channel tuple needs at least input and output entries");
    for (int c : channels)
        if (c <= 0) throw ConfigError("network channel sizes must be positive");
}

std::size_t parameter_count(const NetworkConfig& cfg) {
    cfg.validate();
    std::size_t total = 0;
    const auto& ch = cfg.channels;
    for (std::size_t i = 0; i + 2 < ch.size(); ++i)
        total += static_cast<std::size_t>(ch[i]) * 5 * ch[i + 1] + ch[i + 1];
    total += static_cast<std::size_t>(ch[ch.size() - 2]) * ch.back() + ch.back();
    return total;
}

RieszNetwork::RieszNetwork(NetworkConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
    cfg_.validate();
    Rng rng(seed);
    const auto& ch = cfg_.channels;
    for (std::size_t i = 0; i + 2 < ch.size(); ++i) {
        const int cin = ch[i], cout = ch[i + 1];
        Layer layer;
        const std::string prefix = "layer" + std::to_string(i);
        layer.coef = ad::Parameter(prefix + ".coef", ad::Shape{5 * cin, cout});
        layer.bias = ad::Parameter(prefix + ".bias", ad::Shape{cout});
        const double bound = 1.0 / std::sqrt(5.0 * cin);
        for (double& v : layer.coef.t->val) v = rng.uniform(-bound, bound);
        layer.bn_gamma = ad::make_tensor(ad::Shape{cin});
        layer.bn_beta = ad::make_tensor(ad::Shape{cin});
        std::fill(layer.bn_gamma->val.begin(), layer.bn_gamma->val.end(), 1.0);
        layer.bn = ad::BnState(cin);
        layers_.push_back(std::move(layer));
    }
    const int clast = ch[ch.size() - 2], cfinal = ch.back();
    final_coef_ = ad::Parameter("final.coef", ad::Shape{clast, cfinal});
    final_bias_ = ad::Parameter("final.bias", ad::Shape{cfinal});
    const double bound = 1.0 / std::sqrt(static_cast<double>(clast));
    for (double& v : final_coef_.t->val) v = rng.uniform(-bound, bound);
}

std::vector<ad::Parameter*> RieszNetwork::parameters() {
    std::vector<ad::Parameter*> out;
    for (auto& l : layers_) {
        out.push_back(&l.coef);
        out.push_back(&l.bias);
    }
    out.push_back(&final_coef_);
    out.push_back(&final_bias_);
    return out;
}

ad::Tensor RieszNetwork::forward(ad::Tape* tape, const ad::Tensor& x, ad::Mode mode) {
    if (x->shape.d.size() != 4)
        throw ShapeError("network forward expects a (B,H,W,C) tensor, got " + x->shape.str());
    if (x->shape.d[3] != cfg_.channels.front())
        throw ShapeError("network forward: input has " + std::to_string(x->shape.d[3]) +
                         " channels, config expects " + std::to_string(cfg_.channels.front()));
    if (x->shape.d[1] < 8 || x->shape.d[2] < 8)
        throw ShapeError("network forward needs spatial size >= 8x8");

    ad::Tensor h = x;
    for (auto& layer : layers_) {
        h = ad::batch_norm(tape, h, layer.bn_gamma, layer.bn_beta, layer.bn, mode);
        h = ad::riesz_basis(tape, h);
        h = ad::channel_mix(tape, h, layer.coef.t, layer.bias.t);
        h = ad::relu(tape, h);
    }
    if (cfg_.head == Head::SigmoidMap) {
        h = ad::channel_mix(tape, h, final_coef_.t, final_bias_.t);
        h = ad::sigmoid(tape, h);
    } else {
        h = ad::extract_center(tape, h);
        h = ad::channel_mix(tape, h, final_coef_.t, final_bias_.t);
    }
    return h;
}

ImageField RieszNetwork::forward_segment(const ImageField& image, ad::Mode mode) {
    if (cfg_.head != Head::SigmoidMap)
        throw ConfigError("forward_segment requires the sigmoid-map head");
    if (image.c != cfg_.channels.front())
        throw ShapeError("forward_segment: channel mismatch");
    ad::Tensor x = ad::make_tensor(ad::Shape{1, image.h, image.w, image.c}, image.v);
    ad::Tensor y = forward(nullptr, x, mode);
    ImageField out(image.h, image.w, cfg_.channels.back());
    out.v = y->val;
    return out;
}

std::vector<double> RieszNetwork::forward_classify(const ImageField& image) {
    if (cfg_.head != Head::CentralSoftmax)
        throw ConfigError("forward_classify requires the central-pixel-softmax head");
    ad::Tensor x = ad::make_tensor(ad::Shape{1, image.h, image.w, image.c}, image.v);
    ad::Tensor logits = forward(nullptr, x, ad::Mode::Eval);
    const int k = cfg_.channels.back();
    std::vector<double> scores(k);
    double m = logits->val[0];
    for (int j = 1; j < k; ++j) m = std::max(m, logits->val[j]);
    double se = 0.0;
    for (int j = 0; j < k; ++j) {
        scores[j] = std::exp(logits->val[j] - m);
        se += scores[j];
    }
    for (double& s : scores) s /= se;
    return scores;
}

} // namespace riesznet::net
