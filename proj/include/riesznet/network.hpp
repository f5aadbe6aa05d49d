#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "riesznet/autodiff.hpp"
#include "riesznet/image.hpp"

namespace riesznet::net {

enum class Head { SigmoidMap, CentralSoftmax };

struct NetworkConfig {
    std::vector<int> channels; // input channels first, output last
    Head head = Head::SigmoidMap;

    void validate() const;
    int hidden_layers() const { return static_cast<int>(channels.size()) - 2; }
};

/// Closed-form trainable parameter count:
///   sum over hidden layers of (5*c_in*c_out + c_out), plus the final plain
///   linear layer (c_last*c_final + c_final).
/// Batch normalization runs without trainable affine parameters here; its
/// scale and shift are absorbed by the mixing coefficients of the layer that
/// follows, which keeps the count at exactly this formula. (With trainable
/// affine enabled the total would grow by 2 * sum of hidden channel widths.)
std::size_t parameter_count(const NetworkConfig& cfg);

/// Stack of (batch_norm -> riesz_basis -> channel_mix -> relu) hidden layers
/// followed by a plain per-pixel linear layer and the head nonlinearity.
/// Accepts any spatial size >= 8x8; kernel banks are cached per size.
class RieszNetwork {
public:
    RieszNetwork(NetworkConfig cfg, std::uint64_t seed);

    const NetworkConfig& config() const { return cfg_; }

    /// Ordered registry of trainable parameters.
    std::vector<ad::Parameter*> parameters();
    std::size_t parameter_count() const { return net::parameter_count(cfg_); }

    /// Trunk + head on a batched (B,H,W,C_in) tensor. For the sigmoid-map
    /// head the result is (B,H,W,C_out) probabilities; for the central-pixel
    /// head it is (B,K) logits (softmax left to the loss / classify wrapper).
    ad::Tensor forward(ad::Tape* tape, const ad::Tensor& x, ad::Mode mode);

    /// Single grayscale image -> probability map of the same size.
    ImageField forward_segment(const ImageField& image, ad::Mode mode);

    /// Single grayscale image -> K class probabilities (sum to 1).
    std::vector<double> forward_classify(const ImageField& image);

    struct Layer {
        ad::Parameter coef; // (5*c_in, c_out)
        ad::Parameter bias; // (c_out)
        ad::Tensor bn_gamma, bn_beta; // fixed at 1 / 0, not trainable
        ad::BnState bn;
    };

    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }
    ad::Parameter& final_coef() { return final_coef_; }
    ad::Parameter& final_bias() { return final_bias_; }

    // training metadata carried through checkpoints
    int epoch = 0;
    double lr = 0.0;

private:
    NetworkConfig cfg_;
    std::vector<Layer> layers_;
    ad::Parameter final_coef_; // (c_last, c_final)
    ad::Parameter final_bias_;
};

// ---- checkpoint io (documented little-endian binary, magic "RZN1") ------

void save_checkpoint(const RieszNetwork& net, const std::string& path);
std::unique_ptr<RieszNetwork> load_checkpoint(const std::string& path);

/// Loads and verifies the stored config matches `expect`; a mismatch raises
/// an IoError naming the differing field.
std::unique_ptr<RieszNetwork> load_checkpoint(const std::string& path, const NetworkConfig& expect);

} // namespace riesznet::net
