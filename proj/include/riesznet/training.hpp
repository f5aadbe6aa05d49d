#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riesznet/image.hpp"
#include "riesznet/network.hpp"

namespace riesznet::train {

struct TrainConfig {
    int epochs = 50;
    double initial_lr = 1e-3;
    int lr_half_period = 20;
    int batch_size = 11;
    enum class Loss { WeightedBce, SoftmaxCe };
    Loss loss = Loss::WeightedBce;
    double crack_weight = 40.0;
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const;
};

/// lr = initial * 0.5^floor(epoch / half_period)
double lr_at_epoch(const TrainConfig& cfg, int epoch);

/// Per-parameter first/second moments with the usual defaults.
struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long long t = 0;
    std::vector<std::vector<double>> m, v;

    void init(const std::vector<ad::Parameter*>& params);
};

/// One bias-corrected update from the accumulated gradients; gradients are
/// zeroed afterwards. A non-finite gradient aborts, naming the parameter.
void adam_step(const std::vector<ad::Parameter*>& params, AdamState& state, double lr);

/// The 8 dihedral transforms of a square raster:
/// 0 identity, 1/2/3 rotations by 90/180/270, 4 horizontal flip,
/// 5 vertical flip, 6 transpose, 7 anti-transpose.
ImageField dihedral(const ImageField& in, int k);
Mask dihedral(const Mask& in, int k);

/// Segmentation sample: grayscale in [0,1], binary target, pixel weights.
struct Sample {
    ImageField image;
    Mask target;
    ImageField weight;
};

/// Weight map: crack_weight on crack-or-pore pixels, 1 elsewhere.
ImageField make_weight_map(const Mask& crack, const Mask& pore, double crack_weight);

Sample augment(const Sample& s, int k);

struct ClassSample {
    ImageField image; // grayscale in [0,1]
    int label = 0;
};

struct EpochStats {
    int epoch;
    double lr;
    double train_loss;
    double val_loss;
};

struct FitReport {
    std::vector<EpochStats> epochs;
    int best_epoch = -1;
    double best_val_loss = 0.0;
    bool diverged = false;
    std::string final_checkpoint;
    std::string best_checkpoint;
};

/// Epoch loop: seeded shuffling, per-epoch learning rate, validation in eval
/// mode, best-val + final checkpoints, loss curve CSV (epoch, lr, train_loss,
/// val_loss) under out_dir. Divergence (non-finite loss) stops training,
/// keeps the last good checkpoint as final, and marks the report.
FitReport fit_segmentation(net::RieszNetwork& net, const std::vector<Sample>& train_set,
                           const std::vector<Sample>& val_set, const TrainConfig& cfg,
                           const std::string& out_dir);

FitReport fit_classification(net::RieszNetwork& net, const std::vector<ClassSample>& train_set,
                             const std::vector<ClassSample>& val_set, const TrainConfig& cfg,
                             const std::string& out_dir);

} // namespace riesznet::train
