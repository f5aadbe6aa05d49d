#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "riesznet/image.hpp"

namespace riesznet::eval {

/// Pixel confusion counts plus the derived ratios.
/// Empty-denominator conventions: if prediction and ground truth are both
/// empty, all four ratios are 1; if only one side is empty they are 0.
struct MetricsRecord {
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0.0, recall = 0.0, dice = 0.0, iou = 0.0;

    void finalize();
};

/// Binarize `pred` at `threshold` and compare with `gt`.
MetricsRecord segmentation_metrics(const ImageField& pred, double threshold, const Mask& gt);

/// Sum the confusion counts, then derive ratios (micro average).
MetricsRecord micro_aggregate(const std::vector<MetricsRecord>& records);

/// Average the per-image ratios (macro average); counts are summed.
MetricsRecord macro_aggregate(const std::vector<MetricsRecord>& records);

using ForwardFn = std::function<ImageField(const ImageField&)>;

/// || L_a(model(f)) - model(L_a(f)) ||_2 / || L_a(model(f)) ||_2 with L_a the
/// anti-aliased integer downscale. 0 means perfect scale equivariance.
double delta_a(const ForwardFn& model, const ImageField& f, int factor);

struct EquivarianceRow {
    int factor = 1;
    double mean = 0.0, min = 0.0, max = 0.0;
    int n = 0;
};

struct EquivarianceReport {
    std::vector<EquivarianceRow> rows; // factors ascending
    std::string header;                // protocol notes recorded into the CSV
};

void write_equivariance_csv(const EquivarianceReport& report, const std::string& path);

struct SweepRow {
    double width = 0.0;
    int images = 0;
    MetricsRecord micro;
    MetricsRecord macro;
};

struct ScaleSweepReport {
    std::vector<SweepRow> rows; // widths ascending
};

/// Per-width aggregate metrics of `model` over the given test sets
/// (threshold 0.5, micro and macro aggregation both reported).
ScaleSweepReport scale_sweep(const ForwardFn& model,
                             const std::map<double, std::vector<std::pair<ImageField, Mask>>>& sets);

void write_sweep_csv(const ScaleSweepReport& report, const std::string& path);

/// Multi-scale baseline wrapper: run the model on downscaled copies, upsample
/// the maps back, and aggregate with the pixelwise maximum.
ImageField pyramid_inference(const ForwardFn& model, const ImageField& image,
                             const std::vector<int>& factors);

} // namespace riesznet::eval
