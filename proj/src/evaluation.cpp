#include "riesznet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "riesznet/kernels.hpp"
#include "riesznet/resample.hpp"

namespace riesznet::eval {

void MetricsRecord::finalize() {
    const bool pred_empty = (tp + fp) == 0;
    const bool gt_empty = (tp + fn) == 0;
    if (pred_empty && gt_empty) {
        precision = recall = dice = iou = 1.0;
        return;
    }
    precision = pred_empty ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    recall = gt_empty ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    dice = (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    iou = static_cast<double>(tp) / static_cast<double>(tp + fp + fn);
}

MetricsRecord segmentation_metrics(const ImageField& pred, double threshold, const Mask& gt) {
    if (pred.h != gt.h || pred.w != gt.w)
        throw ShapeError("segmentation_metrics: prediction and ground truth sizes differ");
    MetricsRecord r;
    for (std::size_t i = 0; i < gt.v.size(); ++i) {
        const bool p = pred.v[i * pred.c] >= threshold;
        const bool t = gt.v[i] != 0;
        if (p && t) ++r.tp;
        else if (p && !t) ++r.fp;
        else if (!p && t) ++r.fn;
        else ++r.tn;
    }
    r.finalize();
    return r;
}

MetricsRecord micro_aggregate(const std::vector<MetricsRecord>& records) {
    MetricsRecord out;
    for (const auto& r : records) {
        out.tp += r.tp;
        out.fp += r.fp;
        out.fn += r.fn;
        out.tn += r.tn;
    }
    out.finalize();
    return out;
}

MetricsRecord macro_aggregate(const std::vector<MetricsRecord>& records) {
    MetricsRecord out;
    if (records.empty()) return out;
    for (const auto& r : records) {
        out.tp += r.tp;
        out.fp += r.fp;
        out.fn += r.fn;
        out.tn += r.tn;
        out.precision += r.precision;
        out.recall += r.recall;
        out.dice += r.dice;
        out.iou += r.iou;
    }
    const double n = static_cast<double>(records.size());
    out.precision /= n;
    out.recall /= n;
    out.dice /= n;
    out.iou /= n;
    return out;
}

double delta_a(const ForwardFn& model, const ImageField& f, int factor) {
    if (factor < 1) throw ConfigError("delta_a: factor must be >= 1");
    const ImageField full = model(f);
    const ImageField lhs = img::downscale(full, factor);
    const ImageField rhs = model(img::downscale(f, factor));
    if (lhs.h != rhs.h || lhs.w != rhs.w || lhs.c != rhs.c)
        throw ShapeError("delta_a: model changed the spatial size");
    const auto& ops = kernels::active();
    const double denom = std::sqrt(ops.sumsq(lhs.v.data(), lhs.v.size()));
    if (denom < 1e-12)
        throw NumericError("delta_a: measure undefined, ||L_a(model(f))|| is numerically zero");
    double num = 0.0;
    for (std::size_t i = 0; i < lhs.v.size(); ++i) {
        const double d = lhs.v[i] - rhs.v[i];
        num += d * d;
    }
    return std::sqrt(num) / denom;
}

void write_equivariance_csv(const EquivarianceReport& report, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path);
    if (!report.header.empty()) os << "# " << report.header << "\n";
    os << "factor,mean_delta,min_delta,max_delta,n\n";
    for (const auto& r : report.rows) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g,%d\n", r.factor, r.mean, r.min, r.max,
                      r.n);
        os << buf;
    }
}

ScaleSweepReport scale_sweep(const ForwardFn& model,
                             const std::map<double, std::vector<std::pair<ImageField, Mask>>>& sets) {
    ScaleSweepReport report;
    for (const auto& [width, samples] : sets) {
        if (samples.empty())
            throw ConfigError("scale_sweep: empty test set for width " + std::to_string(width));
        std::vector<MetricsRecord> per_image;
        per_image.reserve(samples.size());
        for (const auto& [image, gt] : samples)
            per_image.push_back(segmentation_metrics(model(image), 0.5, gt));
        SweepRow row;
        row.width = width;
        row.images = static_cast<int>(samples.size());
        row.micro = micro_aggregate(per_image);
        row.macro = macro_aggregate(per_image);
        report.rows.push_back(row);
    }
    return report;
}

void write_sweep_csv(const ScaleSweepReport& report, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << "width,images,precision,recall,dice,iou,macro_precision,macro_recall,macro_dice,macro_iou\n";
    for (const auto& r : report.rows) {
        char buf[300];
        std::snprintf(buf, sizeof(buf), "%g,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.width,
                      r.images, r.micro.precision, r.micro.recall, r.micro.dice, r.micro.iou,
                      r.macro.precision, r.macro.recall, r.macro.dice, r.macro.iou);
        os << buf;
    }
}

ImageField pyramid_inference(const ForwardFn& model, const ImageField& image,
                             const std::vector<int>& factors) {
    if (factors.empty()) throw ConfigError("pyramid_inference: factor set must be nonempty");
    const int limit = std::min(image.h, image.w) / 8;
    ImageField agg;
    bool first = true;
    for (int a : factors) {
        if (a < 1) throw ConfigError("pyramid_inference: factors must be >= 1");
        if (a > limit)
            throw ConfigError("pyramid_inference: factor " + std::to_string(a) +
                              " too large for image (limit " + std::to_string(limit) + ")");
        ImageField map;
        if (a == 1) {
            map = model(image);
        } else {
            ImageField small = model(img::downscale(image, a));
            map = img::resample_bilinear(small, image.h, image.w);
        }
        if (first) {
            agg = std::move(map);
            first = false;
        } else {
            if (!agg.same_size(map)) throw ShapeError("pyramid_inference: inconsistent map sizes");
            for (std::size_t i = 0; i < agg.v.size(); ++i) agg.v[i] = std::max(agg.v[i], map.v[i]);
        }
    }
    return agg;
}

} // namespace riesznet::eval
