#include "riesznet/training.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "riesznet/kernels.hpp"
#include "riesznet/rng.hpp"

namespace riesznet::train {

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (!(initial_lr > 0.0)) throw ConfigError("train: initial_lr must be > 0");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (lr_half_period < 1) throw ConfigError("train: lr_half_period must be >= 1");
}

double lr_at_epoch(const TrainConfig& cfg, int epoch) {
    if (epoch < 0) throw ConfigError("lr_at_epoch: epoch must be >= 0");
    return cfg.initial_lr * std::pow(0.5, static_cast<double>(epoch / cfg.lr_half_period));
}

void AdamState::init(const std::vector<ad::Parameter*>& params) {
    t = 0;
    m.clear();
    v.clear();
    for (auto* p : params) {
        m.emplace_back(p->t->val.size(), 0.0);
        v.emplace_back(p->t->val.size(), 0.0);
    }
}

void adam_step(const std::vector<ad::Parameter*>& params, AdamState& state, double lr) {
    if (state.m.size() != params.size())
        throw ShapeError("adam_step: state was initialized for a different parameter set");
    for (auto* p : params) {
        p->t->ensure_grad();
        for (double g : p->t->grad)
            if (!std::isfinite(g))
                throw NumericError("adam_step: non-finite gradient in parameter '" + p->name + "'");
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    const auto& ops = kernels::active();
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& tensor = *params[i]->t;
        ops.adam_step(tensor.val.data(), state.m[i].data(), state.v[i].data(), tensor.grad.data(),
                      tensor.val.size(), lr, state.beta1, state.beta2, state.eps, bc1, bc2);
        tensor.zero_grad();
    }
}

namespace {

// (y, x) source index for dihedral transform k on an n x n grid
inline void dihedral_src(int k, int n, int y, int x, int& sy, int& sx) {
    switch (k) {
        case 0: sy = y; sx = x; break;
        case 1: sy = n - 1 - x; sx = y; break;         // rotate 90
        case 2: sy = n - 1 - y; sx = n - 1 - x; break; // rotate 180
        case 3: sy = x; sx = n - 1 - y; break;         // rotate 270
        case 4: sy = y; sx = n - 1 - x; break;         // horizontal flip
        case 5: sy = n - 1 - y; sx = x; break;         // vertical flip
        case 6: sy = x; sx = y; break;                 // transpose
        default: sy = n - 1 - x; sx = n - 1 - y; break; // anti-transpose
    }
}

void check_square(int h, int w, int k) {
    if (k < 0 || k > 7) throw ConfigError("dihedral transform index must be in 0..7");
    const bool needs_square = (k == 1 || k == 3 || k == 6 || k == 7);
    if (needs_square && h != w)
        throw ShapeError("dihedral rotation/transpose requires a square tile, got " +
                         std::to_string(h) + "x" + std::to_string(w));
}

} // namespace

ImageField dihedral(const ImageField& in, int k) {
    check_square(in.h, in.w, k);
    if (k == 0) return in;
    ImageField out(in.h, in.w, in.c);
    int sy, sx;
    for (int y = 0; y < in.h; ++y)
        for (int x = 0; x < in.w; ++x) {
            dihedral_src(k, in.h, y, x, sy, sx);
            for (int ch = 0; ch < in.c; ++ch) out.at(y, x, ch) = in.at(sy, sx, ch);
        }
    return out;
}

Mask dihedral(const Mask& in, int k) {
    check_square(in.h, in.w, k);
    if (k == 0) return in;
    Mask out(in.h, in.w);
    int sy, sx;
    for (int y = 0; y < in.h; ++y)
        for (int x = 0; x < in.w; ++x) {
            dihedral_src(k, in.h, y, x, sy, sx);
            out.at(y, x) = in.at(sy, sx);
        }
    return out;
}

ImageField make_weight_map(const Mask& crack, const Mask& pore, double crack_weight) {
    if (crack.h != pore.h || crack.w != pore.w)
        throw ShapeError("make_weight_map: crack and pore masks differ in size");
    ImageField w(crack.h, crack.w, 1, 1.0);
    for (std::size_t i = 0; i < w.v.size(); ++i)
        if (crack.v[i] || pore.v[i]) w.v[i] = crack_weight;
    return w;
}

Sample augment(const Sample& s, int k) {
    Sample out;
    out.image = dihedral(s.image, k);
    out.target = dihedral(s.target, k);
    out.weight = dihedral(s.weight, k);
    return out;
}

namespace {

struct CsvWriter {
    std::ofstream os;
    explicit CsvWriter(const std::string& path) : os(path, std::ios::trunc) {
        if (!os) throw IoError("cannot open loss csv for writing: " + path);
        os << "epoch,lr,train_loss,val_loss\n";
    }
    void row(const EpochStats& e) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g\n", e.epoch, e.lr, e.train_loss,
                      e.val_loss);
        os << buf;
        os.flush();
    }
};

template <typename MakeBatchLoss>
FitReport run_fit(net::RieszNetwork& net, std::size_t train_n, std::size_t val_n,
                  const TrainConfig& cfg, const std::string& out_dir,
                  MakeBatchLoss&& batch_loss /*(tape, indices, mode) -> Tensor*/) {
    cfg.validate();
    if (train_n == 0) throw ConfigError("fit: empty training set");
    std::filesystem::create_directories(out_dir);
    CsvWriter csv(out_dir + "/loss.csv");
    const std::string final_path = out_dir + "/checkpoint_final.rzn";
    const std::string best_path = out_dir + "/checkpoint_best.rzn";

    auto params = net.parameters();
    AdamState adam;
    adam.init(params);
    Rng rng(cfg.seed);

    FitReport report;
    report.final_checkpoint = final_path;
    report.best_checkpoint = best_path;

    std::vector<std::size_t> order(train_n);
    for (std::size_t i = 0; i < train_n; ++i) order[i] = i;

    const int first_epoch = net.epoch;
    for (int e = first_epoch; e < first_epoch + cfg.epochs; ++e) {
        const double lr = lr_at_epoch(cfg, e);
        rng.shuffle(order);

        double train_loss_sum = 0.0;
        std::size_t batches = 0;
        bool diverged = false;
        for (std::size_t start = 0; start < train_n; start += cfg.batch_size) {
            const std::size_t stop = std::min(train_n, start + cfg.batch_size);
            std::vector<std::size_t> idx(order.begin() + start, order.begin() + stop);
            ad::Tape tape;
            ad::Tensor loss;
            try {
                loss = batch_loss(&tape, idx, ad::Mode::Train);
            } catch (const NumericError&) {
                diverged = true;
                break;
            }
            if (!std::isfinite(loss->val[0])) {
                diverged = true;
                break;
            }
            tape.backward(loss);
            try {
                adam_step(params, adam, lr);
            } catch (const NumericError&) {
                diverged = true;
                break;
            }
            train_loss_sum += loss->val[0];
            ++batches;
        }
        if (diverged) {
            report.diverged = true;
            break;
        }

        double val_loss = 0.0;
        if (val_n > 0) {
            std::size_t val_batches = 0;
            for (std::size_t start = 0; start < val_n; start += cfg.batch_size) {
                const std::size_t stop = std::min(val_n, start + cfg.batch_size);
                std::vector<std::size_t> idx;
                for (std::size_t i = start; i < stop; ++i) idx.push_back(i);
                ad::Tensor loss = batch_loss(nullptr, idx, ad::Mode::Eval);
                val_loss += loss->val[0];
                ++val_batches;
            }
            val_loss /= static_cast<double>(val_batches);
        }

        EpochStats stats{e, lr, batches ? train_loss_sum / batches : 0.0, val_loss};
        report.epochs.push_back(stats);
        csv.row(stats);

        net.epoch = e + 1;
        net.lr = lr;
        net::save_checkpoint(net, final_path);
        if (report.best_epoch < 0 || val_loss < report.best_val_loss) {
            report.best_epoch = e;
            report.best_val_loss = val_loss;
            net::save_checkpoint(net, best_path);
        }
    }
    if (report.diverged && report.epochs.empty())
        throw NumericError("fit: training diverged before completing the first epoch");
    if (report.diverged)
        throw NumericError("fit: training loss became non-finite; last good checkpoint kept at " +
                           final_path);
    if (report.best_epoch < 0) net::save_checkpoint(net, best_path);
    return report;
}

} // namespace

FitReport fit_segmentation(net::RieszNetwork& net, const std::vector<Sample>& train_set,
                           const std::vector<Sample>& val_set, const TrainConfig& cfg,
                           const std::string& out_dir) {
    if (cfg.loss != TrainConfig::Loss::WeightedBce)
        throw ConfigError("fit_segmentation supports the weighted-bce loss");
    auto batch_loss = [&](ad::Tape* tape, const std::vector<std::size_t>& idx,
                          ad::Mode mode) -> ad::Tensor {
        const auto& pool = (mode == ad::Mode::Train) ? train_set : val_set;
        const auto& first = pool[idx[0]];
        const int h = first.image.h, w = first.image.w;
        const int b = static_cast<int>(idx.size());
        ad::Tensor x = ad::make_tensor(ad::Shape{b, h, w, 1});
        ad::Tensor t = ad::make_tensor(ad::Shape{b, h, w, 1});
        ad::Tensor wt = ad::make_tensor(ad::Shape{b, h, w, 1});
        const std::size_t npx = static_cast<std::size_t>(h) * w;
        for (int bi = 0; bi < b; ++bi) {
            const auto& s = pool[idx[bi]];
            if (s.image.h != h || s.image.w != w)
                throw ShapeError("fit_segmentation: all samples in a batch must share one size");
            std::copy(s.image.v.begin(), s.image.v.end(), x->val.begin() + bi * npx);
            for (std::size_t p = 0; p < npx; ++p) t->val[bi * npx + p] = s.target.v[p] ? 1.0 : 0.0;
            std::copy(s.weight.v.begin(), s.weight.v.end(), wt->val.begin() + bi * npx);
        }
        ad::Tensor pred = net.forward(tape, x, mode);
        return ad::weighted_bce(tape, pred, t, wt);
    };
    return run_fit(net, train_set.size(), val_set.size(), cfg, out_dir, batch_loss);
}

FitReport fit_classification(net::RieszNetwork& net, const std::vector<ClassSample>& train_set,
                             const std::vector<ClassSample>& val_set, const TrainConfig& cfg,
                             const std::string& out_dir) {
    if (cfg.loss != TrainConfig::Loss::SoftmaxCe)
        throw ConfigError("fit_classification supports the softmax-ce loss");
    auto batch_loss = [&](ad::Tape* tape, const std::vector<std::size_t>& idx,
                          ad::Mode mode) -> ad::Tensor {
        const auto& pool = (mode == ad::Mode::Train) ? train_set : val_set;
        const auto& first = pool[idx[0]];
        const int h = first.image.h, w = first.image.w;
        const int b = static_cast<int>(idx.size());
        ad::Tensor x = ad::make_tensor(ad::Shape{b, h, w, 1});
        std::vector<int> labels(b);
        const std::size_t npx = static_cast<std::size_t>(h) * w;
        for (int bi = 0; bi < b; ++bi) {
            const auto& s = pool[idx[bi]];
            if (s.image.h != h || s.image.w != w)
                throw ShapeError("fit_classification: all samples in a batch must share one size");
            std::copy(s.image.v.begin(), s.image.v.end(), x->val.begin() + bi * npx);
            labels[bi] = s.label;
        }
        ad::Tensor logits = net.forward(tape, x, mode);
        return ad::softmax_ce(tape, logits, labels);
    };
    return run_fit(net, train_set.size(), val_set.size(), cfg, out_dir, batch_loss);
}

} // namespace riesznet::train
