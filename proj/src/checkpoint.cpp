#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "riesznet/network.hpp"

// Checkpoint layout (documented in docs/checkpoint_format.md): little-endian,
// magic "RZN1", version, config block, metadata, then named blob records for
// parameters and batch-norm running statistics. Records are written in
// registry order so save -> load -> save is byte identical.

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

namespace riesznet::net {
namespace {

constexpr char kMagic[4] = {'R', 'Z', 'N', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v;
    is.read(reinterpret_cast<char*>(&v), 4);
    if (!is) throw IoError("corrupt checkpoint: truncated file");
    return v;
}
std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v;
    is.read(reinterpret_cast<char*>(&v), 8);
    if (!is) throw IoError("corrupt checkpoint: truncated file");
    return v;
}
double get_f64(std::istream& is) {
    double v;
    is.read(reinterpret_cast<char*>(&v), 8);
    if (!is) throw IoError("corrupt checkpoint: truncated file");
    return v;
}

struct Record {
    std::string name;
    std::uint32_t kind; // 0 = parameter, 1 = buffer
    std::vector<std::uint64_t> dims;
    const std::vector<double>* data;
};

void write_record(std::ostream& os, const Record& r) {
    put_u32(os, static_cast<std::uint32_t>(r.name.size()));
    os.write(r.name.data(), static_cast<std::streamsize>(r.name.size()));
    put_u32(os, r.kind);
    put_u32(os, 0); // dtype 0 = f64
    put_u32(os, static_cast<std::uint32_t>(r.dims.size()));
    std::uint64_t numel = 1;
    for (auto d : r.dims) {
        put_u64(os, d);
        numel *= d;
    }
    os.write(reinterpret_cast<const char*>(r.data->data()),
             static_cast<std::streamsize>(numel * sizeof(double)));
}

std::vector<Record> collect(const RieszNetwork& net) {
    std::vector<Record> recs;
    auto& mutable_net = const_cast<RieszNetwork&>(net);
    for (auto& l : mutable_net.layers()) {
        auto dims_of = [](const ad::Shape& s) {
            std::vector<std::uint64_t> d;
            for (int x : s.d) d.push_back(static_cast<std::uint64_t>(x));
            return d;
        };
        recs.push_back({l.coef.name, 0, dims_of(l.coef.t->shape), &l.coef.t->val});
        recs.push_back({l.bias.name, 0, dims_of(l.bias.t->shape), &l.bias.t->val});
    }
    for (std::size_t i = 0; i < mutable_net.layers().size(); ++i) {
        auto& l = mutable_net.layers()[i];
        const std::string prefix = "layer" + std::to_string(i);
        recs.push_back({prefix + ".bn_mean", 1, {l.bn.mean.size()}, &l.bn.mean});
        recs.push_back({prefix + ".bn_var", 1, {l.bn.var.size()}, &l.bn.var});
    }
    recs.push_back({mutable_net.final_coef().name, 0,
                    {static_cast<std::uint64_t>(mutable_net.final_coef().t->shape.d[0]),
                     static_cast<std::uint64_t>(mutable_net.final_coef().t->shape.d[1])},
                    &mutable_net.final_coef().t->val});
    recs.push_back({mutable_net.final_bias().name, 0,
                    {static_cast<std::uint64_t>(mutable_net.final_bias().t->shape.d[0])},
                    &mutable_net.final_bias().t->val});
    return recs;
}

} // namespace

void save_checkpoint(const RieszNetwork& net, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open checkpoint for writing: " + path);
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    const auto& cfg = net.config();
    put_u32(os, cfg.head == Head::SigmoidMap ? 0u : 1u);
    put_u32(os, static_cast<std::uint32_t>(cfg.channels.size()));
    for (int c : cfg.channels) put_u32(os, static_cast<std::uint32_t>(c));
    put_u32(os, static_cast<std::uint32_t>(net.epoch));
    put_f64(os, net.lr);
    std::uint32_t bn_init = 0;
    if (!net.layers().empty() && net.layers().front().bn.initialized) bn_init = 1;
    put_u32(os, bn_init);

    auto recs = collect(net);
    put_u32(os, static_cast<std::uint32_t>(recs.size()));
    for (const auto& r : recs) write_record(os, r);
    if (!os) throw IoError("write failure on checkpoint: " + path);
}

std::unique_ptr<RieszNetwork> load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open checkpoint: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("corrupt checkpoint: bad magic in " + path);
    const std::uint32_t version = get_u32(is);
    if (version != kVersion)
        throw IoError("checkpoint version mismatch: file has " + std::to_string(version) +
                      ", reader supports " + std::to_string(kVersion));
    NetworkConfig cfg;
    cfg.head = get_u32(is) == 0 ? Head::SigmoidMap : Head::CentralSoftmax;
    const std::uint32_t k = get_u32(is);
    if (k < 2 || k > 64) throw IoError("corrupt checkpoint: implausible channel tuple length");
    cfg.channels.resize(k);
    for (auto& c : cfg.channels) c = static_cast<int>(get_u32(is));
    const int epoch = static_cast<int>(get_u32(is));
    const double lr = get_f64(is);
    const bool bn_init = get_u32(is) != 0;

    auto net = std::make_unique<RieszNetwork>(cfg, 0);
    net->epoch = epoch;
    net->lr = lr;

    const std::uint32_t nrec = get_u32(is);
    auto expected = collect(*net);
    if (nrec != expected.size())
        throw IoError("corrupt checkpoint: record count " + std::to_string(nrec) + " != expected " +
                      std::to_string(expected.size()));
    for (auto& exp : expected) {
        const std::uint32_t nl = get_u32(is);
        std::string name(nl, '\0');
        is.read(name.data(), nl);
        if (!is) throw IoError("corrupt checkpoint: truncated record name");
        if (name != exp.name)
            throw IoError("checkpoint record name mismatch: got '" + name + "', expected '" +
                          exp.name + "'");
        get_u32(is); // kind
        if (get_u32(is) != 0) throw IoError("checkpoint dtype unsupported (expected f64)");
        const std::uint32_t nd = get_u32(is);
        if (nd != exp.dims.size())
            throw IoError("checkpoint record '" + name + "': rank mismatch");
        std::uint64_t numel = 1;
        for (std::uint32_t i = 0; i < nd; ++i) {
            const std::uint64_t d = get_u64(is);
            if (d != exp.dims[i]) throw IoError("checkpoint record '" + name + "': shape mismatch");
            numel *= d;
        }
        auto* dst = const_cast<std::vector<double>*>(exp.data);
        is.read(reinterpret_cast<char*>(dst->data()),
                static_cast<std::streamsize>(numel * sizeof(double)));
        if (!is) throw IoError("corrupt checkpoint: truncated record data for '" + name + "'");
    }
    for (auto& l : net->layers()) l.bn.initialized = bn_init;
    return net;
}

std::unique_ptr<RieszNetwork> load_checkpoint(const std::string& path, const NetworkConfig& expect) {
    auto net = load_checkpoint(path);
    const auto& got = net->config();
    if (got.channels != expect.channels)
        throw IoError("checkpoint config mismatch in field 'channels'");
    if (got.head != expect.head)
        throw IoError("checkpoint config mismatch in field 'head'");
    return net;
}

} // namespace riesznet::net
