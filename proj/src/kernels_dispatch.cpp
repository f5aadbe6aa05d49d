#include "riesznet/kernels.hpp"

#include <cstdlib>
#include <string>

#include "riesznet/common.hpp"

namespace riesznet::kernels {

#ifdef RIESZNET_HAVE_AVX2_TU
const Ops* avx2_ops_impl();
#endif

const Ops* avx2_ops() {
#ifdef RIESZNET_HAVE_AVX2_TU
    if (__builtin_cpu_supports("avx2")) return avx2_ops_impl();
#endif
    return nullptr;
}

namespace {

const Ops* pick_default() {
    if (const char* env = std::getenv("RIESZNET_KERNELS")) {
        const std::string which(env);
        if (which == "scalar") return &scalar_ops();
        if (which == "avx2") {
            if (const Ops* t = avx2_ops()) return t;
            return &scalar_ops(); // requested ISA unavailable; fall back
        }
    }
    if (const Ops* t = avx2_ops()) return t;
    return &scalar_ops();
}

const Ops*& active_slot() {
    static const Ops* slot = pick_default();
    return slot;
}

} // namespace

const Ops& active() { return *active_slot(); }

void select(std::string_view which) {
    if (which == "scalar") {
        active_slot() = &scalar_ops();
    } else if (which == "avx2") {
        const Ops* t = avx2_ops();
        if (!t) throw ConfigError("kernel variant 'avx2' is not available on this machine");
        active_slot() = t;
    } else if (which == "auto") {
        const Ops* t = avx2_ops();
        active_slot() = t ? t : &scalar_ops();
    } else {
        throw ConfigError("unknown kernel variant '" + std::string(which) + "'");
    }
}

} // namespace riesznet::kernels
