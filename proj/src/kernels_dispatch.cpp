#include "pathhjb/kernels.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace pathhjb::kernels {

namespace {

const Ops& select() {
    const char* force = std::getenv("PATHHJB_KERNEL");
    if (force != nullptr) {
        if (std::strcmp(force, "scalar") == 0) return scalar_ops();
        if (std::strcmp(force, "avx2") == 0) {
            if (const Ops* v = avx2_ops()) return *v;
            std::fprintf(stderr, "pathhjb: PATHHJB_KERNEL=avx2 requested but unavailable, using scalar\n");
            return scalar_ops();
        }
        std::fprintf(stderr, "pathhjb: unknown PATHHJB_KERNEL '%s', using auto selection\n", force);
    }
    if (const Ops* v = avx2_ops()) return *v;
    return scalar_ops();
}

} // namespace

const Ops& active_ops() {
    static const Ops& chosen = select();
    return chosen;
}

} // namespace pathhjb::kernels
