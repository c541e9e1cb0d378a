// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <string_view>

#include "paftrack/kernels.hpp"

namespace paftrack::kernels {

#if !defined(PAFTRACK_HAVE_AVX2)
const Ops* avx2_ops() { return nullptr; }
#endif

const Ops& ops() {
    static const Ops& selected = []() -> const Ops& {
        if (const char* env = std::getenv("PAFTRACK_KERNELS")) {
            const std::string_view want(env);
            if (want == "scalar") return scalar_ops();
            if (want == "avx2") {
                if (const Ops* v = avx2_ops()) return *v;
            }
        }
        if (const Ops* v = avx2_ops()) return *v;
        return scalar_ops();
    }();
    return selected;
}

}  // namespace paftrack::kernels
