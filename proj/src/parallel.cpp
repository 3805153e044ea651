// SPDX-License-Identifier: Apache-2.0

#include "wedgecredit/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wedge {

int max_threads() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
#else
    int n = 1;
#endif
    if (const char* env = std::getenv("WEDGE_CREDIT_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1) n = std::min(n, cap);
        } catch (...) {
            // unparsable value: ignore the cap
        }
    }
    return std::max(1, n);
}

int threads_for(Exec exec, int n) {
    if (exec == Exec::Serial || n <= 1) return 1;
    return std::min(max_threads(), n);
}

} // namespace wedge
