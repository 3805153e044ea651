// SPDX-License-Identifier: Apache-2.0

#ifndef WEDGECREDIT_PARALLEL_HPP
#define WEDGECREDIT_PARALLEL_HPP

namespace wedge {

// Execution policy for the data-parallel kernels. Every parallel kernel
// keeps a serial path that produces bitwise-identical results; the test
// suite compares the two and the benchmark tool times them.
enum class Exec { Serial, OpenMP };

// Worker cap honoring the WEDGE_CREDIT_THREADS environment variable.
// Returns the number of threads a parallel region may use (>= 1).
int max_threads();

// Threads actually used for `n` independent work items under `exec`.
int threads_for(Exec exec, int n);

} // namespace wedge

#endif
