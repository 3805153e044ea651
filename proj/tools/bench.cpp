// SPDX-License-Identifier: Apache-2.0

#include <cstdio>

int main() {
    std::puts("wedge-bench: benchmark lands after the numerics stabilize");
    return 0;
}
