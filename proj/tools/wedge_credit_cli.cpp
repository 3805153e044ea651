// SPDX-License-Identifier: Apache-2.0

#include <cstdio>

int main() {
    std::puts("wedge-credit: command dispatch lands after the numerics stabilize");
    return 0;
}
