// SPDX-License-Identifier: Apache-2.0

#include "wedgecredit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "wedgecredit/errors.hpp"

namespace wedge::quadrature {

namespace {

GaussRule build_rule(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n / 2 + n % 2; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

double panel(const std::function<double(double)>& f, double a, double b, const GaussRule& rule) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return s * half;
}

} // namespace

const GaussRule& gauss_legendre(int order) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
    return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt) {
    if (!(b > a)) return 0.0;
    const GaussRule& rule = gauss_legendre(opt.order);

    struct Seg {
        double a, b, whole;
    };
    std::vector<Seg> stack;
    stack.push_back({a, b, panel(f, a, b, rule)});
    double total = 0.0;
    double err_budget_used = 0.0;
    int splits = 0;
    // first-pass magnitude estimate for the relative criterion
    const double scale0 = std::abs(stack.back().whole);

    while (!stack.empty()) {
        const Seg s = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (s.a + s.b);
        const double left = panel(f, s.a, mid, rule);
        const double right = panel(f, mid, s.b, rule);
        const double refined = left + right;
        const double err = std::abs(refined - s.whole);
        const double tol =
            std::max(opt.abs_tol, opt.rel_tol * std::max({scale0, std::abs(total), std::abs(refined)}));
        // per-segment share of the tolerance, proportional to width
        const double share = tol * (s.b - s.a) / (b - a);
        if (err <= std::max(share, 1e-300) || splits >= opt.max_subdivisions ||
            (s.b - s.a) < 1e-14 * (b - a)) {
            total += refined;
            err_budget_used += err;
        } else {
            ++splits;
            stack.push_back({s.a, mid, left});
            stack.push_back({mid, s.b, right});
        }
    }
    (void)err_budget_used;
    return total;
}

double integrate2d(const std::function<double(double, double)>& f, double a1, double b1, double a2,
                   double b2, const QuadOptions& outer, const QuadOptions& inner) {
    return integrate(
        [&](double x2) {
            return integrate([&](double x1) { return f(x1, x2); }, a1, b1, inner);
        },
        a2, b2, outer);
}

double integrate2d_region(const std::function<double(double, double)>& f,
                          const std::function<double(double)>& lo,
                          const std::function<double(double)>& hi, double a2, double b2,
                          const QuadOptions& outer, const QuadOptions& inner) {
    return integrate(
        [&](double x2) {
            const double l = lo(x2);
            const double h = hi(x2);
            if (!(h > l)) return 0.0;
            return integrate([&](double x1) { return f(x1, x2); }, l, h, inner);
        },
        a2, b2, outer);
}

} // namespace wedge::quadrature
