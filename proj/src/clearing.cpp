// SPDX-License-Identifier: Apache-2.0

#include "wedgecredit/clearing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wedgecredit/errors.hpp"

namespace wedge::clearing {

namespace {

// Dense Gaussian elimination with partial pivoting; systems here are
// at most n_banks wide.
std::vector<double> solve_dense(std::vector<double> m, std::vector<double> rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m[i * n + k]) > std::abs(m[piv * n + k])) piv = i;
        if (std::abs(m[piv * n + k]) < 1e-300) throw LinAlgFailure("clearing: singular system");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m[k * n + j], m[piv * n + j]);
            std::swap(rhs[k], rhs[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = m[i * n + k] / m[k * n + k];
            for (std::size_t j = k; j < n; ++j) m[i * n + j] -= f * m[k * n + j];
            rhs[i] -= f * rhs[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double v = rhs[i];
        for (std::size_t j = i + 1; j < n; ++j) v -= m[i * n + j] * x[j];
        x[i] = v / m[i * n + i];
    }
    return x;
}

} // namespace

ClearingProblem ClearingProblem::from_network(const network::BankNetwork& net,
                                              const std::vector<double>& A_T) {
    if (A_T.size() != net.n_banks) throw DomainError("clearing: asset vector size mismatch");
    const std::size_t n = net.n_banks;
    const double growth = std::exp(net.r * net.T);
    ClearingProblem p;
    p.n = n;
    p.a.resize(n);
    p.l.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (A_T[i] < 0.0) throw DomainError("clearing: negative terminal assets");
        const double Ltot = growth * (net.L0[i] + net.interbank_liabilities(i));
        if (Ltot <= 0.0) {
            // a bank with no liabilities cannot default on them
            p.a[i] = std::numeric_limits<double>::infinity();
            continue;
        }
        p.a[i] = A_T[i] / Ltot;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) p.l[j * n + i] = growth * net.lmut(j, i) / Ltot;
    }
    return p;
}

std::vector<double> solve_clearing(const ClearingProblem& p, const ClearingOptions& opt) {
    if (opt.tol <= 0.0) throw DomainError("clearing: tolerance must be positive");
    const std::size_t n = p.n;
    std::vector<double> gamma(n, 1.0);
    std::vector<char> pinned(n, 0);

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        // pin every bank whose inflow condition clears, free the rest
        for (std::size_t i = 0; i < n; ++i) {
            double inflow = p.a[i];
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) inflow += gamma[j] * p.lji(j, i);
            pinned[i] = inflow >= 1.0 ? 1 : 0;
        }
        std::vector<std::size_t> free_idx;
        for (std::size_t i = 0; i < n; ++i)
            if (!pinned[i]) free_idx.push_back(i);

        std::vector<double> next(n, 1.0);
        if (!free_idx.empty()) {
            // gamma_i - sum_{j free} gamma_j l_ji = a_i + sum_{j pinned} l_ji
            const std::size_t m = free_idx.size();
            std::vector<double> mat(m * m, 0.0);
            std::vector<double> rhs(m, 0.0);
            for (std::size_t r = 0; r < m; ++r) {
                const std::size_t i = free_idx[r];
                rhs[r] = p.a[i];
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i) continue;
                    if (pinned[j])
                        rhs[r] += p.lji(j, i);
                }
                for (std::size_t cidx = 0; cidx < m; ++cidx) {
                    const std::size_t j = free_idx[cidx];
                    mat[r * m + cidx] = (i == j ? 1.0 : 0.0) - (j != i ? p.lji(j, i) : 0.0);
                }
            }
            const auto sol = solve_dense(mat, rhs);
            for (std::size_t r = 0; r < m; ++r)
                next[free_idx[r]] = std::clamp(sol[r], 0.0, 1.0);
        }

        double resid = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double inflow = p.a[i];
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) inflow += next[j] * p.lji(j, i);
            resid = std::max(resid, std::abs(std::min(inflow, 1.0) - next[i]));
        }
        gamma = next;
        if (resid <= opt.tol) return gamma;
    }
    throw NonConvergence("clearing: fixed point did not converge within iteration cap");
}

std::vector<double> effective_recovery(const network::BankNetwork& net,
                                       const std::vector<double>& A_T,
                                       const std::vector<double>& gamma) {
    const std::size_t n = net.n_banks;
    if (A_T.size() != n || gamma.size() != n)
        throw DomainError("effective_recovery: size mismatch");
    const double growth = std::exp(net.r * net.T);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        double num = A_T[j];
        double den = growth * net.L0[j];
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            num += gamma[i] * growth * net.lmut(i, j);
            den += gamma[i] * growth * net.lmut(j, i);
        }
        if (den <= 0.0) {
            if (num <= 0.0) {
                out[j] = 1.0; // nothing owed, nothing due
                continue;
            }
            throw DomainError("effective_recovery: zero liability denominator");
        }
        out[j] = std::min(1.0, num / den);
    }
    return out;
}

Region classify_terminal_region_assets(const network::BankNetwork& net, double A1_T, double A2_T) {
    if (net.n_banks != 2) throw DomainError("classify_terminal_region: N=2 only");
    const auto plain = network::standard_boundaries(net, net.T);
    const bool s1_plain = A1_T >= plain.lambda_eq[0];
    const bool s2_plain = A2_T >= plain.lambda_eq[1];
    if (s1_plain && s2_plain) return Region::D12;
    if (A1_T >= network::terminal_boundary_curve(net, 0, A2_T)) return Region::D1;
    if (A2_T >= network::terminal_boundary_curve(net, 1, A1_T)) return Region::D2;
    return Region::Dhat;
}

Region classify_terminal_region(const network::BankNetwork& net, const network::BoundarySet& nd,
                                double X1_T, double X2_T) {
    // back out terminal assets: A_i = lambda_i^< e^{sigma_i X_i / omega}
    const auto bT = network::standard_boundaries(net, net.T);
    const double A1 = bT.lambda_lt[0] * std::exp(net.sigma[0] * X1_T / nd.omega);
    const double A2 = bT.lambda_lt[1] * std::exp(net.sigma[1] * X2_T / nd.omega);
    return classify_terminal_region_assets(net, A1, A2);
}

const char* region_name(Region r) {
    switch (r) {
        case Region::D12: return "D12";
        case Region::D1: return "D1";
        case Region::D2: return "D2";
        case Region::Dhat: return "Dhat";
    }
    return "?";
}

DefaultCause default_cause(const network::BankNetwork& net, const std::vector<double>& A_T,
                           const std::vector<double>& gamma, std::size_t i) {
    const double growth = std::exp(net.r * net.T);
    const auto plain = network::standard_boundaries(net, net.T);
    if (A_T[i] < plain.lambda_eq[i]) return DefaultCause::Outright;
    double shortfall_bound = growth * net.L0[i];
    for (std::size_t j = 0; j < net.n_banks; ++j) {
        if (j == i) continue;
        shortfall_bound += growth * (net.lmut(i, j) - gamma[j] * net.lmut(j, i));
    }
    if (A_T[i] < shortfall_bound) return DefaultCause::Contagion;
    return DefaultCause::None;
}

} // namespace wedge::clearing
