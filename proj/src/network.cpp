// SPDX-License-Identifier: Apache-2.0

#include "wedgecredit/network.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "wedgecredit/errors.hpp"

namespace wedge::network {

namespace {

// Cholesky feasibility check for the correlation matrix.
bool positive_definite(const std::vector<double>& m, std::size_t n) {
    std::vector<double> a = m;
    for (std::size_t k = 0; k < n; ++k) {
        double d = a[k * n + k];
        for (std::size_t j = 0; j < k; ++j) d -= a[k * n + j] * a[k * n + j];
        if (d <= 0.0) return false;
        const double s = std::sqrt(d);
        a[k * n + k] = s;
        for (std::size_t i = k + 1; i < n; ++i) {
            double v = a[i * n + k];
            for (std::size_t j = 0; j < k; ++j) v -= a[i * n + j] * a[k * n + j];
            a[i * n + k] = v / s;
        }
    }
    return true;
}

} // namespace

double BankNetwork::interbank_assets(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < n_banks; ++j)
        if (j != i) s += lmut(j, i);
    return s;
}

double BankNetwork::interbank_liabilities(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < n_banks; ++j)
        if (j != i) s += lmut(i, j);
    return s;
}

void BankNetwork::validate() const {
    std::ostringstream bad;
    const std::size_t n = n_banks;
    if (n == 0) bad << "n_banks must be positive\n";
    auto need_size = [&](const std::vector<double>& v, std::size_t want, const char* name) {
        if (v.size() != want) bad << name << " has size " << v.size() << ", expected " << want << "\n";
    };
    need_size(A0, n, "A0");
    need_size(L0, n, "L0");
    need_size(L_mut, n * n, "L_mut");
    need_size(R, n, "R");
    need_size(sigma, n, "sigma");
    need_size(rho, n * n, "rho");
    if (!bad.str().empty()) throw DomainError("BankNetwork: " + bad.str());

    for (std::size_t i = 0; i < n; ++i) {
        if (A0[i] < 0.0) bad << "A0[" << i << "] negative\n";
        if (L0[i] < 0.0) bad << "L0[" << i << "] negative\n";
        if (R[i] < 0.0 || R[i] > 1.0) bad << "R[" << i << "] outside [0,1]\n";
        if (sigma[i] <= 0.0) bad << "sigma[" << i << "] not positive\n";
        if (lmut(i, i) != 0.0) bad << "L_mut diagonal entry " << i << " not zero\n";
        for (std::size_t j = 0; j < n; ++j) {
            if (lmut(i, j) < 0.0) bad << "L_mut(" << i << "," << j << ") negative\n";
            if (std::abs(corr(i, j) - corr(j, i)) > 1e-14)
                bad << "rho not symmetric at (" << i << "," << j << ")\n";
        }
        if (std::abs(corr(i, i) - 1.0) > 1e-14) bad << "rho diagonal entry " << i << " not 1\n";
    }
    if (T <= 0.0) bad << "T must be positive\n";
    if (bad.str().empty() && !positive_definite(rho, n)) bad << "rho not positive definite\n";
    if (!bad.str().empty()) throw DomainError("BankNetwork: " + bad.str());
}

BankNetwork make_two_bank(double L1, double L2, double L12, double L21, double R1, double R2,
                          double sigma1, double sigma2, double rho, double T, double A1, double A2,
                          double r) {
    BankNetwork net;
    net.n_banks = 2;
    net.A0 = {A1, A2};
    net.L0 = {L1, L2};
    net.L_mut = {0.0, L12, L21, 0.0};
    net.R = {R1, R2};
    net.sigma = {sigma1, sigma2};
    net.rho = {1.0, rho, rho, 1.0};
    net.r = r;
    net.T = T;
    net.validate();
    return net;
}

BoundarySet standard_boundaries(const BankNetwork& net, double t) {
    const std::size_t n = net.n_banks;
    const double growth = std::exp(net.r * t);
    BoundarySet b;
    b.lambda_lt.resize(n);
    b.lambda_eq.resize(n);
    b.mu_lt.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double ia = net.interbank_assets(i);
        const double il = net.interbank_liabilities(i);
        b.lambda_lt[i] = growth * (net.R[i] * (net.L0[i] + il) - ia);
        b.lambda_eq[i] = growth * (net.L0[i] + il - ia);
        if (b.lambda_lt[i] <= 0.0) b.log_coords_valid = false;
    }
    return b;
}

PostDefaultBoundaries post_default_boundaries(const BankNetwork& net, std::size_t defaulted,
                                              double t) {
    const std::size_t n = net.n_banks;
    if (defaulted >= n) throw DomainError("post_default_boundaries: bad bank index");
    if (n < 2) throw DomainError("post_default_boundaries: survivor set empty");
    const double growth = std::exp(net.r * t);
    const BoundarySet plain = standard_boundaries(net, t);
    PostDefaultBoundaries out;
    out.lambda_tilde_lt.assign(n, 0.0);
    out.lambda_tilde_eq.assign(n, 0.0);
    out.delta_lambda_lt.assign(n, 0.0);
    out.delta_lambda_eq.assign(n, 0.0);
    const std::size_t k = defaulted;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == k) continue;
        double rest_eq = 0.0; // sum over surviving third parties of (L_ij - L_ji)
        double rest_lt = 0.0; // same with recovery weight on own obligations
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || j == k) continue;
            rest_eq += net.lmut(i, j) - net.lmut(j, i);
            rest_lt += net.R[i] * net.lmut(i, j) - net.lmut(j, i);
        }
        const double core = net.L0[i] + net.lmut(i, k) - net.R[k] * net.lmut(k, i);
        out.lambda_tilde_lt[i] = growth * (net.R[i] * core + rest_lt);
        out.lambda_tilde_eq[i] = growth * (core + rest_eq);
        out.delta_lambda_lt[i] = out.lambda_tilde_lt[i] - plain.lambda_lt[i];
        out.delta_lambda_eq[i] = out.lambda_tilde_eq[i] - plain.lambda_eq[i];
    }
    return out;
}

BoundarySet nondimensionalize(const BankNetwork& net, const std::vector<double>& A, double t) {
    const std::size_t n = net.n_banks;
    if (A.size() != n) throw DomainError("nondimensionalize: asset vector size mismatch");
    BoundarySet b = standard_boundaries(net, t);
    if (!b.log_coords_valid)
        throw DomainError("nondimensionalize: lambda^< not positive, log coordinates undefined");

    double log_omega = 0.0;
    for (std::size_t i = 0; i < n; ++i) log_omega += std::log(net.sigma[i]);
    b.omega = std::exp(log_omega / static_cast<double>(n));
    b.t_bar = b.omega * b.omega * t;
    b.T_bar = b.omega * b.omega * net.T;

    b.xi.resize(n);
    b.X.resize(n);
    b.mu_eq.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        b.xi[i] = -0.5 * net.sigma[i] / b.omega;
        if (A[i] <= 0.0) throw DomainError("nondimensionalize: nonpositive asset value");
        const double w = b.omega / net.sigma[i];
        b.X[i] = w * std::log(A[i] / b.lambda_lt[i]);
        b.mu_eq[i] = w * std::log(b.lambda_eq[i] / b.lambda_lt[i]);
    }

    if (n == 2) {
        b.lambda_tilde_lt.resize(2);
        b.lambda_tilde_eq.resize(2);
        b.delta_lambda_lt.resize(2);
        b.delta_lambda_eq.resize(2);
        b.mu_tilde_lt.resize(2);
        b.mu_tilde_eq.resize(2);
        for (std::size_t i = 0; i < 2; ++i) {
            const auto pd = post_default_boundaries(net, 1 - i, t);
            b.lambda_tilde_lt[i] = pd.lambda_tilde_lt[i];
            b.lambda_tilde_eq[i] = pd.lambda_tilde_eq[i];
            b.delta_lambda_lt[i] = pd.delta_lambda_lt[i];
            b.delta_lambda_eq[i] = pd.delta_lambda_eq[i];
            if (pd.lambda_tilde_lt[i] <= 0.0 || pd.lambda_tilde_eq[i] <= 0.0)
                throw DomainError("nondimensionalize: post-default boundary not positive");
            const double w = b.omega / net.sigma[i];
            b.mu_tilde_lt[i] = w * std::log(pd.lambda_tilde_lt[i] / b.lambda_lt[i]);
            b.mu_tilde_eq[i] = w * std::log(pd.lambda_tilde_eq[i] / b.lambda_lt[i]);
        }
    }
    return b;
}

double terminal_boundary_curve(const BankNetwork& net, std::size_t i, double A_other) {
    if (net.n_banks != 2) throw DomainError("terminal_boundary_curve: N=2 only");
    if (i >= 2) throw DomainError("terminal_boundary_curve: bad bank index");
    if (A_other < 0.0) throw DomainError("terminal_boundary_curve: negative asset value");
    const std::size_t o = 1 - i;
    const double growth = std::exp(net.r * net.T);
    const double Li = growth * net.L0[i];
    const double Lo = growth * net.L0[o];
    const double L_io = growth * net.lmut(i, o); // i owes other
    const double L_oi = growth * net.lmut(o, i); // other owes i
    // effective recovery of the other bank when this bank pays in full
    const double r_eff = std::min(1.0, (A_other + L_io) / (Lo + L_oi));
    return Li + L_io - r_eff * L_oi;
}

} // namespace wedge::network
