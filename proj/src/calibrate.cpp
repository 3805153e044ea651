// SPDX-License-Identifier: Apache-2.0

#include "wedgecredit/calibrate.hpp"

#include <algorithm>
#include <cmath>

#include "wedgecredit/errors.hpp"

namespace wedge::calibrate {

namespace {

std::array<double, 3> clamp_params(const std::array<double, 3>& x, const CalibrationOptions& o) {
    return {std::clamp(x[0], o.sigma_lo, o.sigma_hi), std::clamp(x[1], o.sigma_lo, o.sigma_hi),
            std::clamp(x[2], o.rho_lo, o.rho_hi)};
}

// solve the 3x3 normal equations with Levenberg damping
std::array<double, 3> lm_step(const std::array<std::array<double, 3>, 3>& JtJ,
                              const std::array<double, 3>& Jtr, double lambda) {
    std::array<std::array<double, 4>, 3> m{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = JtJ[i][j];
        m[i][i] *= 1.0 + lambda;
        m[i][3] = -Jtr[i];
    }
    for (int k = 0; k < 3; ++k) {
        int piv = k;
        for (int i = k + 1; i < 3; ++i)
            if (std::abs(m[i][k]) > std::abs(m[piv][k])) piv = i;
        std::swap(m[k], m[piv]);
        if (std::abs(m[k][k]) < 1e-300) throw LinAlgFailure("calibrate: singular normal equations");
        for (int i = k + 1; i < 3; ++i) {
            const double f = m[i][k] / m[k][k];
            for (int j = k; j < 4; ++j) m[i][j] -= f * m[k][j];
        }
    }
    std::array<double, 3> x{};
    for (int i = 3; i-- > 0;) {
        double v = m[i][3];
        for (int j = i + 1; j < 3; ++j) v -= m[i][j] * x[j];
        x[i] = v / m[i][i];
    }
    return x;
}

} // namespace

void QuoteSet::validate() const {
    if (!std::isfinite(C1) || !std::isfinite(C2) || !std::isfinite(F1))
        throw DomainError("QuoteSet: quotes must be finite");
    if (T <= 0.0) throw DomainError("QuoteSet: maturity must be positive");
}

network::BankNetwork swap_banks(const network::BankNetwork& net) {
    if (net.n_banks != 2) throw DomainError("swap_banks: two banks required");
    network::BankNetwork s = net;
    std::swap(s.A0[0], s.A0[1]);
    std::swap(s.L0[0], s.L0[1]);
    std::swap(s.R[0], s.R[1]);
    std::swap(s.sigma[0], s.sigma[1]);
    std::swap(s.L_mut[1], s.L_mut[2]); // L12 <-> L21
    return s;
}

std::array<double, 3> price_quotes(const network::BankNetwork& net, double sigma1, double sigma2,
                                   double rho, double coupon1, double coupon2,
                                   const pricing::PricingNumerics& num, Exec exec) {
    network::BankNetwork n = net;
    n.sigma = {sigma1, sigma2};
    n.rho = {1.0, rho, rho, 1.0};
    n.validate();
    const network::BankNetwork n_swapped = swap_banks(n);

    std::array<double, 3> q{};
    const int nth = threads_for(exec, 3);
#pragma omp parallel for num_threads(nth) schedule(dynamic)
    for (int k = 0; k < 3; ++k) {
        if (k == 0) {
            const auto m = model::TwoBank::make(n);
            const auto dom = pricing::default_domain(m, m.nd.X[0], m.nd.X[1]);
            pricing::ContractSpec spec{pricing::ContractKind::CDS, coupon1};
            q[0] = -pricing::cds_2d(m, 0.0, m.nd.X[0], m.nd.X[1], spec, dom, num);
        } else if (k == 1) {
            const auto m = model::TwoBank::make(n_swapped);
            const auto dom = pricing::default_domain(m, m.nd.X[0], m.nd.X[1]);
            pricing::ContractSpec spec{pricing::ContractKind::CDS, coupon2};
            q[1] = -pricing::cds_2d(m, 0.0, m.nd.X[0], m.nd.X[1], spec, dom, num);
        } else {
            const auto m = model::TwoBank::make(n);
            const auto dom = pricing::default_domain(m, m.nd.X[0], m.nd.X[1]);
            pricing::ContractSpec spec{pricing::ContractKind::FTD, coupon1};
            q[2] = -pricing::ftd_2d(m, 0.0, m.nd.X[0], m.nd.X[1], spec, dom, num);
        }
    }
    return q;
}

CalibrationResult calibrate(const network::BankNetwork& net, const QuoteSet& quotes,
                            const CalibrationOptions& opt) {
    quotes.validate();
    network::BankNetwork base = net;
    base.T = quotes.T;

    auto residuals = [&](const std::array<double, 3>& x) {
        const auto q =
            price_quotes(base, x[0], x[1], x[2], quotes.coupon1, quotes.coupon2, opt.numerics,
                         opt.exec);
        return std::array<double, 3>{q[0] - quotes.C1, q[1] - quotes.C2, q[2] - quotes.F1};
    };
    auto objective = [](const std::array<double, 3>& r) {
        return r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    };

    CalibrationResult out;
    std::array<double, 3> x = clamp_params(opt.x0, opt);
    std::array<double, 3> r = residuals(x);
    double obj = objective(r);
    double lambda = 1e-3;

    int iter = 0;
    for (; iter < opt.max_iter; ++iter) {
        if (obj < opt.obj_target) {
            out.converged = true;
            break;
        }
        // forward-difference Jacobian
        std::array<std::array<double, 3>, 3> J{}; // J[row residual][col param]
        for (int p = 0; p < 3; ++p) {
            std::array<double, 3> xh = x;
            const double h = opt.fd_step * std::max(1.0, std::abs(x[p]));
            xh[p] = x[p] + h;
            const auto lim_hi = p < 2 ? opt.sigma_hi : opt.rho_hi;
            if (xh[p] > lim_hi) xh[p] = x[p] - h; // one-sided at the box edge
            const auto rh = residuals(xh);
            for (int i = 0; i < 3; ++i) J[i][p] = (rh[i] - r[i]) / (xh[p] - x[p]);
        }
        std::array<std::array<double, 3>, 3> JtJ{};
        std::array<double, 3> Jtr{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                for (int k = 0; k < 3; ++k) JtJ[i][j] += J[k][i] * J[k][j];
            }
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) Jtr[i] += J[k][i] * r[k];

        bool accepted = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            const auto delta = lm_step(JtJ, Jtr, lambda);
            const auto x_new = clamp_params(
                {x[0] + delta[0], x[1] + delta[1], x[2] + delta[2]}, opt);
            const double step = std::abs(x_new[0] - x[0]) + std::abs(x_new[1] - x[1]) +
                                std::abs(x_new[2] - x[2]);
            if (step < opt.step_tol) break;
            const auto r_new = residuals(x_new);
            const double obj_new = objective(r_new);
            if (obj_new < obj) {
                const double decrease = (obj - obj_new) / std::max(obj, 1e-300);
                x = x_new;
                r = r_new;
                obj = obj_new;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (decrease < opt.obj_tol && obj < 1e-6) out.converged = true;
                break;
            }
            lambda *= 5.0;
        }
        if (!accepted) {
            out.converged = obj < 1e-6;
            break;
        }
        if (out.converged) break;
    }
    if (obj < opt.obj_target) out.converged = true;

    out.sigma1 = x[0];
    out.sigma2 = x[1];
    out.rho = x[2];
    out.objective = obj;
    out.iterations = iter;
    out.residuals = r;
    return out;
}

network::BankNetwork adjustment_procedure(const network::BankNetwork& net) {
    network::BankNetwork adj = net;
    for (std::size_t i = 0; i < net.n_banks; ++i) {
        const double L_new = net.L0[i] + net.interbank_assets(i) - net.interbank_liabilities(i);
        if (L_new <= 0.0)
            throw DomainError("adjustment_procedure: adjusted external liability not positive");
        adj.L0[i] = L_new;
    }
    std::fill(adj.L_mut.begin(), adj.L_mut.end(), 0.0);
    adj.validate();
    return adj;
}

} // namespace wedge::calibrate
