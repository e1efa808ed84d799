#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "mfglab/errors.hpp"
#include "mfglab/stability.hpp"

namespace mfglab::stability {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

std::vector<double> leading_eigenvalues(const KernelMatrix& kernel, int count, double tol, int max_iter) {
    if (count < 1 || count > kernel.n) throw InvalidArgument("leading_eigenvalues: count out of range");
    const auto n = static_cast<std::size_t>(kernel.n);
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;

    // Deflated action M − Σ λ_j v_j v_jᵀ, with unit v_j.
    auto act = [&](const std::vector<double>& v) {
        std::vector<double> w = kernel.apply(v);
        for (std::size_t j = 0; j < vectors.size(); ++j) {
            const double c = values[j] * dot(vectors[j], v);
            for (std::size_t i = 0; i < n; ++i) w[i] -= c * vectors[j][i];
        }
        return w;
    };

    for (int e = 0; e < count; ++e) {
        std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
        double rayleigh = 0.0;
        bool done = false;
        for (int it = 0; it < max_iter; ++it) {
            std::vector<double> w = act(v);
            const double next = dot(v, w);
            const double norm = std::sqrt(dot(w, w));
            if (!std::isfinite(norm)) throw NumericalFailure("power iteration produced a non-finite vector");
            if (norm == 0.0) {
                rayleigh = 0.0;
                done = true;
                break;
            }
            for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
            if (it > 0 && std::abs(next - rayleigh) < tol) {
                rayleigh = next;
                done = true;
                break;
            }
            rayleigh = next;
        }
        if (!done) {
            std::ostringstream msg;
            msg << "power iteration did not converge in " << max_iter << " iterations";
            throw NumericalFailure(msg.str());
        }
        values.push_back(rayleigh);
        vectors.push_back(v);
    }
    return values;
}

double largest_eigenvalue(const KernelMatrix& kernel, double tol, int max_iter) {
    return leading_eigenvalues(kernel, 1, tol, max_iter).front();
}

std::pair<double, std::vector<double>> mercer_reference(double horizon, int k, int n) {
    if (k < 0 || n < 1 || !(horizon > 0.0)) throw InvalidArgument("mercer_reference: invalid arguments");
    const double omega = (2 * k + 1) * std::numbers::pi / (2.0 * horizon);
    std::vector<double> h(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) h[i] = std::sin(omega * (i + 1) * horizon / n);
    return {1.0 / (omega * omega), std::move(h)};
}

NormBound operator_norm_bound(double eta, double horizon) {
    if (!(eta >= 0.0) || !(horizon > 0.0)) throw InvalidArgument("operator_norm_bound: need η ≥ 0 and T > 0");
    NormBound b;
    b.c = eta == 0.0 ? horizon : -std::expm1(-2.0 * eta * horizon) / (2.0 * eta);
    b.c_squared = b.c * b.c;
    b.contraction = b.c < 1.0;
    return b;
}

double eigenvalue_crossing(double eta, int n, std::pair<double, double> bracket) {
    auto excess = [&](double T) { return largest_eigenvalue(kernel_zero_traj(eta, T, n)) - 1.0; };
    double lo = bracket.first, hi = bracket.second;
    if (!(lo > 0.0 && hi > lo)) throw InvalidArgument("eigenvalue_crossing: bracket must satisfy 0 < lo < hi");
    const double f_lo = excess(lo), f_hi = excess(hi);
    if ((f_lo < 0.0) == (f_hi < 0.0)) {
        std::ostringstream msg;
        msg << "eigenvalue_crossing: no sign change of λ_max − 1 on [" << lo << ", " << hi << "] (" << f_lo << ", "
            << f_hi << ")";
        throw InvalidArgument(msg.str());
    }
    const bool rising = f_lo < 0.0;
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        if ((excess(mid) < 0.0) == rising) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace mfglab::stability
