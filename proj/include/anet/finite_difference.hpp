#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "anet/scalar.hpp"

namespace anet {

/// Weights c_l = (-1)^{m-l} C(m,l) / γ^m of the m-th forward difference, so
/// that Σ_l c_l f(h₀ + lγ) → f^{(m)}(h₀) as γ → 0.
inline std::vector<double> forward_difference_weights(unsigned m, double gamma)
{
    if (gamma == 0.0) throw std::invalid_argument("forward_difference_weights: step must be nonzero");
    std::vector<double> w(m + 1);
    const double scale = std::pow(gamma, -double(m));
    for (unsigned l = 0; l <= m; ++l) w[l] = ((m - l) % 2 == 0 ? 1.0 : -1.0) * binomial(m, l) * scale;
    return w;
}

/// γ^{-m} Σ_{l=0}^m (-1)^{m-l} C(m,l) f(h₀ + lγ). With m = 0 this is f(h₀).
template <class F>
Scalar iterated_difference(F&& f, unsigned m, Scalar gamma, Scalar h0)
{
    if (gamma == Scalar{}) throw std::invalid_argument("iterated_difference: step must be nonzero");
    Scalar acc{};
    for (unsigned l = 0; l <= m; ++l) {
        const double sign = (m - l) % 2 == 0 ? 1.0 : -1.0;
        acc += sign * binomial(m, l) * Scalar(f(h0 + double(l) * gamma));
    }
    return acc / std::pow(gamma, double(m));
}

using RealFunction = std::function<double(std::span<const double>)>;

/// Σ_i [f(x+he_i) - 2f(x) + f(x-he_i)] / h².
inline double laplacian_fd(const RealFunction& f, std::span<const double> x, double h)
{
    if (!(h > 0.0)) throw std::invalid_argument("laplacian_fd: step must be positive");
    std::vector<double> y(x.begin(), x.end());
    const double f0 = f(y);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double xi = y[i];
        y[i] = xi + h;
        const double fp = f(y);
        y[i] = xi - h;
        const double fm = f(y);
        y[i] = xi;
        acc += (fp - 2.0 * f0 + fm) / (h * h);
    }
    return acc;
}

} // namespace anet
