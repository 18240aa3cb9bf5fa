#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "anet/activation.hpp"
#include "anet/finite_difference.hpp"
#include "anet/mpoly.hpp"
#include "anet/scalar.hpp"

namespace anet {

/// One hidden unit a·σ(⟨w, z⟩ + b).
struct Neuron {
    Scalar a;
    ScalarVec w;
    Scalar b;
};

/// Shallow network Σ_k a_k σ(⟨w_k, z⟩ + b_k) with ⟨w, z⟩ = Σ conj(w_i) z_i.
class ShallowNet {
public:
    ShallowNet(std::size_t dim, Activation act, std::vector<Neuron> neurons = {})
        : dim_(dim), act_(std::move(act)), neurons_()
    {
        if (dim_ == 0) throw std::invalid_argument("ShallowNet: dimension must be positive");
        neurons_.reserve(neurons.size());
        for (auto& n : neurons) add(std::move(n));
    }

    void add(Neuron n)
    {
        if (n.w.size() != dim_) throw std::invalid_argument("ShallowNet: neuron weight length differs from dimension");
        check_scalar(n.a, field(), "neuron outer weight");
        check_scalar(n.b, field(), "neuron bias");
        check_scalars(n.w, field(), "neuron inner weight");
        neurons_.push_back(std::move(n));
    }

    void append(const ShallowNet& other, Scalar scale = 1.0)
    {
        if (other.dim_ != dim_ || !(other.act_ == act_))
            throw std::invalid_argument("ShallowNet::append: incompatible networks");
        for (const auto& n : other.neurons_) add({n.a * scale, n.w, n.b});
    }

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] Field field() const noexcept { return act_.field(); }
    [[nodiscard]] const Activation& activation() const noexcept { return act_; }
    [[nodiscard]] const std::vector<Neuron>& neurons() const noexcept { return neurons_; }
    [[nodiscard]] std::size_t size() const noexcept { return neurons_.size(); }

private:
    std::size_t dim_;
    Activation act_;
    std::vector<Neuron> neurons_;
};

inline void check_point(std::span<const Scalar> z, std::size_t dim, Field f, const char* who)
{
    if (z.size() != dim) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
    if (f == Field::Real)
        for (const auto& zi : z)
            if (zi.imag() != 0.0) throw std::invalid_argument(std::string(who) + ": complex input under the Real tag");
}

inline Scalar eval_shallow(const ShallowNet& net, std::span<const Scalar> z)
{
    check_point(z, net.dim(), net.field(), "eval_shallow");
    Scalar acc{};
    for (const auto& n : net.neurons())
        acc += n.a * detail::eval_activation_unchecked(net.activation(), pairing(n.w, z) + n.b);
    return acc;
}

inline Scalar eval_shallow(const ShallowNet& net, std::initializer_list<Scalar> z)
{
    return eval_shallow(net, std::span<const Scalar>(z.begin(), z.size()));
}

/// Steps below this, or differences above this order, lose too many digits to
/// cancellation (error ~ γ^{-m}·ε).
inline constexpr double kMinStep = 1e-4;
inline constexpr unsigned kMaxDifferenceOrder = 6;

namespace detail {

inline void check_step(double step, const char* name)
{
    if (!(std::abs(step) >= kMinStep) || !std::isfinite(step))
        throw std::invalid_argument(std::string(name) + " must satisfy |step| >= 1e-4 (cancellation limit)");
}

inline void check_power_series(const Activation& act, const char* who)
{
    if (!act.has_power_series())
        throw std::invalid_argument(std::string(who) + ": activation has no power series (use the ReLU builders)");
}

} // namespace detail

/// One-dimensional network of m+1 neurons σ(lγz) whose value tends to α_m z^m
/// as γ → 0 (or to z^m when `pure` is set, by dividing through by α_m).
inline ShallowNet build_monomial_1d(const Activation& act, unsigned m, double gamma, bool pure = false)
{
    detail::check_power_series(act, "build_monomial_1d");
    if (m > kMaxDifferenceOrder) throw std::invalid_argument("build_monomial_1d: degree above 6 is numerically unusable");
    if (m > 0) detail::check_step(gamma, "gamma");
    const Scalar alpha = activation_coefficient(act, m);
    Scalar scale = 1.0;
    if (pure) {
        if (std::abs(alpha) < 1e-30)
            throw std::invalid_argument("build_monomial_1d: alpha_m vanishes, use build_monomial_via_higher");
        scale = 1.0 / alpha;
    }
    ShallowNet net(1, act);
    const auto w = forward_difference_weights(m, gamma);
    const double inv_fact = 1.0 / factorial(m);
    for (unsigned l = 0; l <= m; ++l) net.add({w[l] * inv_fact * scale, {double(l) * gamma}, 0.0});
    return net;
}

/// z ↦ z^m from a higher coefficient α_M ≠ 0: the M-th γ-difference of
/// σ(lγ(z + nβ)) recovers M!·α_M·(z + nβ)^M, and the (M-m)-th β-difference of
/// that recovers (M!)²/m!·α_M·z^m. Uses (M+1)(M-m+1) neurons.
inline ShallowNet build_monomial_via_higher(const Activation& act, unsigned m, unsigned M, double beta, double gamma)
{
    detail::check_power_series(act, "build_monomial_via_higher");
    if (M < m) throw std::invalid_argument("build_monomial_via_higher: need M >= m");
    const Scalar alpha = activation_coefficient(act, M);
    if (std::abs(alpha) < 1e-30) throw std::invalid_argument("build_monomial_via_higher: alpha_M vanishes");
    if (M > kMaxDifferenceOrder || M - m > kMaxDifferenceOrder)
        throw std::invalid_argument("build_monomial_via_higher: difference order above 6 is numerically unusable");
    if (M > 0) detail::check_step(gamma, "gamma");
    if (M > m) detail::check_step(beta, "beta");

    const auto wg = forward_difference_weights(M, gamma);
    const auto wb = forward_difference_weights(M - m, beta);
    const double fM = factorial(M);
    const Scalar prefactor = factorial(m) / (alpha * fM * fM);
    ShallowNet net(1, act);
    for (unsigned n = 0; n <= M - m; ++n)
        for (unsigned l = 0; l <= M; ++l) {
            const double slope = double(l) * gamma;
            net.add({prefactor * wg[l] * wb[n], {slope}, slope * double(n) * beta});
        }
    return net;
}

/// z_1^{m_1}…z_d^{m_d} as (1/m̄!)·∂_h^{m}(h·z)^{m̄}: the smallest M ≥ m̄ with
/// α_M ≠ 0 gives a one-dimensional network for t^{m̄}, which is then placed on
/// the directions h = (l_1β, …, l_dβ) and combined with mixed forward-difference
/// weights in h.
inline ShallowNet build_monomial_multi(const Activation& act, const MultiIndex& idx, double beta, double gamma)
{
    detail::check_power_series(act, "build_monomial_multi");
    const unsigned mbar = idx.degree();
    if (mbar == 0) throw std::invalid_argument("build_monomial_multi: constant monomial, use build_monomial_1d with m = 0");
    if (auto deg = act.degree(); deg && *deg < mbar)
        throw std::invalid_argument("build_monomial_multi: polynomial activation degree is below the monomial degree");
    const auto M = first_nonzero_coefficient(act, mbar);
    if (!M) throw std::invalid_argument("build_monomial_multi: no nonzero coefficient alpha_M with M >= degree");
    const ShallowNet line = build_monomial_via_higher(act, mbar, *M, beta, gamma);
    detail::check_step(beta, "beta");

    const std::size_t d = idx.dim();
    std::vector<std::vector<double>> hw(d);
    for (std::size_t i = 0; i < d; ++i) hw[i] = forward_difference_weights(idx[i], beta);
    const double inv_fact = 1.0 / factorial(mbar);

    ShallowNet net(d, act);
    std::vector<unsigned> l(d, 0);
    for (;;) {
        double coeff = inv_fact;
        ScalarVec h(d);
        for (std::size_t i = 0; i < d; ++i) {
            coeff *= hw[i][l[i]];
            h[i] = double(l[i]) * beta;
        }
        for (const auto& n : line.neurons()) {
            // Neuron argument s·(h·z) + b, written as ⟨w, z⟩ with w = conj(s·h).
            ScalarVec w(d);
            for (std::size_t i = 0; i < d; ++i) w[i] = std::conj(n.w[0] * h[i]);
            net.add({coeff * n.a, std::move(w), n.b});
        }
        std::size_t i = 0;
        for (; i < d; ++i) {
            if (++l[i] <= idx[i]) break;
            l[i] = 0;
        }
        if (i == d) break;
    }
    return net;
}

/// Network equal to the constant c everywhere: one neuron c/σ(b)·σ(0·z + b)
/// with b the first point of {0, 1, π/2, 2, …} where σ(b) ≠ 0.
inline ShallowNet build_constant(const Activation& act, std::size_t dim, Scalar c)
{
    ShallowNet net(dim, act);
    for (double b : {0.0, 1.0, 1.5707963267948966, 2.0, -1.0, 0.5}) {
        const Scalar s = detail::eval_activation_unchecked(act, b);
        if (std::abs(s) > 1e-3) {
            net.add({c / s, ScalarVec(dim, 0.0), b});
            return net;
        }
    }
    throw std::invalid_argument("build_constant: activation vanishes on all probe points");
}

/// Approximates p by summing per-monomial networks with the coefficients
/// folded into the outer weights. Constants are represented exactly.
inline ShallowNet build_polynomial(const Activation& act, const MPoly& p, double beta, double gamma)
{
    require_same_field(act.field(), p.field(), "build_polynomial");
    detail::check_power_series(act, "build_polynomial");
    if (auto deg = act.degree(); deg && p.degree() > *deg)
        throw std::invalid_argument("build_polynomial: polynomial degree exceeds the activation degree");
    ShallowNet net(p.dim(), act);
    for (const auto& [m, c] : p.graded_terms()) {
        if (m.degree() == 0) net.append(build_constant(act, p.dim(), c));
        else net.append(build_monomial_multi(act, m, beta, gamma), c);
    }
    return net;
}

/// Σ_k a_k Σ_{j≤m} α_j (⟨w_k,z⟩ + b_k)^j expanded into monomials.
inline MPoly truncate_to_polynomial(const ShallowNet& net, unsigned cutoff)
{
    detail::check_power_series(net.activation(), "truncate_to_polynomial");
    const Field f = net.field();
    std::vector<Scalar> alpha(cutoff + 1);
    for (unsigned j = 0; j <= cutoff; ++j) alpha[j] = activation_coefficient(net.activation(), j);
    MPoly out(net.dim(), f);
    for (const auto& n : net.neurons()) {
        ScalarVec lin(n.w.size());
        for (std::size_t i = 0; i < lin.size(); ++i) lin[i] = std::conj(n.w[i]);
        const MPoly arg = affine_form(f, lin, n.b);
        MPoly power = MPoly::constant(net.dim(), f, 1.0);
        MPoly acc(net.dim(), f);
        for (unsigned j = 0; j <= cutoff; ++j) {
            if (j > 0) power = power * arg;
            if (alpha[j] != Scalar{}) acc += power * alpha[j];
        }
        out += acc * n.a;
    }
    return out;
}

} // namespace anet
