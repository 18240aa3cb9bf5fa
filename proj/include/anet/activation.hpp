#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anet/scalar.hpp"

namespace anet {

enum class Family { Exp, Sin, Cos, Sinh, Cosh, Polynomial, ReLU, LeakyReLU };

/// An activation σ. Entire families are described both in closed form and by
/// their Taylor coefficients at zero; ReLU-type families have no power series.
class Activation {
public:
    Activation(Family family, Field field, std::vector<Scalar> coeffs = {}, double slope = 0.0)
        : family_(family), field_(field), coeffs_(std::move(coeffs)), slope_(slope)
    {
        if ((family_ == Family::ReLU || family_ == Family::LeakyReLU) && field_ != Field::Real)
            throw std::invalid_argument("ReLU-type activations are only defined over the reals");
        if (family_ == Family::Polynomial) {
            if (coeffs_.empty()) throw std::invalid_argument("polynomial activation needs coefficients");
            check_scalars(coeffs_, field_, "polynomial activation coefficient");
            if (coeffs_.back() == Scalar{}) throw std::invalid_argument("polynomial activation has a zero leading coefficient");
        } else if (!coeffs_.empty()) {
            throw std::invalid_argument("coefficients are only meaningful for polynomial activations");
        }
        if (family_ == Family::LeakyReLU && !std::isfinite(slope_))
            throw std::invalid_argument("leaky ReLU slope must be finite");
    }

    static Activation exp(Field f) { return {Family::Exp, f}; }
    static Activation sin(Field f) { return {Family::Sin, f}; }
    static Activation cos(Field f) { return {Family::Cos, f}; }
    static Activation sinh(Field f) { return {Family::Sinh, f}; }
    static Activation cosh(Field f) { return {Family::Cosh, f}; }
    static Activation polynomial(Field f, std::vector<Scalar> c) { return {Family::Polynomial, f, std::move(c)}; }
    static Activation identity(Field f) { return polynomial(f, {0.0, 1.0}); }
    static Activation square(Field f) { return polynomial(f, {0.0, 0.0, 1.0}); }
    static Activation relu() { return {Family::ReLU, Field::Real}; }
    static Activation leaky_relu(double slope) { return {Family::LeakyReLU, Field::Real, {}, slope}; }

    [[nodiscard]] Family family() const noexcept { return family_; }
    [[nodiscard]] Field field() const noexcept { return field_; }
    [[nodiscard]] const std::vector<Scalar>& coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] double slope() const noexcept { return slope_; }

    [[nodiscard]] bool has_power_series() const noexcept
    {
        return family_ != Family::ReLU && family_ != Family::LeakyReLU;
    }
    [[nodiscard]] bool is_polynomial() const noexcept { return family_ == Family::Polynomial; }
    /// Degree of a polynomial activation; nullopt for the other families.
    [[nodiscard]] std::optional<unsigned> degree() const noexcept
    {
        if (!is_polynomial()) return std::nullopt;
        return static_cast<unsigned>(coeffs_.size() - 1);
    }

    [[nodiscard]] Activation with_field(Field f) const { return {family_, f, coeffs_, slope_}; }

    friend bool operator==(const Activation&, const Activation&) = default;

private:
    Family family_;
    Field field_;
    std::vector<Scalar> coeffs_;
    double slope_;
};

inline std::string_view family_name(Family f) noexcept
{
    switch (f) {
    case Family::Exp: return "exp";
    case Family::Sin: return "sin";
    case Family::Cos: return "cos";
    case Family::Sinh: return "sinh";
    case Family::Cosh: return "cosh";
    case Family::Polynomial: return "polynomial";
    case Family::ReLU: return "relu";
    case Family::LeakyReLU: return "leaky_relu";
    }
    return "?";
}

inline Family parse_family(std::string_view s)
{
    for (Family f : {Family::Exp, Family::Sin, Family::Cos, Family::Sinh, Family::Cosh, Family::Polynomial,
                     Family::ReLU, Family::LeakyReLU})
        if (family_name(f) == s) return f;
    throw std::invalid_argument("unknown activation family '" + std::string(s) + "'");
}

namespace detail {

inline Scalar horner(const std::vector<Scalar>& c, Scalar z)
{
    Scalar acc{};
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

inline std::vector<Scalar> derivative_coeffs(std::vector<Scalar> c, unsigned order)
{
    for (unsigned o = 0; o < order; ++o) {
        if (c.size() <= 1) return {Scalar{}};
        std::vector<Scalar> d(c.size() - 1);
        for (std::size_t j = 1; j < c.size(); ++j) d[j - 1] = double(j) * c[j];
        c = std::move(d);
    }
    return c;
}

} // namespace detail

/// α_k, the k-th Taylor coefficient of σ at zero.
inline Scalar activation_coefficient(const Activation& act, unsigned k)
{
    const double inv_fact = 1.0 / factorial(k);
    switch (act.family()) {
    case Family::Exp: return inv_fact;
    case Family::Sin: return k % 2 == 1 ? ((k / 2) % 2 == 0 ? inv_fact : -inv_fact) : 0.0;
    case Family::Cos: return k % 2 == 0 ? ((k / 2) % 2 == 0 ? inv_fact : -inv_fact) : 0.0;
    case Family::Sinh: return k % 2 == 1 ? inv_fact : 0.0;
    case Family::Cosh: return k % 2 == 0 ? inv_fact : 0.0;
    case Family::Polynomial: return k < act.coeffs().size() ? act.coeffs()[k] : Scalar{};
    case Family::ReLU:
    case Family::LeakyReLU: break;
    }
    throw std::invalid_argument("activation_coefficient: ReLU-type activations have no power series");
}

/// Checks that a point belongs to the activation's field.
inline void check_activation_argument(const Activation& act, Scalar z)
{
    if (act.field() == Field::Real && z.imag() != 0.0)
        throw std::invalid_argument("eval_activation: complex argument for a Real-tagged activation");
}

namespace detail {

// Evaluation without the field check; callers on hot paths validate inputs once.
inline Scalar eval_activation_unchecked(const Activation& act, Scalar z)
{
    switch (act.family()) {
    case Family::Exp: return std::exp(z);
    case Family::Sin: return std::sin(z);
    case Family::Cos: return std::cos(z);
    case Family::Sinh: return std::sinh(z);
    case Family::Cosh: return std::cosh(z);
    case Family::Polynomial: return horner(act.coeffs(), z);
    case Family::ReLU: return std::max(z.real(), 0.0);
    case Family::LeakyReLU: return z.real() >= 0.0 ? z.real() : act.slope() * z.real();
    }
    return {};
}

} // namespace detail

inline Scalar eval_activation(const Activation& act, Scalar z)
{
    check_activation_argument(act, z);
    return detail::eval_activation_unchecked(act, z);
}

/// Truncated Taylor series: stops once |term| < 1e-17·|partial sum| or after
/// 200 terms. Used as a fallback and cross-check for the closed forms.
inline Scalar eval_activation_series(const Activation& act, Scalar z)
{
    check_activation_argument(act, z);
    if (!act.has_power_series()) throw std::invalid_argument("eval_activation_series: no power series");
    if (act.is_polynomial()) return detail::horner(act.coeffs(), z);
    Scalar sum{};
    Scalar power{1.0, 0.0};
    int quiet = 0;
    for (unsigned k = 0; k < 200; ++k) {
        const Scalar term = activation_coefficient(act, k) * power;
        sum += term;
        // Sin/Cos/Sinh/Cosh alternate zero terms; require two small terms in a row.
        if (std::abs(term) < 1e-17 * std::abs(sum)) {
            if (++quiet >= 2) break;
        } else {
            quiet = 0;
        }
        power *= z;
    }
    return sum;
}

/// σ^{(order)}(z) in closed form.
inline Scalar eval_activation_derivative(const Activation& act, Scalar z, unsigned order)
{
    check_activation_argument(act, z);
    switch (act.family()) {
    case Family::Exp: return std::exp(z);
    case Family::Sin:
        switch (order % 4) {
        case 0: return std::sin(z);
        case 1: return std::cos(z);
        case 2: return -std::sin(z);
        default: return -std::cos(z);
        }
    case Family::Cos:
        switch (order % 4) {
        case 0: return std::cos(z);
        case 1: return -std::sin(z);
        case 2: return -std::cos(z);
        default: return std::sin(z);
        }
    case Family::Sinh: return order % 2 == 0 ? std::sinh(z) : std::cosh(z);
    case Family::Cosh: return order % 2 == 0 ? std::cosh(z) : std::sinh(z);
    case Family::Polynomial: return detail::horner(detail::derivative_coeffs(act.coeffs(), order), z);
    case Family::ReLU:
        if (order == 0) return std::max(z.real(), 0.0);
        if (order == 1) return z.real() > 0.0 ? 1.0 : 0.0;
        return 0.0;
    case Family::LeakyReLU:
        if (order == 0) return z.real() >= 0.0 ? z.real() : act.slope() * z.real();
        if (order == 1) return z.real() > 0.0 ? 1.0 : act.slope();
        return 0.0;
    }
    return {};
}

/// Smallest M ≥ m with α_M ≠ 0, scanning indices up to 64.
inline std::optional<unsigned> first_nonzero_coefficient(const Activation& act, unsigned m)
{
    for (unsigned k = m; k <= 64; ++k)
        if (activation_coefficient(act, k) != Scalar{}) return k;
    return std::nullopt;
}

/// Point on the real grid {-2 + 4i/100} maximizing |σ^{(order)}| as estimated
/// by a central finite difference with step 1e-3. Order is 1 or 2.
inline double locate_nonvanishing_derivative(const Activation& act, unsigned order)
{
    if (order != 1 && order != 2) throw std::invalid_argument("locate_nonvanishing_derivative: order must be 1 or 2");
    const double h = 1e-3;
    double best_x = 0.0;
    double best = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double x = -2.0 + 4.0 * i / 100.0;
        const Scalar fp = detail::eval_activation_unchecked(act, x + h);
        const Scalar f0 = detail::eval_activation_unchecked(act, x);
        const Scalar fm = detail::eval_activation_unchecked(act, x - h);
        const double est = order == 1 ? std::abs((fp - fm) / (2 * h)) : std::abs((fp - 2.0 * f0 + fm) / (h * h));
        if (est > best) {
            best = est;
            best_x = x;
        }
    }
    return best_x;
}

} // namespace anet
