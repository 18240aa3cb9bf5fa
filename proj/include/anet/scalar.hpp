#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace anet {

/// Scalars are stored as complex doubles under both fields; a Real-tagged
/// value always has a zero imaginary part.
using Scalar = std::complex<double>;
using ScalarVec = std::vector<Scalar>;

enum class Field { Real, Complex };

inline constexpr std::string_view to_string(Field f) noexcept { return f == Field::Real ? "R" : "C"; }

inline Field parse_field(std::string_view s)
{
    if (s == "R" || s == "r" || s == "real") return Field::Real;
    if (s == "C" || s == "c" || s == "complex") return Field::Complex;
    throw std::invalid_argument("unknown field tag '" + std::string(s) + "' (expected R or C)");
}

inline bool is_finite(Scalar z) noexcept { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Rejects NaN/Inf, and any imaginary part under the Real tag.
inline void check_scalar(Scalar z, Field f, std::string_view what = "scalar")
{
    if (!is_finite(z)) throw std::invalid_argument(std::string(what) + " is not finite");
    if (f == Field::Real && z.imag() != 0.0)
        throw std::invalid_argument(std::string(what) + " has a nonzero imaginary part under the Real tag");
}

inline void check_scalars(std::span<const Scalar> zs, Field f, std::string_view what = "vector")
{
    for (const auto& z : zs) check_scalar(z, f, what);
}

inline void require_same_field(Field a, Field b, std::string_view context)
{
    if (a != b) throw std::invalid_argument(std::string(context) + ": field tag mismatch");
}

/// Field conjugation: identity on reals.
inline Scalar conj_field(Scalar z, Field f) noexcept { return f == Field::Real ? z : std::conj(z); }

/// ⟨w, z⟩ = Σ conj(w_i) z_i.
inline Scalar pairing(std::span<const Scalar> w, std::span<const Scalar> z)
{
    if (w.size() != z.size()) throw std::invalid_argument("pairing: dimension mismatch");
    Scalar acc{0.0, 0.0};
    for (std::size_t i = 0; i < w.size(); ++i) acc += std::conj(w[i]) * z[i];
    return acc;
}

inline double binomial(unsigned n, unsigned k) noexcept
{
    if (k > n) return 0.0;
    if (k > n - k) k = n - k;
    double r = 1.0;
    for (unsigned i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return std::round(r);
}

inline double factorial(unsigned n) noexcept
{
    double r = 1.0;
    for (unsigned i = 2; i <= n; ++i) r *= double(i);
    return r;
}

inline ScalarVec real_vector(std::span<const double> xs) { return ScalarVec(xs.begin(), xs.end()); }

} // namespace anet
