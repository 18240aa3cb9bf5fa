#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "anet/scalar.hpp"

namespace anet {

/// Exponent vector of a monomial z_1^{e_1}…z_d^{e_d}.
struct MultiIndex {
    std::vector<unsigned> exponents;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<unsigned> e) : exponents(std::move(e)) {}
    MultiIndex(std::initializer_list<unsigned> e) : exponents(e) {}

    static MultiIndex zero(std::size_t dim) { return MultiIndex(std::vector<unsigned>(dim, 0)); }
    static MultiIndex unit(std::size_t dim, std::size_t i)
    {
        auto m = zero(dim);
        m.exponents.at(i) = 1;
        return m;
    }

    [[nodiscard]] std::size_t dim() const noexcept { return exponents.size(); }
    [[nodiscard]] unsigned degree() const noexcept
    {
        return std::accumulate(exponents.begin(), exponents.end(), 0u);
    }
    unsigned operator[](std::size_t i) const { return exponents[i]; }

    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// Graded-lexicographic order: total degree first, then lexicographic with
/// higher powers of earlier variables first.
inline bool graded_lex_less(const MultiIndex& a, const MultiIndex& b)
{
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return a.exponents > b.exponents;
}

/// All exponent vectors of total degree exactly `degree` in `dim` variables, in
/// graded-lex order.
inline std::vector<MultiIndex> monomials_of_degree(std::size_t dim, unsigned degree)
{
    std::vector<MultiIndex> out;
    if (dim == 0) {
        if (degree == 0) out.emplace_back();
        return out;
    }
    std::vector<unsigned> e(dim, 0);
    auto rec = [&](auto&& self, std::size_t i, unsigned left) -> void {
        if (i + 1 == dim) {
            e[i] = left;
            out.emplace_back(e);
            return;
        }
        for (unsigned k = left + 1; k-- > 0;) {
            e[i] = k;
            self(self, i + 1, left - k);
        }
    };
    rec(rec, 0, degree);
    return out;
}

/// Sparse multivariate polynomial over ℝ or ℂ. Zero coefficients are never
/// stored.
class MPoly {
public:
    using Terms = std::map<MultiIndex, Scalar>;

    MPoly(std::size_t dim, Field field) : dim_(dim), field_(field)
    {
        if (dim_ == 0) throw std::invalid_argument("MPoly: dimension must be positive");
    }

    static MPoly constant(std::size_t dim, Field f, Scalar c)
    {
        MPoly p(dim, f);
        p.add_term(MultiIndex::zero(dim), c);
        return p;
    }
    static MPoly variable(std::size_t dim, Field f, std::size_t i)
    {
        MPoly p(dim, f);
        p.add_term(MultiIndex::unit(dim, i), 1.0);
        return p;
    }
    static MPoly monomial(Field f, const MultiIndex& m, Scalar c = 1.0)
    {
        MPoly p(m.dim(), f);
        p.add_term(m, c);
        return p;
    }

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] Field field() const noexcept { return field_; }
    [[nodiscard]] const Terms& terms() const noexcept { return terms_; }
    [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }

    /// Total degree; 0 for the zero polynomial.
    [[nodiscard]] unsigned degree() const noexcept
    {
        unsigned d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
        return d;
    }

    [[nodiscard]] Scalar coefficient(const MultiIndex& m) const
    {
        auto it = terms_.find(m);
        return it == terms_.end() ? Scalar{} : it->second;
    }

    /// Adds c·z^m, dropping the entry if the sum cancels exactly.
    MPoly& add_term(const MultiIndex& m, Scalar c)
    {
        if (m.dim() != dim_) throw std::invalid_argument("MPoly: multi-index length does not match dimension");
        check_scalar(c, field_, "MPoly coefficient");
        if (c == Scalar{}) return *this;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == Scalar{}) terms_.erase(it);
        }
        return *this;
    }

    /// Terms sorted in graded-lex order.
    [[nodiscard]] std::vector<std::pair<MultiIndex, Scalar>> graded_terms() const
    {
        std::vector<std::pair<MultiIndex, Scalar>> v(terms_.begin(), terms_.end());
        std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return graded_lex_less(a.first, b.first); });
        return v;
    }

    /// Largest coefficient modulus (0 for the zero polynomial).
    [[nodiscard]] double max_abs_coefficient() const noexcept
    {
        double m = 0.0;
        for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
        return m;
    }

    /// Removes coefficients with modulus ≤ tol.
    MPoly& prune(double tol)
    {
        std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
        return *this;
    }

    MPoly& operator+=(const MPoly& o)
    {
        require_compatible(o);
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    MPoly& operator-=(const MPoly& o)
    {
        require_compatible(o);
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    MPoly& operator*=(Scalar s)
    {
        check_scalar(s, field_, "MPoly scale factor");
        if (s == Scalar{}) {
            terms_.clear();
            return *this;
        }
        for (auto it = terms_.begin(); it != terms_.end();) {
            it->second *= s;
            if (it->second == Scalar{}) it = terms_.erase(it);
            else ++it;
        }
        return *this;
    }

    friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
    friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
    friend MPoly operator*(MPoly a, Scalar s) { return a *= s; }
    friend MPoly operator*(Scalar s, MPoly a) { return a *= s; }

    friend MPoly operator*(const MPoly& a, const MPoly& b)
    {
        a.require_compatible(b);
        MPoly out(a.dim_, a.field_);
        std::vector<unsigned> e(a.dim_);
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) {
                for (std::size_t i = 0; i < a.dim_; ++i) e[i] = ma[i] + mb[i];
                out.add_term(MultiIndex(e), ca * cb);
            }
        return out;
    }

    friend bool operator==(const MPoly&, const MPoly&) = default;

private:
    void require_compatible(const MPoly& o) const
    {
        if (o.dim_ != dim_) throw std::invalid_argument("MPoly: dimension mismatch");
        require_same_field(field_, o.field_, "MPoly");
    }

    std::size_t dim_;
    Field field_;
    Terms terms_;
};

inline MPoly pow(const MPoly& p, unsigned n)
{
    MPoly result = MPoly::constant(p.dim(), p.field(), 1.0);
    MPoly base = p;
    while (n > 0) {
        if (n & 1u) result = result * base;
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return result;
}

/// Σ coeff·∏ z_i^{e_i}.
inline Scalar eval_mpoly(const MPoly& p, std::span<const Scalar> z)
{
    if (z.size() != p.dim()) throw std::invalid_argument("eval_mpoly: dimension mismatch");
    if (p.field() == Field::Real)
        for (const auto& zi : z)
            if (zi.imag() != 0.0) throw std::invalid_argument("eval_mpoly: complex point for a Real-tagged polynomial");
    // Per-variable power tables keep evaluation O(terms·d).
    std::vector<std::vector<Scalar>> powers(p.dim());
    std::vector<unsigned> max_e(p.dim(), 0);
    for (const auto& [m, c] : p.terms())
        for (std::size_t i = 0; i < p.dim(); ++i) max_e[i] = std::max(max_e[i], m[i]);
    for (std::size_t i = 0; i < p.dim(); ++i) {
        powers[i].resize(max_e[i] + 1);
        powers[i][0] = 1.0;
        for (unsigned k = 1; k <= max_e[i]; ++k) powers[i][k] = powers[i][k - 1] * z[i];
    }
    Scalar acc{};
    for (const auto& [m, c] : p.terms()) {
        Scalar t = c;
        for (std::size_t i = 0; i < p.dim(); ++i) t *= powers[i][m[i]];
        acc += t;
    }
    return acc;
}

inline Scalar eval_mpoly(const MPoly& p, std::initializer_list<Scalar> z)
{
    return eval_mpoly(p, std::span<const Scalar>(z.begin(), z.size()));
}

/// ∂p/∂z_i.
inline MPoly partial_derivative(const MPoly& p, std::size_t i)
{
    if (i >= p.dim()) throw std::invalid_argument("partial_derivative: coordinate out of range");
    MPoly out(p.dim(), p.field());
    for (const auto& [m, c] : p.terms()) {
        if (m[i] == 0) continue;
        MultiIndex d = m;
        d.exponents[i] -= 1;
        out.add_term(d, c * double(m[i]));
    }
    return out;
}

/// Exact Laplacian Σ_i ∂_i² p.
inline MPoly symbolic_laplacian(const MPoly& p)
{
    if (p.field() != Field::Real) throw std::invalid_argument("symbolic_laplacian: requires the Real tag");
    MPoly out(p.dim(), p.field());
    for (const auto& [m, c] : p.terms())
        for (std::size_t i = 0; i < p.dim(); ++i) {
            if (m[i] < 2) continue;
            MultiIndex d = m;
            d.exponents[i] -= 2;
            out.add_term(d, c * double(m[i]) * double(m[i] - 1));
        }
    return out;
}

/// The affine form Σ coeffs_i z_i + constant as an MPoly.
inline MPoly affine_form(Field f, std::span<const Scalar> coeffs, Scalar constant)
{
    MPoly p(coeffs.size(), f);
    p.add_term(MultiIndex::zero(coeffs.size()), constant);
    for (std::size_t i = 0; i < coeffs.size(); ++i) p.add_term(MultiIndex::unit(coeffs.size(), i), coeffs[i]);
    return p;
}

/// p(Mx) for a row-major `out_dim × in_dim` matrix M, with out_dim = p.dim().
inline MPoly substitute_linear(const MPoly& p, std::span<const Scalar> matrix, std::size_t in_dim)
{
    const std::size_t out_dim = p.dim();
    if (matrix.size() != out_dim * in_dim) throw std::invalid_argument("substitute_linear: matrix shape mismatch");
    std::vector<MPoly> rows;
    rows.reserve(out_dim);
    for (std::size_t r = 0; r < out_dim; ++r)
        rows.push_back(affine_form(p.field(), matrix.subspan(r * in_dim, in_dim), 0.0));
    // Cache powers of each substituted row.
    std::vector<std::vector<MPoly>> powers(out_dim);
    MPoly out(in_dim, p.field());
    for (const auto& [m, c] : p.terms()) {
        MPoly t = MPoly::constant(in_dim, p.field(), c);
        for (std::size_t i = 0; i < out_dim; ++i) {
            if (m[i] == 0) continue;
            auto& cache = powers[i];
            if (cache.empty()) cache.push_back(MPoly::constant(in_dim, p.field(), 1.0));
            while (cache.size() <= m[i]) cache.push_back(cache.back() * rows[i]);
            t = t * cache[m[i]];
        }
        out += t;
    }
    return out;
}

/// Parts of p grouped by total degree; element j is the j-homogeneous part.
/// The zero polynomial yields an empty list.
inline std::vector<MPoly> homogeneous_decompose(const MPoly& p)
{
    if (p.is_zero()) return {};
    std::vector<MPoly> parts(p.degree() + 1, MPoly(p.dim(), p.field()));
    for (const auto& [m, c] : p.terms()) parts[m.degree()].add_term(m, c);
    return parts;
}

inline bool is_homogeneous(const MPoly& p, unsigned degree)
{
    return std::all_of(p.terms().begin(), p.terms().end(), [degree](const auto& kv) { return kv.first.degree() == degree; });
}

} // namespace anet
