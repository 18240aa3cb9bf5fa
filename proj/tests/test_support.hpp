#pragma once

// Random fixtures shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <random>

#include "anet/deep.hpp"
#include "anet/mpoly.hpp"
#include "anet/shallow.hpp"

namespace anet::testing {

inline Scalar draw(Field f, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    const double re = u(rng);
    return f == Field::Real ? Scalar(re) : Scalar(re, u(rng));
}

inline ScalarVec draw_point(Field f, std::size_t d, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0)
{
    ScalarVec z(d);
    for (auto& x : z) x = draw(f, rng, lo, hi);
    return z;
}

inline ShallowNet random_shallow(const Activation& act, std::size_t d, std::size_t n, std::mt19937_64& rng)
{
    ShallowNet s(d, act);
    for (std::size_t k = 0; k < n; ++k) s.add({draw(act.field(), rng), draw_point(act.field(), d, rng), draw(act.field(), rng)});
    return s;
}

inline MPoly random_poly(Field f, std::size_t d, unsigned max_degree, std::size_t terms, std::mt19937_64& rng)
{
    std::uniform_int_distribution<unsigned> deg(0, max_degree);
    std::uniform_int_distribution<std::size_t> coord(0, d - 1);
    MPoly p(d, f);
    for (std::size_t t = 0; t < terms; ++t) {
        std::vector<unsigned> e(d, 0);
        const unsigned total = deg(rng);
        for (unsigned k = 0; k < total; ++k) ++e[coord(rng)];
        p.add_term(MultiIndex(e), draw(f, rng));
    }
    return p;
}

/// Random MLP with the given widths (d_0, …, d_L), d_L = 1.
inline MLP random_mlp(const Activation& act, const std::vector<std::size_t>& widths, std::mt19937_64& rng)
{
    std::vector<Layer> layers;
    for (std::size_t l = 1; l < widths.size(); ++l) {
        const auto r = static_cast<Eigen::Index>(widths[l]), c = static_cast<Eigen::Index>(widths[l - 1]);
        Layer L{Matrix(r, c), Vector(r)};
        for (Eigen::Index i = 0; i < L.A.size(); ++i) L.A.data()[i] = draw(act.field(), rng);
        for (Eigen::Index i = 0; i < r; ++i) L.b[i] = draw(act.field(), rng);
        layers.push_back(std::move(L));
    }
    return MLP(act, std::move(layers));
}

/// Splits n into between 1 and n positive parts.
inline std::vector<std::size_t> random_partition(std::size_t n, std::mt19937_64& rng)
{
    std::vector<std::size_t> parts;
    std::uniform_int_distribution<std::size_t> pick(1, n);
    while (n > 0) {
        const std::size_t k = std::min(n, pick(rng));
        parts.push_back(k);
        n -= k;
    }
    return parts;
}

inline double rel_err(Scalar a, Scalar b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

} // namespace anet::testing
