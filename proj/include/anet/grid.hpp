#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "anet/scalar.hpp"

namespace anet {

/// Tensor grid on a box in 𝕂^d. Under the Complex tag every coordinate
/// contributes two real axes (real and imaginary parts), so a grid has
/// samples^axes points. Grid maxima are lower bounds for the true sup norm.
class BoxGrid {
public:
    /// Real box: lower[i] ≤ x_i ≤ upper[i].
    BoxGrid(std::vector<double> lower, std::vector<double> upper, unsigned samples)
        : BoxGrid(Field::Real, std::move(lower), std::move(upper), {}, {}, samples)
    {
    }

    /// Complex box: real parts in [re_lower, re_upper], imaginary parts in
    /// [im_lower, im_upper], per coordinate.
    BoxGrid(Field field, std::vector<double> re_lower, std::vector<double> re_upper, std::vector<double> im_lower,
            std::vector<double> im_upper, unsigned samples)
        : field_(field), re_lo_(std::move(re_lower)), re_hi_(std::move(re_upper)), im_lo_(std::move(im_lower)),
          im_hi_(std::move(im_upper)), samples_(samples)
    {
        if (re_lo_.empty() || re_lo_.size() != re_hi_.size()) throw std::invalid_argument("BoxGrid: bad bounds");
        if (samples_ < 1) throw std::invalid_argument("BoxGrid: need at least one sample per axis");
        check_axes(re_lo_, re_hi_);
        if (field_ == Field::Complex) {
            if (im_lo_.size() != re_lo_.size() || im_hi_.size() != re_lo_.size())
                throw std::invalid_argument("BoxGrid: imaginary bounds must match the dimension");
            check_axes(im_lo_, im_hi_);
        } else if (!im_lo_.empty() || !im_hi_.empty()) {
            throw std::invalid_argument("BoxGrid: imaginary bounds given for a real grid");
        }
    }

    /// The cube [lo, hi]^d (and [lo, hi] for imaginary parts under ℂ) with the
    /// default sample count.
    static BoxGrid cube(Field field, std::size_t dim, double lo, double hi, unsigned samples = 0)
    {
        std::vector<double> l(dim, lo), u(dim, hi);
        if (samples == 0) samples = default_samples(field == Field::Real ? dim : 2 * dim);
        if (field == Field::Real) return BoxGrid(std::move(l), std::move(u), samples);
        return BoxGrid(field, l, u, l, u, samples);
    }

    /// 201 per axis up to two axes, 41 for three, then shrinking so the grid
    /// stays near 3·10⁶ points.
    static unsigned default_samples(std::size_t axes)
    {
        if (axes <= 2) return 201;
        if (axes == 3) return 41;
        return static_cast<unsigned>(std::max(3.0, std::floor(std::pow(41.0 * 41.0 * 41.0 * 41.0, 1.0 / double(axes)))));
    }

    [[nodiscard]] Field field() const noexcept { return field_; }
    [[nodiscard]] std::size_t dim() const noexcept { return re_lo_.size(); }
    [[nodiscard]] std::size_t axes() const noexcept { return field_ == Field::Real ? dim() : 2 * dim(); }
    [[nodiscard]] unsigned samples() const noexcept { return samples_; }
    [[nodiscard]] std::size_t point_count() const noexcept
    {
        std::size_t n = 1;
        for (std::size_t a = 0; a < axes(); ++a) n *= samples_;
        return n;
    }
    [[nodiscard]] const std::vector<double>& lower() const noexcept { return re_lo_; }
    [[nodiscard]] const std::vector<double>& upper() const noexcept { return re_hi_; }

    /// Calls fn(point) for every grid point; point is a span of length dim().
    template <class Fn>
    void for_each(Fn&& fn) const
    {
        const std::size_t na = axes();
        std::vector<unsigned> idx(na, 0);
        ScalarVec z(dim());
        const std::size_t total = point_count();
        for (std::size_t count = 0; count < total; ++count) {
            for (std::size_t i = 0; i < dim(); ++i) {
                const double re = coord(re_lo_[i], re_hi_[i], idx[i]);
                const double im = field_ == Field::Complex ? coord(im_lo_[i], im_hi_[i], idx[dim() + i]) : 0.0;
                z[i] = Scalar(re, im);
            }
            fn(std::span<const Scalar>(z));
            for (std::size_t a = 0; a < na; ++a) {
                if (++idx[a] < samples_) break;
                idx[a] = 0;
            }
        }
    }

    [[nodiscard]] std::vector<ScalarVec> points() const
    {
        std::vector<ScalarVec> out;
        out.reserve(point_count());
        for_each([&](std::span<const Scalar> z) { out.emplace_back(z.begin(), z.end()); });
        return out;
    }

private:
    static void check_axes(const std::vector<double>& lo, const std::vector<double>& hi)
    {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i]))
                throw std::invalid_argument("BoxGrid: need finite lower < upper on every axis");
    }
    [[nodiscard]] double coord(double lo, double hi, unsigned i) const
    {
        if (samples_ == 1) return 0.5 * (lo + hi);
        return lo + (hi - lo) * double(i) / double(samples_ - 1);
    }

    Field field_;
    std::vector<double> re_lo_, re_hi_, im_lo_, im_hi_;
    unsigned samples_;
};

using ScalarFunction = std::function<Scalar(std::span<const Scalar>)>;

/// max over the grid of |f - g|.
inline double sup_norm_diff(const ScalarFunction& f, const ScalarFunction& g, const BoxGrid& grid)
{
    double m = 0.0;
    grid.for_each([&](std::span<const Scalar> z) { m = std::max(m, std::abs(f(z) - g(z))); });
    return m;
}

} // namespace anet
