#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "anet/activation.hpp"
#include "anet/mpoly.hpp"
#include "anet/networks.hpp"
#include "anet/shallow.hpp"

namespace anet {

namespace detail {

inline void check_partition(std::span<const std::size_t> widths, std::size_t n, const char* who)
{
    if (widths.empty()) throw std::invalid_argument(std::string(who) + ": need at least one block width");
    for (auto w : widths)
        if (w == 0) throw std::invalid_argument(std::string(who) + ": widths must be positive");
    const std::size_t total = std::accumulate(widths.begin(), widths.end(), std::size_t{0});
    if (total != n)
        throw std::invalid_argument(std::string(who) + ": widths sum to " + std::to_string(total) + " but the network has " +
                                    std::to_string(n) + " neurons");
}

inline Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

} // namespace detail

/// Exact residual form of a shallow network: state (x; accumulator) with
/// d₀ = d+1, block ℓ adding the next D_ℓ neurons to the accumulator.
inline ResNet resnet_from_shallow(const ShallowNet& s, std::span<const std::size_t> widths)
{
    detail::check_partition(widths, s.size(), "resnet_from_shallow");
    const std::size_t d = s.dim();
    const Eigen::Index d0 = detail::idx(d + 1);
    Matrix entry = Matrix::Zero(d0, detail::idx(d));
    entry.topRows(detail::idx(d)).setIdentity();
    Vector entry_bias = Vector::Zero(d0);
    Matrix exit = Matrix::Zero(1, d0);
    exit(0, d0 - 1) = 1.0;

    std::vector<ResBlock> blocks;
    std::size_t offset = 0;
    for (std::size_t D : widths) {
        ResBlock blk{Matrix::Zero(d0, detail::idx(D)), Matrix::Zero(detail::idx(D), d0), Vector::Zero(detail::idx(D))};
        for (std::size_t j = 0; j < D; ++j) {
            const auto& n = s.neurons()[offset + j];
            blk.A(d0 - 1, detail::idx(j)) = n.a;
            for (std::size_t i = 0; i < d; ++i) blk.W(detail::idx(j), detail::idx(i)) = std::conj(n.w[i]);
            blk.b[detail::idx(j)] = n.b;
        }
        offset += D;
        blocks.push_back(std::move(blk));
    }
    return ResNet(s.activation(), std::move(entry), std::move(entry_bias), std::move(blocks), std::move(exit));
}

namespace detail {

/// Factor list of a monomial: variable indices repeated by exponent.
inline std::vector<std::size_t> factor_list(const MultiIndex& m)
{
    std::vector<std::size_t> f;
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (unsigned k = 0; k < m[i]; ++k) f.push_back(i);
    return f;
}

/// Entry layer writing (p₀ + Σ p_j z_j; z; 0) into slots (accumulator; inputs;
/// workspace).
inline std::pair<Matrix, Vector> affine_entry(const MPoly& p)
{
    const std::size_t d = p.dim();
    const Eigen::Index d0 = idx(d + 2);
    Matrix entry = Matrix::Zero(d0, idx(d));
    Vector bias = Vector::Zero(d0);
    bias[0] = p.coefficient(MultiIndex::zero(d));
    for (std::size_t j = 0; j < d; ++j) {
        entry(0, idx(j)) = p.coefficient(MultiIndex::unit(d, j));
        entry(idx(j + 1), idx(j)) = 1.0;
    }
    return {std::move(entry), std::move(bias)};
}

} // namespace detail

/// Exact ResNet for p with σ(z) = z². Slots: 0 accumulator, 1…d inputs, d+1
/// workspace. Per monomial of degree ≥ 2 (graded-lex order) the workspace is
/// initialised to z_i² (one neuron) or z_i = [σ(z_i+1) - σ(z_i-1)]/4, multiplied
/// by each further factor through w(z_j - 1) = [σ(w+z_j-1) - σ(w-z_j+1)]/4, and
/// finally moved into the accumulator by a block that reads
/// w = [σ(w+1) - σ(w-1)]/4 once and writes +c·w and -w.
inline ResNet resnet_poly_square(const MPoly& p)
{
    const std::size_t d = p.dim();
    const Eigen::Index d0 = detail::idx(d + 2);
    const Eigen::Index ws = d0 - 1;
    auto in = [](std::size_t j) { return detail::idx(j + 1); };
    auto [entry, entry_bias] = detail::affine_entry(p);

    std::vector<ResBlock> blocks;
    auto block = [&](Eigen::Index width) {
        blocks.push_back({Matrix::Zero(d0, width), Matrix::Zero(width, d0), Vector::Zero(width)});
        return &blocks.back();
    };

    for (const auto& [m, c] : p.graded_terms()) {
        if (m.degree() < 2) continue;
        const auto factors = detail::factor_list(m);
        std::size_t used;
        if (m[factors[0]] >= 2) {
            auto* b = block(1);
            b->W(0, in(factors[0])) = 1.0;
            b->A(ws, 0) = 1.0;
            used = 2;
        } else {
            auto* b = block(2);
            b->W(0, in(factors[0])) = 1.0;
            b->b[0] = 1.0;
            b->W(1, in(factors[0])) = 1.0;
            b->b[1] = -1.0;
            b->A(ws, 0) = 0.25;
            b->A(ws, 1) = -0.25;
            used = 1;
        }
        for (std::size_t k = used; k < factors.size(); ++k) {
            auto* b = block(2);
            b->W(0, ws) = 1.0;
            b->W(0, in(factors[k])) = 1.0;
            b->b[0] = -1.0;
            b->W(1, ws) = 1.0;
            b->W(1, in(factors[k])) = -1.0;
            b->b[1] = 1.0;
            b->A(ws, 0) = 0.25;
            b->A(ws, 1) = -0.25;
        }
        auto* b = block(2);
        b->W(0, ws) = 1.0;
        b->b[0] = 1.0;
        b->W(1, ws) = 1.0;
        b->b[1] = -1.0;
        b->A(0, 0) = 0.25 * c;
        b->A(0, 1) = -0.25 * c;
        b->A(ws, 0) = -0.25;
        b->A(ws, 1) = 0.25;
    }
    Matrix exit = Matrix::Zero(1, d0);
    exit(0, 0) = 1.0;
    return ResNet(Activation::square(p.field()), std::move(entry), std::move(entry_bias), std::move(blocks), std::move(exit));
}

/// Approximate ResNet for p with a general non-affine analytic σ. Products use
/// four neurons,
///   u·v ≈ [σ(z*+h(u+v)) + σ(z*-h(u+v)) - σ(z*+h(u-v)) - σ(z*-h(u-v))] / (4h²σ''(z*)),
/// in which the σ(z*) terms cancel; error is O(h²). Slot layout as in
/// resnet_poly_square; every block has width 4. When z* is not given it is
/// located on a grid in [-2, 2].
inline ResNet resnet_poly_general(const MPoly& p, const Activation& act, double h, std::optional<double> zstar = std::nullopt)
{
    require_same_field(act.field(), p.field(), "resnet_poly_general");
    detail::check_power_series(act, "resnet_poly_general");
    if (auto deg = act.degree(); deg && *deg <= 1)
        throw std::invalid_argument("resnet_poly_general: activation is affine-linear");
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("resnet_poly_general: step h must be positive");
    const double zs = zstar ? *zstar : locate_nonvanishing_derivative(act, 2);
    const Scalar s2 = eval_activation_derivative(act, zs, 2);
    if (std::abs(s2) < 1e-12)
        throw std::invalid_argument(zstar ? "resnet_poly_general: sigma''(z*) vanishes at the given base point"
                                          : "resnet_poly_general: activation is affine-linear (sigma'' vanishes)");

    const std::size_t d = p.dim();
    const Eigen::Index d0 = detail::idx(d + 2);
    const Eigen::Index ws = d0 - 1;
    auto [entry, entry_bias] = detail::affine_entry(p);
    const Scalar kappa = 1.0 / (4.0 * h * h * s2);

    // Affine functional of the state: row · state + offset.
    struct Affine {
        Eigen::RowVectorXcd row;
        Scalar offset;
    };
    auto slot = [&](Eigen::Index k, Scalar offset = 0.0) {
        Affine a{Eigen::RowVectorXcd::Zero(d0), offset};
        a.row[k] = 1.0;
        return a;
    };
    auto constant = [&](Scalar c) { return Affine{Eigen::RowVectorXcd::Zero(d0), c}; };

    std::vector<ResBlock> blocks;
    // Adds Σ_t weights[t]·(u·v) into slots targets[t].
    auto product_block = [&](const Affine& u, const Affine& v, std::span<const std::pair<Eigen::Index, Scalar>> targets) {
        ResBlock b{Matrix::Zero(d0, 4), Matrix::Zero(4, d0), Vector::Zero(4)};
        const Eigen::RowVectorXcd sum_row = h * (u.row + v.row), diff_row = h * (u.row - v.row);
        const Scalar sum_off = h * (u.offset + v.offset), diff_off = h * (u.offset - v.offset);
        b.W.row(0) = sum_row;
        b.b[0] = zs + sum_off;
        b.W.row(1) = -sum_row;
        b.b[1] = zs - sum_off;
        b.W.row(2) = diff_row;
        b.b[2] = zs + diff_off;
        b.W.row(3) = -diff_row;
        b.b[3] = zs - diff_off;
        for (const auto& [k, wgt] : targets) {
            const Scalar g = wgt * kappa;
            b.A(k, 0) = g;
            b.A(k, 1) = g;
            b.A(k, 2) = -g;
            b.A(k, 3) = -g;
        }
        blocks.push_back(std::move(b));
    };

    for (const auto& [m, c] : p.graded_terms()) {
        if (m.degree() < 2) continue;
        const auto factors = detail::factor_list(m);
        const std::pair<Eigen::Index, Scalar> to_ws[] = {{ws, 1.0}};
        product_block(slot(detail::idx(factors[0] + 1)), slot(detail::idx(factors[1] + 1)), to_ws);
        for (std::size_t k = 2; k < factors.size(); ++k)
            product_block(slot(ws), slot(detail::idx(factors[k] + 1), -1.0), to_ws);
        const std::pair<Eigen::Index, Scalar> deposit[] = {{0, c}, {ws, -1.0}};
        product_block(slot(ws), constant(1.0), deposit);
    }
    Matrix exit = Matrix::Zero(1, d0);
    exit(0, 0) = 1.0;
    return ResNet(act, std::move(entry), std::move(entry_bias), std::move(blocks), std::move(exit));
}

/// Fully connected approximation of a shallow network with hidden widths
/// d_ℓ = d+1+m_ℓ. Lanes per hidden layer: (accumulator; the m_ℓ neurons of
/// block ℓ; carried input z*+εz). Carried quantities pass through σ via
/// σ(z*+εq) ≈ c₀ + c₁εq and are decoded affinely in the next layer, so the
/// error is O(ε) while the decoding weights grow like 1/ε.
inline MLP mlp_from_shallow(const ShallowNet& s, std::span<const std::size_t> widths, double eps,
                            std::optional<double> zstar = std::nullopt)
{
    const Activation& act = s.activation();
    detail::check_power_series(act, "mlp_from_shallow");
    detail::check_partition(widths, s.size(), "mlp_from_shallow");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("mlp_from_shallow: epsilon must be positive");
    if (auto deg = act.degree(); deg && *deg == 0) throw std::invalid_argument("mlp_from_shallow: activation is constant");
    const double zs = zstar ? *zstar : locate_nonvanishing_derivative(act, 1);
    const Scalar c0 = eval_activation(act, zs);
    const Scalar c1 = eval_activation_derivative(act, zs, 1);
    if (std::abs(c1) == 0.0)
        throw std::invalid_argument(zstar ? "mlp_from_shallow: sigma'(z*) vanishes at the given base point"
                                          : "mlp_from_shallow: activation is constant");
    if (std::abs(c1 * eps) < 1e-8) throw std::invalid_argument("mlp_from_shallow: |sigma'(z*)·epsilon| < 1e-8, ill-conditioned");

    const std::size_t d = s.dim();
    const Eigen::Index D = detail::idx(d);
    std::vector<Layer> layers;
    std::size_t offset = 0;

    auto unit_rows = [&](Layer& L, Eigen::Index row0, std::size_t count, const Matrix& x_map, const Vector& x_off) {
        // Rows conj(w)·x + b with x = x_map·(input lanes) + x_off.
        for (std::size_t j = 0; j < count; ++j) {
            const auto& n = s.neurons()[offset + j];
            Eigen::RowVectorXcd w(D);
            for (std::size_t i = 0; i < d; ++i) w[detail::idx(i)] = std::conj(n.w[i]);
            L.A.row(row0 + detail::idx(j)).rightCols(x_map.cols()) = w * x_map;
            L.b[row0 + detail::idx(j)] = (w * x_off)(0, 0) + n.b;
        }
    };

    // Layer 1 reads z directly.
    {
        const std::size_t m1 = widths[0];
        const Eigen::Index rows = 1 + detail::idx(m1) + D;
        Layer L{Matrix::Zero(rows, D), Vector::Zero(rows)};
        L.b[0] = zs;
        unit_rows(L, 1, m1, Matrix::Identity(D, D), Vector::Zero(D));
        L.A.bottomRows(D) = eps * Matrix::Identity(D, D);
        L.b.tail(D).setConstant(zs);
        layers.push_back(std::move(L));
    }
    for (std::size_t ell = 0; ell < widths.size(); ++ell) {
        const std::size_t m = widths[ell];
        const Eigen::Index cols = 1 + detail::idx(m) + D;
        const bool last = ell + 1 == widths.size();
        const std::size_t m_next = last ? 0 : widths[ell + 1];
        const Eigen::Index rows = last ? 1 : 1 + detail::idx(m_next) + D;
        Layer L{Matrix::Zero(rows, cols), Vector::Zero(rows)};
        const Scalar inv = 1.0 / (c1 * eps);
        // Accumulator: S = (ĥ_acc - c₀)/(c₁ε) + a·ĥ_units; stored as z* + εS unless last.
        const Scalar acc_scale = last ? 1.0 : Scalar(eps);
        L.A(0, 0) = acc_scale * inv;
        L.b[0] = -acc_scale * c0 * inv + (last ? Scalar{} : Scalar(zs));
        for (std::size_t j = 0; j < m; ++j) L.A(0, 1 + detail::idx(j)) = acc_scale * s.neurons()[offset + j].a;
        offset += m;
        if (!last) {
            // x = (ĥ_carry - c₀)/(c₁ε).
            const Matrix x_map = inv * Matrix::Identity(D, D);
            const Vector x_off = Vector::Constant(D, -c0 * inv);
            unit_rows(L, 1, m_next, x_map, x_off);
            L.A.bottomRightCorner(D, D) = (1.0 / c1) * Matrix::Identity(D, D);
            L.b.tail(D).setConstant(zs - c0 / c1);
        }
        layers.push_back(std::move(L));
    }
    return MLP(act, std::move(layers));
}

/// Exact DenseNet form of a shallow network: hidden layer ℓ holds the next
/// `widths[ℓ]` neurons (reading only the input), the output layer sums them.
inline DenseNet densenet_from_shallow(const ShallowNet& s, std::span<const std::size_t> widths)
{
    detail::check_partition(widths, s.size(), "densenet_from_shallow");
    const std::size_t d = s.dim();
    std::vector<Layer> layers;
    std::size_t offset = 0;
    std::size_t readable = d;
    for (std::size_t m : widths) {
        Layer L{Matrix::Zero(detail::idx(m), detail::idx(readable)), Vector::Zero(detail::idx(m))};
        for (std::size_t j = 0; j < m; ++j) {
            const auto& n = s.neurons()[offset + j];
            for (std::size_t i = 0; i < d; ++i) L.A(detail::idx(j), detail::idx(i)) = std::conj(n.w[i]);
            L.b[detail::idx(j)] = n.b;
        }
        offset += m;
        readable += m;
        layers.push_back(std::move(L));
    }
    Layer out{Matrix::Zero(1, detail::idx(readable)), Vector::Zero(1)};
    for (std::size_t k = 0; k < s.size(); ++k) out.A(0, detail::idx(d + k)) = s.neurons()[k].a;
    layers.push_back(std::move(out));
    return DenseNet(s.activation(), d, std::move(layers));
}

inline DenseNet densenet_from_shallow(const ShallowNet& s)
{
    const std::size_t all[] = {s.size()};
    return densenet_from_shallow(s, all);
}

/// Exact DenseNet form of an MLP: layer ℓ reads only ẑ^{ℓ-1}.
inline DenseNet densenet_from_mlp(const MLP& m)
{
    std::vector<Layer> layers;
    Eigen::Index readable = 0, prev_offset = 0;
    for (const auto& l : m.layers()) {
        readable += l.A.cols();
        Layer L{Matrix::Zero(l.A.rows(), readable), l.b};
        L.A.block(0, prev_offset, l.A.rows(), l.A.cols()) = l.A;
        prev_offset = readable;
        layers.push_back(std::move(L));
    }
    return DenseNet(m.activation(), m.input_dim(), std::move(layers));
}

/// Exact polynomial computed by a ResNet with polynomial activation.
inline MPoly resnet_polynomial(const ResNet& net)
{
    const Activation& act = net.activation();
    if (!act.is_polynomial()) throw std::invalid_argument("resnet_polynomial: activation is not a polynomial");
    const std::size_t d = net.input_dim();
    const Field f = net.field();
    auto affine = [&](const Eigen::RowVectorXcd& row, Scalar offset, const std::vector<MPoly>& state) {
        MPoly q = MPoly::constant(d, f, offset);
        for (Eigen::Index k = 0; k < row.size(); ++k)
            if (row[k] != Scalar{}) q += state[static_cast<std::size_t>(k)] * row[k];
        return q;
    };
    std::vector<MPoly> inputs;
    for (std::size_t i = 0; i < d; ++i) inputs.push_back(MPoly::variable(d, f, i));
    std::vector<MPoly> state;
    for (Eigen::Index r = 0; r < net.entry().rows(); ++r) state.push_back(affine(net.entry().row(r), net.entry_bias()[r], inputs));
    for (const auto& blk : net.blocks()) {
        std::vector<MPoly> act_out;
        for (Eigen::Index j = 0; j < blk.W.rows(); ++j) {
            const MPoly arg = affine(blk.W.row(j), blk.b[j], state);
            MPoly val(d, f), power = MPoly::constant(d, f, 1.0);
            for (std::size_t k = 0; k < act.coeffs().size(); ++k) {
                if (k > 0) power = power * arg;
                if (act.coeffs()[k] != Scalar{}) val += power * act.coeffs()[k];
            }
            act_out.push_back(std::move(val));
        }
        std::vector<MPoly> next = state;
        for (Eigen::Index r = 0; r < blk.A.rows(); ++r) next[static_cast<std::size_t>(r)] += affine(blk.A.row(r), 0.0, act_out);
        state = std::move(next);
    }
    return affine(net.exit().row(0), 0.0, state);
}

// Parameter accounting: every stored scalar, explicit zeros included.

inline std::size_t param_count(const ShallowNet& s) { return s.size() * (s.dim() + 2); }

inline std::size_t param_count(const ResNet& r)
{
    const std::size_t d0 = r.inner_dim(), d = r.input_dim();
    std::size_t n = d0 * d + d0 + d0;
    for (const auto& b : r.blocks()) n += static_cast<std::size_t>(b.A.size() + b.W.size() + b.b.size());
    return n;
}

inline std::size_t param_count(const MLP& m)
{
    std::size_t n = 0;
    for (const auto& l : m.layers()) n += static_cast<std::size_t>(l.A.size() + l.b.size());
    return n;
}

inline std::size_t param_count(const DenseNet& m)
{
    std::size_t n = 0;
    for (const auto& l : m.layers()) n += static_cast<std::size_t>(l.A.size() + l.b.size());
    return n;
}

/// (d+2)n: weights of an n-neuron shallow network on 𝕂^d.
inline std::size_t shallow_param_formula(std::size_t d, std::size_t n) { return (d + 2) * n; }

/// The published closed form 2(n+1)(d+1)+n for the residual embedding.
inline std::size_t resnet_embedding_param_formula(std::size_t d, std::size_t n) { return 2 * (n + 1) * (d + 1) + n; }

/// Term-by-term count of the residual embedding: b⁰ and A^L (d+1 each), A⁰
/// (d(d+1)), and 2D_ℓ(d+1)+D_ℓ per block, i.e. (d+1)(d+2) + (2d+3)n.
inline std::size_t resnet_embedding_param_sum(std::size_t d, std::size_t n) { return (d + 1) * (d + 2) + (2 * d + 3) * n; }

/// Σ_ℓ (d_{ℓ-1}·d_ℓ + d_ℓ) for widths (d_0, …, d_L).
inline std::size_t mlp_param_formula(std::span<const std::size_t> widths)
{
    std::size_t n = 0;
    for (std::size_t l = 1; l < widths.size(); ++l) n += widths[l - 1] * widths[l] + widths[l];
    return n;
}

/// Σ_ℓ (d_ℓ·n_ℓ + d_ℓ) with n_ℓ = d_0 + … + d_{ℓ-1}.
inline std::size_t densenet_param_formula(std::span<const std::size_t> widths)
{
    std::size_t n = 0, readable = widths.empty() ? 0 : widths[0];
    for (std::size_t l = 1; l < widths.size(); ++l) {
        n += widths[l] * readable + widths[l];
        readable += widths[l];
    }
    return n;
}

} // namespace anet
